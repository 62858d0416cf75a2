#pragma once

#define QSM_VERSION "0.1.0"
