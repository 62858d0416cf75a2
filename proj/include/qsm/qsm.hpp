#pragma once

#include "qsm/errors.hpp"
#include "qsm/measures/blp.hpp"
#include "qsm/measures/divisibility.hpp"
#include "qsm/measures/holevo.hpp"
#include "qsm/measures/sss.hpp"
#include "qsm/numerics/matrix.hpp"
#include "qsm/numerics/optimize.hpp"
#include "qsm/numerics/quadrature.hpp"
#include "qsm/numerics/spectral.hpp"
#include "qsm/numerics/volterra.hpp"
#include "qsm/quantum/channel.hpp"
#include "qsm/quantum/generator.hpp"
#include "qsm/quantum/state.hpp"
#include "qsm/semimarkov/dephasing.hpp"
#include "qsm/semimarkov/evolve.hpp"
#include "qsm/semimarkov/monte_carlo.hpp"
#include "qsm/semimarkov/process.hpp"
#include "qsm/semimarkov/projector.hpp"
#include "qsm/semimarkov/wtd.hpp"
#include "qsm/version.hpp"
