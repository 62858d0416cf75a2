#pragma once

#include <stdexcept>
#include <string>

namespace qsm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: the caller asked for something outside an operation's domain.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The inputs were admissible but the numerics could not deliver.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

#define QSM_DEFINE_ERROR(Name, Base) \
  class Name : public Base {         \
   public:                           \
    using Base::Base;                \
  }

QSM_DEFINE_ERROR(DomainError, InputError);
QSM_DEFINE_ERROR(DimensionMismatch, InputError);
QSM_DEFINE_ERROR(NonHermitianInput, InputError);
QSM_DEFINE_ERROR(InvalidState, InputError);
QSM_DEFINE_ERROR(GridError, InputError);
QSM_DEFINE_ERROR(NoSignChange, InputError);
QSM_DEFINE_ERROR(UnsupportedVariant, InputError);

QSM_DEFINE_ERROR(NoConvergence, NumericalFailure);
QSM_DEFINE_ERROR(ToleranceNotMet, NumericalFailure);
QSM_DEFINE_ERROR(NumericalError, NumericalFailure);
QSM_DEFINE_ERROR(SingularMap, NumericalFailure);
QSM_DEFINE_ERROR(Singularity, NumericalFailure);
QSM_DEFINE_ERROR(SingularityOnGrid, NumericalFailure);

#undef QSM_DEFINE_ERROR

}  // namespace qsm
