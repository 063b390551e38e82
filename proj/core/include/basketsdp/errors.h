#pragma once

#include <stdexcept>
#include <string>

namespace basketsdp {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A call/put quote converts to a negative straddle price.
class NegativeResult : public Error {
 public:
  using Error::Error;
};

class UnboundedSupport : public Error {
 public:
  using Error::Error;
};

// A linear form references a monomial beyond the index degree cap.
class IndexTooSmall : public Error {
 public:
  using Error::Error;
};

class InfeasibleDegree : public Error {
 public:
  using Error::Error;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class NotOptimal : public Error {
 public:
  using Error::Error;
};

// Observed prices cannot be matched by any measure on the oracle grid.
class GridInfeasible : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace basketsdp
