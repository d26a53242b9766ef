#pragma once
#include <stdexcept>
#include <string>

namespace ecs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad user input or inconsistent options
struct ConfigError : Error {
  using Error::Error;
};

// integrand or potential produced a non-finite value
struct EvaluationError : Error {
  using Error::Error;
};

// an evaluation point landed on a nucleus
struct SingularPointError : EvaluationError {
  using EvaluationError::EvaluationError;
};

// factorization / eigensolver breakdown
struct NumericalError : Error {
  using Error::Error;
};

// search produced no acceptable candidate
struct NotFoundError : Error {
  using Error::Error;
};

// time propagation blew up
struct DivergenceError : Error {
  using Error::Error;
};

} // namespace ecs
