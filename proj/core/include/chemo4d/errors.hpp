#pragma once

#include <stdexcept>
#include <string>

namespace chemo4d {

struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CflViolationError : std::runtime_error {
  CflViolationError(double dt, double limit)
      : std::runtime_error("CFL violation: dt " + std::to_string(dt) +
                           " exceeds limit " + std::to_string(limit)),
        dt(dt), limit(limit) {}
  double dt;
  double limit;
};

struct NonFiniteError : std::runtime_error {
  NonFiniteError(const std::string& what, double time)
      : std::runtime_error(what + " at t = " + std::to_string(time)),
        time(time) {}
  double time;
};

struct NonContractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chemo4d
