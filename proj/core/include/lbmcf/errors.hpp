#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbmcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition (non-positive alpha, bad grid, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A complex number landed on the principal-argument branch cut (-inf, 0].
class BranchCutError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, CFL violations, stagnating solvers.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when a flow or Newton iterate leaves the hypercritical set.
class HypercriticalityLost : public Error {
 public:
  HypercriticalityLost(double time, std::size_t point_index, double theta)
      : Error("hypercriticality lost at t=" + std::to_string(time) +
              ", grid index " + std::to_string(point_index) +
              ", theta=" + std::to_string(theta)),
        time_(time),
        point_index_(point_index),
        theta_(theta) {}

  double time() const { return time_; }
  std::size_t point_index() const { return point_index_; }
  double theta() const { return theta_; }

 private:
  double time_;
  std::size_t point_index_;
  double theta_;
};

}  // namespace lbmcf
