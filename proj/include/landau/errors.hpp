#pragma once

#include <stdexcept>
#include <string>

namespace landau {

/// Input outside an operation's documented domain (CLI exit code 2).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed data: non-finite samples, negative densities, mismatched grids.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time step larger than the explicit stability limit.
class StabilityError : public ParameterError {
 public:
  StabilityError(const std::string& what, double admissible)
      : ParameterError(what), admissible_dt(admissible) {}
  double admissible_dt;
};

/// Checkpoint integrity failure.
class ChecksumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

}  // namespace landau
