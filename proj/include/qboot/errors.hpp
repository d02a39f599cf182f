#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qboot {

// Bad run configuration: unknown keys, invalid parameter combinations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The kernel sum in the plug-in variance estimate vanished: no sample point
// fell inside the kernel support around the sample quantile. Carries the
// context so callers can decide on a fallback.
class DegenerateStudentizer : public std::runtime_error {
 public:
  DegenerateStudentizer(std::size_t n, double xi, double q);

  std::size_t n;
  double xi;
  double q;
};

}  // namespace qboot
