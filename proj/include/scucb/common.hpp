#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scucb {

/// Arm subset, always stored sorted ascending without duplicates.
using Subset = std::vector<std::size_t>;

using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Error taxonomy. Each maps onto the closest standard exception so callers
// can catch either the specific type or the std base.

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ConstraintError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Request exceeds what exhaustive enumeration can handle.
struct CapabilityError : std::length_error {
  using std::length_error::length_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

}  // namespace scucb
