#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbmle {

using index_t = std::size_t;
using numvec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when a numerical routine cannot produce a result that meets its
/// contract (singular system, non-convergence, divergence).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when inputs violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what)
      : std::invalid_argument(what) {}
};

inline void require(bool cond, const std::string& message) {
  if (!cond) throw InvalidArgument(message);
}

}  // namespace rbmle
