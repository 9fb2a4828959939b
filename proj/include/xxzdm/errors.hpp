#pragma once

#include <stdexcept>
#include <string>

namespace xxzdm {

/// Index/dimension mismatch in a tensor operation.
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Non-finite data or a failed numerical factorization.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Gram matrix of the orthogonality constraints is singular beyond
/// what pseudo-inversion can regularize.
struct DegeneracyError : std::runtime_error {
  explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Solver produced inconsistent output (e.g. excited energy below the
/// ground energy beyond tolerance).
struct SolverQualityError : std::runtime_error {
  explicit SolverQualityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace xxzdm
