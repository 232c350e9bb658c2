#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace minimax_cubic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an iteration produces a non-finite value or a factorization
/// breaks down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a loop with a hard iteration cap fails to reach its stopping
/// rule.
class IterationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool all_finite(const Vector& v);

/// Smallest eigenvalue of a symmetric matrix (dense eigendecomposition).
double min_eigenvalue(const Matrix& symmetric);

/// Largest singular value.
double spectral_norm(const Matrix& m);

}  // namespace minimax_cubic
