#include "minimax_cubic/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace minimax_cubic {

bool all_finite(const Vector& v) { return v.allFinite(); }

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigendecomposition failed");
  return es.eigenvalues()(0);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace minimax_cubic
