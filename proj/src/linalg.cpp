#include "xtsi/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "xtsi/error.hpp"

namespace xtsi {

Matrix repair_psd(const Matrix& a) {
  Matrix s = symmetrize(a);
  if (s.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) throw DecompositionError("eigendecomposition failed during PSD repair");
  if (eig.eigenvalues().minCoeff() >= 0.0) return s;
  Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  Matrix r = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return symmetrize(r);
}

double asymmetry(const Matrix& a) {
  double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

double relative_min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a), Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  double largest = ev.cwiseAbs().maxCoeff();
  if (largest == 0.0) return 0.0;
  return ev.minCoeff() / largest;
}

void throw_not_positive_definite(const std::string& context) {
  throw DecompositionError(context.empty() ? std::string("covariance not positive definite")
                                           : "covariance not positive definite: " + context);
}

}  // namespace xtsi
