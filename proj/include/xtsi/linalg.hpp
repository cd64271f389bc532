#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace xtsi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Exec { serial, parallel };

/// (A + Aᵀ)/2
inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Symmetrize, then clip negative eigenvalues to zero.
Matrix repair_psd(const Matrix& a);

/// Max |A - Aᵀ| relative to max |A| (0 for the zero matrix).
double asymmetry(const Matrix& a);

/// Smallest eigenvalue relative to the largest-magnitude one.
double relative_min_eigenvalue(const Matrix& a);

/// Upper limit on energy bins per pixel; per-pixel matrices live on the stack.
inline constexpr int kMaxBins = 16;
using BinVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxBins, 1>;
using BinMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxBins, kMaxBins>;

[[noreturn]] void throw_not_positive_definite(const std::string& context);

/// Cholesky factor with log-determinant. Throws DecompositionError (naming
/// `context`) when the matrix is not positive definite.
template <typename MatrixType>
class BasicSpdFactor {
 public:
  using VectorType = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, MatrixType::MaxRowsAtCompileTime, 1>;

  BasicSpdFactor() = default;
  explicit BasicSpdFactor(const MatrixType& a, const char* context = "") : llt_(a) {
    if (llt_.info() != Eigen::Success) throw_not_positive_definite(context);
    const auto& l = llt_.matrixLLT();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      double d = l(i, i);
      if (!(d > 0.0) || !std::isfinite(d)) throw_not_positive_definite(context);
      sum += std::log(d);
    }
    log_det_ = 2.0 * sum;
  }

  int dim() const { return static_cast<int>(llt_.rows()); }
  double log_det() const { return log_det_; }
  const Eigen::LLT<MatrixType>& llt() const { return llt_; }
  MatrixType lower() const { return llt_.matrixL(); }

  /// xᵀ A⁻¹ x
  template <typename V>
  double quad_form(const V& x) const {
    VectorType y = llt_.matrixL().solve(x);
    return y.squaredNorm();
  }
  /// A⁻¹ B
  template <typename B>
  MatrixType solve(const B& b) const {
    return llt_.solve(b);
  }

 private:
  Eigen::LLT<MatrixType> llt_;
  double log_det_ = 0.0;
};

using SpdFactor = BasicSpdFactor<Matrix>;
using BinFactor = BasicSpdFactor<BinMatrix>;

}  // namespace xtsi
