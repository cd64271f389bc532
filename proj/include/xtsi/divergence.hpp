#pragma once

#include <vector>

#include "xtsi/forward_model.hpp"
#include "xtsi/linalg.hpp"

namespace xtsi {

/// Data distribution of a whole object: independent pixels, each Gaussian
/// N(jd0, sigma_total). All pixels carry the same number of bins.
struct ObjectDistribution {
  std::vector<PixelDistribution> pixels;

  int n_pixels() const { return static_cast<int>(pixels.size()); }
  int n_bins() const { return pixels.empty() ? 0 : pixels.front().n_bins(); }
};

/// An object with every pixel's total covariance already factored. Pairwise
/// work over an ensemble factors each object once instead of once per pair.
class PreparedObject {
 public:
  explicit PreparedObject(const ObjectDistribution& obj);

  int n_pixels() const { return static_cast<int>(pixels_.size()); }
  int n_bins() const { return n_bins_; }
  const BinVector& mean(int n) const { return pixels_[static_cast<std::size_t>(n)].mean; }
  const BinMatrix& cov(int n) const { return pixels_[static_cast<std::size_t>(n)].cov; }
  const BinMatrix& inverse(int n) const { return pixels_[static_cast<std::size_t>(n)].inverse; }
  const BinFactor& factor(int n) const { return pixels_[static_cast<std::size_t>(n)].factor; }

 private:
  struct Pixel {
    BinVector mean;
    BinMatrix cov;
    BinMatrix inverse;
    BinFactor factor;
  };
  int n_bins_ = 0;
  std::vector<Pixel> pixels_;
};

/// Bhattacharyya distance summed over pixels. Symmetric, >= 0.
double bhattacharyya(const PreparedObject& a, const PreparedObject& b);
double bhattacharyya(const ObjectDistribution& a, const ObjectDistribution& b);

/// KL(a || b) summed over pixels. >= 0, not symmetric.
double kl(const PreparedObject& a, const PreparedObject& b);
double kl(const ObjectDistribution& a, const ObjectDistribution& b);

/// Differential entropy in nats: Σ_n ½ ln((2πe)^M |Σ_n|).
double gaussian_entropy(const PreparedObject& obj);
double gaussian_entropy(const ObjectDistribution& obj);

}  // namespace xtsi
