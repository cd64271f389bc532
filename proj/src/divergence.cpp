#include "xtsi/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "xtsi/error.hpp"

namespace xtsi {
namespace {

void check_compatible(const PreparedObject& a, const PreparedObject& b) {
  if (a.n_pixels() != b.n_pixels())
    throw AlignmentError(fmt::format("objects have {} and {} pixels", a.n_pixels(), b.n_pixels()));
  if (a.n_pixels() > 0 && a.n_bins() != b.n_bins())
    throw AlignmentError(fmt::format("objects have {} and {} bins per pixel", a.n_bins(), b.n_bins()));
}

}  // namespace

PreparedObject::PreparedObject(const ObjectDistribution& obj) {
  n_bins_ = obj.n_bins();
  if (n_bins_ > kMaxBins) throw SizeError(fmt::format("{} bins per pixel exceeds the limit of {}", n_bins_, kMaxBins));
  pixels_.reserve(obj.pixels.size());
  for (std::size_t n = 0; n < obj.pixels.size(); ++n) {
    const auto& p = obj.pixels[n];
    if (p.n_bins() != n_bins_) throw AlignmentError("pixels of one object must share the bin count");
    if (p.sigma_total.rows() != n_bins_ || p.sigma_total.cols() != n_bins_)
      throw AlignmentError(fmt::format("pixel {}: covariance is not {}x{}", n, n_bins_, n_bins_));
    Pixel px;
    px.mean = p.jd0;
    px.cov = p.sigma_total;
    px.factor = BinFactor(px.cov, fmt::format("pixel {}", n).c_str());
    px.inverse = px.factor.solve(BinMatrix::Identity(n_bins_, n_bins_));
    pixels_.push_back(std::move(px));
  }
}

double bhattacharyya(const PreparedObject& a, const PreparedObject& b) {
  check_compatible(a, b);
  const double m_ln2 = a.n_bins() * std::numbers::ln2;
  double total = 0.0;
  for (int n = 0; n < a.n_pixels(); ++n) {
    BinMatrix summed = a.cov(n) + b.cov(n);
    BinFactor sum;
    try {
      sum = BinFactor(summed);
    } catch (const DecompositionError&) {
      throw DecompositionError(fmt::format("covariance not positive definite: pixel {} (summed covariance)", n));
    }
    BinVector dj = a.mean(n) - b.mean(n);
    total += sum.quad_form(dj) / 4.0 - (a.factor(n).log_det() + b.factor(n).log_det()) / 4.0 + sum.log_det() / 2.0 -
             m_ln2 / 2.0;
  }
  return std::max(total, 0.0);
}

double kl(const PreparedObject& a, const PreparedObject& b) {
  check_compatible(a, b);
  double total = 0.0;
  for (int n = 0; n < a.n_pixels(); ++n) {
    const BinFactor& fb = b.factor(n);
    BinVector dj = a.mean(n) - b.mean(n);
    double trace = b.inverse(n).cwiseProduct(a.cov(n)).sum();
    total += 0.5 * (fb.quad_form(dj) - a.factor(n).log_det() + fb.log_det() + trace - a.n_bins());
  }
  return std::max(total, 0.0);
}

double gaussian_entropy(const PreparedObject& obj) {
  const double per_dim = std::log(2.0 * std::numbers::pi * std::numbers::e);
  double total = 0.0;
  for (int n = 0; n < obj.n_pixels(); ++n) total += 0.5 * (obj.n_bins() * per_dim + obj.factor(n).log_det());
  return total;
}

double bhattacharyya(const ObjectDistribution& a, const ObjectDistribution& b) {
  return bhattacharyya(PreparedObject(a), PreparedObject(b));
}
double kl(const ObjectDistribution& a, const ObjectDistribution& b) { return kl(PreparedObject(a), PreparedObject(b)); }
double gaussian_entropy(const ObjectDistribution& obj) { return gaussian_entropy(PreparedObject(obj)); }

}  // namespace xtsi
