#include "xtsi/forward_model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "xtsi/error.hpp"

namespace xtsi {

AttenuationStats aggregate_attenuation(const PathSpec& path, const EnergyGrid& grid) {
  const int r = grid.size();
  AttenuationStats out{Vector::Zero(r), Matrix::Zero(r, r)};
  for (const auto& item : path.items) {
    if (!item.material) throw AlignmentError("path item without a material");
    if (!(item.length_cm > 0.0)) throw ValidationError("path item lengths must be positive");
    require_same_grid(item.material->grid, grid, "material " + item.material->name);
    out.tau0 += item.length_cm * item.material->mu0;
    out.sigma_tau += (item.length_cm * item.length_cm) * item.material->sigma_mu;
  }
  return out;
}

Vector mean_flux(const SourceSpectrum& spectrum, const Vector& tau0) {
  if (tau0.size() != spectrum.grid.size()) throw AlignmentError("attenuation and spectrum lengths differ");
  double scale = spectrum.n0 / spectrum.exposure_time;
  return (scale * spectrum.s.array() * (-tau0.array()).exp()).matrix();
}

Matrix linearized_flux_covariance(const Vector& j0, const Matrix& sigma_tau) {
  if (sigma_tau.rows() != j0.size() || sigma_tau.cols() != j0.size())
    throw AlignmentError("flux and attenuation covariance dimensions differ");
  return j0.asDiagonal() * sigma_tau * j0.asDiagonal();
}

double remainder_bound(double j0, double delta_tau) {
  double a = std::abs(delta_tau);
  return j0 * a * a * a / 6.0;
}

bool within_linear_regime(double delta_tau) { return std::abs(delta_tau) <= kLinearizationLimit; }

Vector interval_weights(const EnergyGrid& grid, double lo, double hi) {
  Vector w = Vector::Zero(grid.size());
  for (int k = 0; k + 1 < grid.size(); ++k) {
    double a = grid[k], b = grid[k + 1];
    double x0 = std::max(lo, a), x1 = std::min(hi, b);
    if (!(x1 > x0)) continue;
    double h = b - a;
    w[k] += ((b - x0) * (b - x0) - (b - x1) * (b - x1)) / (2.0 * h);
    w[k + 1] += ((x1 - a) * (x1 - a) - (x0 - a) * (x0 - a)) / (2.0 * h);
  }
  return w;
}

namespace {

void check_edges(const EnergyGrid& grid, const std::vector<double>& edges) {
  if (edges.size() < 2) throw ValidationError("detector needs at least two bin edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0 && !(edges[i] > edges[i - 1])) throw ValidationError("bin edges must be strictly increasing");
    if (edges[i] < grid.front() || edges[i] > grid.back())
      throw ValidationError(fmt::format("bin edge {} keV outside grid [{}, {}]", edges[i], grid.front(), grid.back()));
  }
}

}  // namespace

DetectorModel DetectorModel::ideal(const EnergyGrid& grid, std::vector<double> edges) {
  check_edges(grid, edges);
  const int m = static_cast<int>(edges.size()) - 1;
  Matrix d(m, grid.size());
  for (int b = 0; b < m; ++b)
    d.row(b) = interval_weights(grid, edges[static_cast<std::size_t>(b)], edges[static_cast<std::size_t>(b) + 1]).transpose();
  return DetectorModel{grid, std::move(edges), std::move(d)};
}

DetectorModel DetectorModel::custom(const EnergyGrid& grid, std::vector<double> edges, Matrix response) {
  check_edges(grid, edges);
  if (response.rows() != static_cast<Eigen::Index>(edges.size()) - 1 || response.cols() != grid.size())
    throw AlignmentError(fmt::format("response must be {}x{}", edges.size() - 1, grid.size()));
  if (response.minCoeff() < 0.0) throw ValidationError("detector response must be non-negative");
  return DetectorModel{grid, std::move(edges), std::move(response)};
}

BinnedStats bin_counts(const DetectorModel& detector, const Vector& j0, const Matrix& sigma_j, double exposure_time) {
  if (j0.size() != detector.grid.size()) throw AlignmentError("flux and detector grids differ");
  if (sigma_j.rows() != j0.size() || sigma_j.cols() != j0.size())
    throw AlignmentError("flux covariance dimensions differ from the flux");
  const Matrix& d = detector.response;
  BinnedStats out{exposure_time * (d * j0), (exposure_time * exposure_time) * (d * sigma_j * d.transpose())};
  for (int m = 0; m < out.jd0.size(); ++m)
    if (!(out.jd0[m] > 0.0))
      throw DegenerateError(fmt::format("energy bin {} [{}, {}] keV receives no flux", m, detector.bin_edges[static_cast<std::size_t>(m)],
                                        detector.bin_edges[static_cast<std::size_t>(m) + 1]));
  out.sigma_material = symmetrize(out.sigma_material);
  return out;
}

PixelDistribution combine_shot_noise(const Vector& jd0, const Matrix& sigma_material, double shot_noise_floor) {
  if (sigma_material.rows() != jd0.size() || sigma_material.cols() != jd0.size())
    throw AlignmentError("bin covariance dimensions differ from the mean");
  if (!(jd0.array() > 0.0).all()) throw DegenerateError("mean bin counts must be positive");
  PixelDistribution p;
  p.jd0 = jd0;
  p.sigma_material = sigma_material;
  p.sigma_total = sigma_material;
  p.sigma_total.diagonal() += jd0;
  p.low_count = (jd0.array() < shot_noise_floor).any();
  return p;
}

bool exceeds_linear_regime(const AttenuationStats& tau) {
  double max_sd = tau.sigma_tau.diagonal().cwiseMax(0.0).cwiseSqrt().maxCoeff();
  return !within_linear_regime(3.0 * max_sd);
}

PixelDistribution pixel_distribution(const PathSpec& path, const SourceSpectrum& spectrum,
                                     const DetectorModel& detector) {
  require_same_grid(spectrum.grid, detector.grid, "spectrum vs detector");
  AttenuationStats tau = aggregate_attenuation(path, spectrum.grid);
  Vector j0 = mean_flux(spectrum, tau.tau0);
  Matrix sj = linearized_flux_covariance(j0, tau.sigma_tau);
  BinnedStats b = bin_counts(detector, j0, sj, spectrum.exposure_time);
  PixelDistribution p = combine_shot_noise(b.jd0, b.sigma_material);
  p.nonlinear = exceeds_linear_regime(tau);
  return p;
}

double poisson_gaussian_error(double lambda, double x) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  double delta = (x - lambda) / lambda;
  return (-3.0 * lambda + (x - lambda) * (x - lambda)) / (6.0 * lambda) * delta;
}

namespace {

double poisson_log_pmf(double lambda, double k) { return k * std::log(lambda) - lambda - std::lgamma(k + 1.0); }

}  // namespace

double poisson_gaussian_error_exact(double lambda, double x) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  double lp = poisson_log_pmf(lambda, x);
  double ln = -(x - lambda) * (x - lambda) / (2.0 * lambda) - 0.5 * std::log(2.0 * std::numbers::pi * lambda);
  return 1.0 - std::exp(ln - lp);
}

double poisson_alt_gaussian_error(double lambda, double x) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  double delta = (x - lambda) / lambda;
  return -(x - lambda) * (x - lambda) / (3.0 * lambda) * delta;
}

double poisson_alt_gaussian_error_exact(double lambda, double x) {
  if (!(lambda > 0.0) || !(x > 0.0)) throw DomainError("lambda and x must be positive");
  double lp = poisson_log_pmf(lambda, x);
  double lf = -(x - lambda) * (x - lambda) / (2.0 * x) - 0.5 * std::log(2.0 * std::numbers::pi * x);
  return 1.0 - std::exp(lf - lp);
}

}  // namespace xtsi
