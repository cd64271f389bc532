#pragma once

#include <vector>

#include "xtsi/linalg.hpp"
#include "xtsi/material_model.hpp"
#include "xtsi/spectral_data.hpp"

namespace xtsi {

struct PathItem {
  const MaterialStats* material = nullptr;
  double length_cm = 0.0;
};

/// Items crossed by one pixel's ray. Empty means an air path.
struct PathSpec {
  std::vector<PathItem> items;
};

/// Total attenuation τ(E) = Σ_t μ_t(E) l_t as a Gaussian process.
struct AttenuationStats {
  Vector tau0;
  Matrix sigma_tau;
};

/// tau0 = Σ μ0_t l_t, sigma_tau = Σ Σμ_t l_t². Items must share `grid`.
AttenuationStats aggregate_attenuation(const PathSpec& path, const EnergyGrid& grid);

/// J0(E) = (N0 S(E) / t) exp(-τ0(E)), photons / (s keV).
Vector mean_flux(const SourceSpectrum& spectrum, const Vector& tau0);

/// Σ_J = (J0 J0ᵀ) ⊙ Σ_τ, first-order propagation through Beer's law.
Matrix linearized_flux_covariance(const Vector& j0, const Matrix& sigma_tau);

/// |Δτ| below which the dropped second-order remainder stays under 1% of J0.
inline constexpr double kLinearizationLimit = 0.39;

/// Upper bound J0 |Δτ|³ / 6 on the Taylor remainder of exp(-τ).
double remainder_bound(double j0, double delta_tau);
bool within_linear_regime(double delta_tau);

/// Energy-binning detector: bin m counts t Σ_r D[m, r] J(E_r).
struct DetectorModel {
  EnergyGrid grid;
  std::vector<double> bin_edges;  // M + 1, keV
  Matrix response;                // M x R

  int n_bins() const { return static_cast<int>(response.rows()); }

  /// Ideal rectangular bins; row m integrates the piecewise-linear
  /// interpolant of the flux exactly over [edge_m, edge_{m+1}].
  static DetectorModel ideal(const EnergyGrid& grid, std::vector<double> edges);
  /// User-supplied response; rows must be non-negative.
  static DetectorModel custom(const EnergyGrid& grid, std::vector<double> edges, Matrix response);
};

/// Exact integral weights of the piecewise-linear interpolant over [lo, hi].
Vector interval_weights(const EnergyGrid& grid, double lo, double hi);

struct BinnedStats {
  Vector jd0;             // t D J0
  Matrix sigma_material;  // t² D Σ_J Dᵀ
};

/// Throws DegenerateError when a bin receives no mean flux.
BinnedStats bin_counts(const DetectorModel& detector, const Vector& j0, const Matrix& sigma_j, double exposure_time);

/// Gaussian model of one pixel's binned counts.
struct PixelDistribution {
  Vector jd0;
  Matrix sigma_material;
  Matrix sigma_total;
  bool low_count = false;      // some bin below the shot-noise validity floor
  bool nonlinear = false;      // 3σ attenuation excursion beyond kLinearizationLimit

  int n_bins() const { return static_cast<int>(jd0.size()); }
};

inline constexpr double kShotNoiseFloor = 10.0;

/// sigma_total = sigma_material + diag(jd0). Requires jd0 > 0.
PixelDistribution combine_shot_noise(const Vector& jd0, const Matrix& sigma_material,
                                     double shot_noise_floor = kShotNoiseFloor);

/// True when 3 sqrt(diag Σ_τ) exceeds kLinearizationLimit anywhere.
bool exceeds_linear_regime(const AttenuationStats& tau);

/// Full chain for one pixel: path -> τ stats -> flux -> bins -> shot noise.
PixelDistribution pixel_distribution(const PathSpec& path, const SourceSpectrum& spectrum,
                                     const DetectorModel& detector);

/// Leading-order relative error of N(λ, λ) as a stand-in for Poisson(λ) at x.
double poisson_gaussian_error(double lambda, double x);
/// Exact (pmf - N(x; λ, λ)) / pmf at integer x.
double poisson_gaussian_error_exact(double lambda, double x);
/// Same pair for the alternative form exp(-(x-λ)²/(2x)) / sqrt(2πx).
double poisson_alt_gaussian_error(double lambda, double x);
double poisson_alt_gaussian_error_exact(double lambda, double x);

}  // namespace xtsi
