#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xtsi/forward_model.hpp"
#include "xtsi/info_bounds.hpp"
#include "xtsi/material_model.hpp"
#include "xtsi/spectral_data.hpp"
#include "xtsi/structured_text.hpp"

namespace xtsi {

enum class ModelVariant { shot_only, material_only, combined };
enum class CorrelationMode { correlated, uncorrelated };
/// Where the uncorrelated model drops off-diagonal terms.
enum class DecorrelationStage { flux, binned };

std::string_view to_string(ModelVariant v);
std::string_view to_string(CorrelationMode m);
std::string_view to_string(DecorrelationStage s);
ModelVariant parse_variant(std::string_view s);
CorrelationMode parse_corr_mode(std::string_view s);
DecorrelationStage parse_decorrelation_stage(std::string_view s);

struct ScenarioConfig {
  int n_pixels = 10;
  double length_min_cm = 0.5;
  double length_max_cm = 20.0;
  int items_per_vial = 4;
  int n_bag_pairs = 160;
  std::vector<int> bins{1, 2, 3};
  std::vector<double> n0{1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
  std::vector<ModelVariant> variants{ModelVariant::shot_only, ModelVariant::material_only, ModelVariant::combined};
  std::vector<CorrelationMode> corr_modes{CorrelationMode::correlated, CorrelationMode::uncorrelated};
  DecorrelationStage decorrelation = DecorrelationStage::flux;
  double threat_prior = 0.5;
  double exposure_time = 1.0;
  int n_realizations = kDefaultRealizations;
  std::uint64_t seed = 20190601;

  // Energy grid.
  double grid_min_kev = 30.0;
  double grid_max_kev = 160.0;
  int grid_samples = 180;

  // Input files; relative paths are resolved against the config file.
  std::string library_path;
  std::string spectrum_path;
  std::string elements_dir;

  EnergyGrid grid() const { return EnergyGrid::uniform(grid_min_kev, grid_max_kev, grid_samples); }
};

/// Throws ConfigurationError on out-of-range values.
void validate(const ScenarioConfig& cfg);

/// Reads a `scenario { ... }` block; keys absent from the file keep defaults.
ScenarioConfig parse_scenario_config(const text::Block& root, const std::string& base_dir = "");
ScenarioConfig load_scenario_config(const std::string& path);
std::string serialize_scenario_config(const ScenarioConfig& cfg);

/// Two objects with identical geometry that differ in one item's material.
/// `non_threat[n]` / `threat[n]` are the per-pixel paths of each variant.
struct BagPair {
  std::vector<PathSpec> non_threat;
  std::vector<PathSpec> threat;
  int changed_pixel = 0;
  int changed_item = 0;
};

/// Shared items are drawn from the non-threat materials; the substituted item
/// takes a threat material. Pair p uses the stream (seed, p), so the result
/// does not depend on thread count. `library` must outlive the pairs.
std::vector<BagPair> generate_bag_pairs(const ScenarioConfig& cfg, const std::vector<MaterialStats>& library);

/// Edges on [grid.front, grid.back] giving equal expected counts of the
/// attenuated spectrum S(E) exp(-τ_ref(E)) in each bin, under the ideal
/// detector's piecewise-linear quadrature.
std::vector<double> balance_bin_edges(const SourceSpectrum& spectrum, const Vector& reference_attenuation, int n_bins);

/// Jitter added to the material-only covariance, relative to its trace.
inline constexpr double kMaterialOnlyJitter = 1e-9;

PixelDistribution build_model_variant(const PixelDistribution& pixel, ModelVariant variant);

/// Uncorrelated-model covariance: the diagonal of `sigma`.
Matrix decorrelate(const Matrix& sigma);

/// Ratio of noise-ellipsoid volumes sqrt(det corr / det uncorr), from
/// eigenvalues floored at 1e-12 * trace.
double ellipsoid_volume_ratio(const Matrix& sigma_corr, const Matrix& sigma_uncorr);

/// One pixel's binned statistics at unit photon budget. Mean counts scale
/// with N0 and material covariances with N0².
struct UnitPixel {
  Vector jd0;
  Matrix sigma_correlated;
  Matrix sigma_uncorrelated;
  bool nonlinear = false;
};

struct BinningModel {
  int n_bins = 0;
  DetectorModel detector;
  /// [object][pixel]; object 2p is pair p's threat variant, 2p + 1 its non-threat.
  std::vector<std::vector<UnitPixel>> objects;
};

/// Everything needed to evaluate any sweep point without touching the
/// R x R energy covariances again.
struct ScenarioModel {
  ScenarioConfig config;
  SourceSpectrum spectrum;
  std::vector<BagPair> pairs;
  Vector reference_attenuation;
  std::vector<BinningModel> binnings;  // one per cfg.bins entry

  int n_objects() const { return 2 * static_cast<int>(pairs.size()); }
  const BinningModel& binning(int n_bins) const;
};

ScenarioModel prepare_scenario(const ScenarioConfig& cfg, const std::vector<MaterialStats>& library,
                               const SourceSpectrum& spectrum, Exec exec = Exec::parallel);

/// Ensemble at one sweep point: weights from the threat prior split evenly
/// over pairs, pairing (threat, non-threat) per bag pair.
EnsembleSpec build_ensemble(const ScenarioModel& model, int n_bins, double n0, ModelVariant variant,
                            CorrelationMode mode);

struct SweepRow {
  double n0 = 0.0;
  int n_bins = 0;
  ModelVariant variant = ModelVariant::combined;
  CorrelationMode corr_mode = CorrelationMode::correlated;
  BoundsResult bounds;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

SweepTable run_sweep(const ScenarioModel& model, Exec exec = Exec::parallel);
SweepTable run_sweep(const ScenarioConfig& cfg, const std::vector<MaterialStats>& library,
                     const SourceSpectrum& spectrum, Exec exec = Exec::parallel);

inline constexpr std::string_view kSweepHeader =
    "n0,n_bins,variant,corr_mode,is_lower_bits,is_upper_bits,pe_lower,pe_upper,hc_minus_is_lower,hc_minus_is_upper";

std::string sweep_csv(const SweepTable& table);

/// Correlated-vs-uncorrelated material covariance volume ratio for every
/// object pixel at one binning. [object][pixel].
std::vector<std::vector<double>> volume_ratios(const ScenarioModel& model, int n_bins);

}  // namespace xtsi
