#include "xtsi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "xtsi/error.hpp"
#include "xtsi/rng.hpp"

namespace xtsi {
namespace {

constexpr std::uint64_t kPairStream = 0x70616972;  // "pair"

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::shot_only: return "shot_only";
    case ModelVariant::material_only: return "material_only";
    case ModelVariant::combined: return "combined";
  }
  return "?";
}

std::string_view to_string(CorrelationMode m) {
  return m == CorrelationMode::correlated ? "correlated" : "uncorrelated";
}

std::string_view to_string(DecorrelationStage s) { return s == DecorrelationStage::flux ? "flux" : "binned"; }

ModelVariant parse_variant(std::string_view s) {
  if (s == "shot_only") return ModelVariant::shot_only;
  if (s == "material_only") return ModelVariant::material_only;
  if (s == "combined") return ModelVariant::combined;
  throw ConfigurationError("unknown model variant '" + std::string(s) + "'");
}

CorrelationMode parse_corr_mode(std::string_view s) {
  if (s == "correlated") return CorrelationMode::correlated;
  if (s == "uncorrelated") return CorrelationMode::uncorrelated;
  throw ConfigurationError("unknown correlation mode '" + std::string(s) + "'");
}

DecorrelationStage parse_decorrelation_stage(std::string_view s) {
  if (s == "flux") return DecorrelationStage::flux;
  if (s == "binned") return DecorrelationStage::binned;
  throw ConfigurationError("unknown decorrelation stage '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& why) { throw ConfigurationError("scenario: " + why); };
  if (cfg.n_pixels < 1) fail("n_pixels must be at least 1");
  if (!(cfg.length_min_cm > 0.0) || !(cfg.length_max_cm >= cfg.length_min_cm))
    fail("vial length range must be positive and ordered");
  if (cfg.items_per_vial < 1) fail("items_per_vial must be at least 1");
  if (cfg.n_bag_pairs < 1) fail("n_bag_pairs must be at least 1");
  if (cfg.bins.empty()) fail("bins sweep is empty");
  for (int b : cfg.bins)
    if (b < 1 || b > kMaxBins) fail(fmt::format("bin count {} outside [1, {}]", b, kMaxBins));
  if (cfg.n0.empty()) fail("n0 sweep is empty");
  for (double n : cfg.n0)
    if (!(n > 0.0)) fail("photon budgets must be positive");
  if (cfg.variants.empty()) fail("variant list is empty");
  if (cfg.corr_modes.empty()) fail("correlation-mode list is empty");
  if (!(cfg.threat_prior > 0.0 && cfg.threat_prior < 1.0)) fail("threat_prior must lie in (0, 1)");
  if (!(cfg.exposure_time > 0.0)) fail("exposure_time must be positive");
  if (cfg.n_realizations < 2) fail("n_realizations must be at least 2");
  if (cfg.grid_samples < 2 || !(cfg.grid_min_kev > 0.0) || !(cfg.grid_max_kev > cfg.grid_min_kev))
    fail("invalid energy grid");
}

ScenarioConfig parse_scenario_config(const text::Block& root, const std::string& base_dir) {
  auto blocks = root.blocks("scenario");
  if (blocks.size() != 1) throw ConfigurationError(root.source + ": expected exactly one 'scenario { ... }' block");
  const text::Block& b = *blocks.front();
  static const char* known[] = {"n_pixels",       "length_min_cm", "length_max_cm", "items_per_vial", "n_bag_pairs",
                                "bins",           "n0",            "variants",      "corr_modes",     "decorrelation",
                                "threat_prior",   "exposure_time", "n_realizations", "seed",          "grid_min_kev",
                                "grid_max_kev",   "grid_samples",  "library",       "spectrum",       "elements"};
  for (const auto& e : b.entries)
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return e.key == k; }) == std::end(known))
      throw ParseError(root.source, e.line, "unknown scenario key '" + e.key + "'");

  ScenarioConfig cfg;
  if (b.has("n_pixels")) cfg.n_pixels = static_cast<int>(b.integer("n_pixels"));
  if (b.has("length_min_cm")) cfg.length_min_cm = b.number("length_min_cm");
  if (b.has("length_max_cm")) cfg.length_max_cm = b.number("length_max_cm");
  if (b.has("items_per_vial")) cfg.items_per_vial = static_cast<int>(b.integer("items_per_vial"));
  if (b.has("n_bag_pairs")) cfg.n_bag_pairs = static_cast<int>(b.integer("n_bag_pairs"));
  if (b.has("bins")) {
    cfg.bins.clear();
    for (double v : b.numbers("bins")) cfg.bins.push_back(static_cast<int>(v));
  }
  if (b.has("n0")) cfg.n0 = b.numbers("n0");
  if (b.has("variants")) {
    cfg.variants.clear();
    for (const auto& w : b.words("variants")) cfg.variants.push_back(parse_variant(w));
  }
  if (b.has("corr_modes")) {
    cfg.corr_modes.clear();
    for (const auto& w : b.words("corr_modes")) cfg.corr_modes.push_back(parse_corr_mode(w));
  }
  if (b.has("decorrelation")) cfg.decorrelation = parse_decorrelation_stage(b.str("decorrelation"));
  if (b.has("threat_prior")) cfg.threat_prior = b.number("threat_prior");
  if (b.has("exposure_time")) cfg.exposure_time = b.number("exposure_time");
  if (b.has("n_realizations")) cfg.n_realizations = static_cast<int>(b.integer("n_realizations"));
  if (b.has("seed")) cfg.seed = static_cast<std::uint64_t>(b.integer("seed"));
  if (b.has("grid_min_kev")) cfg.grid_min_kev = b.number("grid_min_kev");
  if (b.has("grid_max_kev")) cfg.grid_max_kev = b.number("grid_max_kev");
  if (b.has("grid_samples")) cfg.grid_samples = static_cast<int>(b.integer("grid_samples"));
  if (b.has("library")) cfg.library_path = resolve(base_dir, b.str("library"));
  if (b.has("spectrum")) cfg.spectrum_path = resolve(base_dir, b.str("spectrum"));
  if (b.has("elements")) cfg.elements_dir = resolve(base_dir, b.str("elements"));
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  return parse_scenario_config(text::parse_file(path), std::filesystem::path(path).parent_path().string());
}

std::string serialize_scenario_config(const ScenarioConfig& cfg) {
  auto join = [](const auto& values, auto&& fmt_one) {
    std::string s;
    for (const auto& v : values) {
      if (!s.empty()) s += ", ";
      s += fmt_one(v);
    }
    return s;
  };
  text::Block b;
  b.type = "scenario";
  auto add = [&](const char* k, std::string v) { b.entries.push_back({k, std::move(v), 0}); };
  add("n_pixels", std::to_string(cfg.n_pixels));
  add("length_min_cm", text::format_exact(cfg.length_min_cm));
  add("length_max_cm", text::format_exact(cfg.length_max_cm));
  add("items_per_vial", std::to_string(cfg.items_per_vial));
  add("n_bag_pairs", std::to_string(cfg.n_bag_pairs));
  add("bins", join(cfg.bins, [](int v) { return std::to_string(v); }));
  add("n0", join(cfg.n0, [](double v) { return text::format_exact(v); }));
  add("variants", join(cfg.variants, [](ModelVariant v) { return std::string(to_string(v)); }));
  add("corr_modes", join(cfg.corr_modes, [](CorrelationMode v) { return std::string(to_string(v)); }));
  add("decorrelation", std::string(to_string(cfg.decorrelation)));
  add("threat_prior", text::format_exact(cfg.threat_prior));
  add("exposure_time", text::format_exact(cfg.exposure_time));
  add("n_realizations", std::to_string(cfg.n_realizations));
  add("seed", std::to_string(cfg.seed));
  add("grid_min_kev", text::format_exact(cfg.grid_min_kev));
  add("grid_max_kev", text::format_exact(cfg.grid_max_kev));
  add("grid_samples", std::to_string(cfg.grid_samples));
  if (!cfg.library_path.empty()) add("library", cfg.library_path);
  if (!cfg.spectrum_path.empty()) add("spectrum", cfg.spectrum_path);
  if (!cfg.elements_dir.empty()) add("elements", cfg.elements_dir);
  text::Block root;
  root.children.push_back(std::move(b));
  return text::serialize(root);
}

// ---------------------------------------------------------------------------
// Bag pairs

std::vector<BagPair> generate_bag_pairs(const ScenarioConfig& cfg, const std::vector<MaterialStats>& library) {
  validate(cfg);
  std::vector<const MaterialStats*> threats, benign;
  for (const auto& m : library) (m.class_label == ClassLabel::threat ? threats : benign).push_back(&m);
  if (threats.empty() || benign.empty())
    throw ConfigurationError("material library needs at least one threat and one non-threat material");

  std::vector<BagPair> pairs(static_cast<std::size_t>(cfg.n_bag_pairs));
  for (int p = 0; p < cfg.n_bag_pairs; ++p) {
    Engine rng = make_engine(cfg.seed, {kPairStream, static_cast<std::uint64_t>(p)});
    std::uniform_real_distribution<double> length(cfg.length_min_cm, cfg.length_max_cm);
    std::uniform_int_distribution<std::size_t> pick_benign(0, benign.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_threat(0, threats.size() - 1);
    std::uniform_int_distribution<int> pick_pixel(0, cfg.n_pixels - 1);
    std::uniform_int_distribution<int> pick_item(0, cfg.items_per_vial - 1);

    BagPair& pair = pairs[static_cast<std::size_t>(p)];
    pair.non_threat.resize(static_cast<std::size_t>(cfg.n_pixels));
    for (auto& path : pair.non_threat) {
      double item_length = length(rng) / cfg.items_per_vial;
      for (int t = 0; t < cfg.items_per_vial; ++t) path.items.push_back(PathItem{benign[pick_benign(rng)], item_length});
    }
    pair.changed_pixel = pick_pixel(rng);
    pair.changed_item = pick_item(rng);
    pair.threat = pair.non_threat;
    pair.threat[static_cast<std::size_t>(pair.changed_pixel)].items[static_cast<std::size_t>(pair.changed_item)].material =
        threats[pick_threat(rng)];
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Bin edges

std::vector<double> balance_bin_edges(const SourceSpectrum& spectrum, const Vector& reference_attenuation, int n_bins) {
  if (n_bins < 1) throw ParameterError("n_bins must be at least 1");
  const EnergyGrid& grid = spectrum.grid;
  if (reference_attenuation.size() != grid.size()) throw AlignmentError("reference attenuation length differs from grid");
  Vector f = (spectrum.s.array() * (-reference_attenuation.array()).exp()).matrix();
  const int r = grid.size();
  std::vector<double> cumulative(static_cast<std::size_t>(r), 0.0);
  for (int k = 0; k + 1 < r; ++k)
    cumulative[static_cast<std::size_t>(k) + 1] =
        cumulative[static_cast<std::size_t>(k)] + 0.5 * (grid[k + 1] - grid[k]) * (f[k] + f[k + 1]);
  const double total = cumulative.back();
  if (!(total > 0.0)) throw DegenerateError("attenuated reference spectrum carries no counts");

  std::vector<double> edges{grid.front()};
  for (int m = 1; m < n_bins; ++m) {
    double target = total * m / n_bins;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    int k = std::clamp(static_cast<int>(it - cumulative.begin()) - 1, 0, r - 2);
    double h = grid[k + 1] - grid[k];
    double rhs = target - cumulative[static_cast<std::size_t>(k)];
    // ∫_0^u (f_k + (f_{k+1} - f_k) s / h) ds = rhs
    double a = (f[k + 1] - f[k]) / (2.0 * h);
    double b = f[k];
    double u = (a == 0.0) ? rhs / b : 2.0 * rhs / (b + std::sqrt(std::max(0.0, b * b + 4.0 * a * rhs)));
    double edge = grid[k] + std::clamp(u, 0.0, h);
    if (!(edge > edges.back())) throw DegenerateError("bin-edge balancing produced an empty bin");
    edges.push_back(edge);
  }
  if (!(grid.back() > edges.back())) throw DegenerateError("bin-edge balancing produced an empty bin");
  edges.push_back(grid.back());
  return edges;
}

// ---------------------------------------------------------------------------
// Model variants and the correlated/uncorrelated comparison

PixelDistribution build_model_variant(const PixelDistribution& pixel, ModelVariant variant) {
  PixelDistribution out = pixel;
  const int m = pixel.n_bins();
  switch (variant) {
    case ModelVariant::shot_only:
      out.sigma_total = pixel.jd0.asDiagonal();
      break;
    case ModelVariant::material_only: {
      double trace = pixel.sigma_material.trace();
      if (!(trace > 0.0)) throw DegenerateError("material-only model with zero material covariance");
      out.sigma_total = pixel.sigma_material + kMaterialOnlyJitter * trace * Matrix::Identity(m, m);
      break;
    }
    case ModelVariant::combined:
      out.sigma_total = pixel.sigma_material;
      out.sigma_total.diagonal() += pixel.jd0;
      break;
  }
  return out;
}

Matrix decorrelate(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw AlignmentError("decorrelate expects a square matrix");
  return sigma.diagonal().asDiagonal();
}

double ellipsoid_volume_ratio(const Matrix& sigma_corr, const Matrix& sigma_uncorr) {
  if (sigma_corr.rows() != sigma_corr.cols() || sigma_uncorr.rows() != sigma_uncorr.cols() ||
      sigma_corr.rows() != sigma_uncorr.rows())
    throw AlignmentError("volume ratio needs two square matrices of equal size");
  auto log_volume = [](const Matrix& s, const char* which) {
    double trace = s.trace();
    if (!(trace > 0.0)) throw DegenerateError(std::string(which) + " covariance has zero determinant");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s), Eigen::EigenvaluesOnly);
    double floor = 1e-12 * trace;
    double lv = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) lv += 0.5 * std::log(std::max(eig.eigenvalues()[i], floor));
    return lv;
  };
  double lu = log_volume(sigma_uncorr, "uncorrelated");
  double lc = sigma_corr.trace() > 0.0 ? log_volume(sigma_corr, "correlated") : -HUGE_VAL;
  return std::exp(lc - lu);
}

// ---------------------------------------------------------------------------
// Scenario model

const BinningModel& ScenarioModel::binning(int n_bins) const {
  for (const auto& b : binnings)
    if (b.n_bins == n_bins) return b;
  throw ParameterError(fmt::format("scenario has no {}-bin detector", n_bins));
}

ScenarioModel prepare_scenario(const ScenarioConfig& cfg, const std::vector<MaterialStats>& library,
                               const SourceSpectrum& spectrum_in, Exec exec) {
  validate(cfg);
  const EnergyGrid& grid = spectrum_in.grid;
  for (const auto& m : library) require_same_grid(m.grid, grid, "material " + m.name);

  SourceSpectrum unit = spectrum_in;
  unit.n0 = 1.0;
  unit.exposure_time = cfg.exposure_time;

  ScenarioModel model{cfg, unit, generate_bag_pairs(cfg, library), Vector(), {}};
  const int n_obj = model.n_objects();
  const int n_pix = cfg.n_pixels;
  auto path_of = [&](int obj, int pix) -> const PathSpec& {
    const BagPair& pair = model.pairs[static_cast<std::size_t>(obj / 2)];
    return (obj % 2 == 0 ? pair.threat : pair.non_threat)[static_cast<std::size_t>(pix)];
  };
  // The non-threat variant repeats the threat variant's paths except at the
  // changed pixel, so only those are evaluated.
  auto is_copy = [&](int obj, int pix) {
    return obj % 2 == 1 && pix != model.pairs[static_cast<std::size_t>(obj / 2)].changed_pixel;
  };
  const int n_tasks = n_obj * n_pix;

  // Reference attenuation: -ln of the ensemble-mean transmission.
  std::vector<Vector> transmission(static_cast<std::size_t>(n_tasks));
  auto transmit = [&](int task) {
    Vector tau0 = Vector::Zero(grid.size());
    for (const auto& item : path_of(task / n_pix, task % n_pix).items) tau0 += item.length_cm * item.material->mu0;
    transmission[static_cast<std::size_t>(task)] = (-tau0.array()).exp().matrix();
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n_tasks; ++t) transmit(t);
  } else {
    for (int t = 0; t < n_tasks; ++t) transmit(t);
  }
  Vector mean_transmission = Vector::Zero(grid.size());
  for (const auto& t : transmission) mean_transmission += t;
  mean_transmission /= static_cast<double>(n_tasks);
  model.reference_attenuation = -mean_transmission.array().max(1e-300).log().matrix();
  transmission.clear();

  for (int b : cfg.bins) {
    BinningModel bm{b, DetectorModel::ideal(grid, balance_bin_edges(unit, model.reference_attenuation, b)), {}};
    bm.objects.assign(static_cast<std::size_t>(n_obj), std::vector<UnitPixel>(static_cast<std::size_t>(n_pix)));
    model.binnings.push_back(std::move(bm));
  }

  auto evaluate = [&](int task) {
    int obj = task / n_pix, pix = task % n_pix;
    if (is_copy(obj, pix)) return;
    AttenuationStats tau = aggregate_attenuation(path_of(obj, pix), grid);
    Vector j0 = mean_flux(unit, tau.tau0);
    Matrix sj = linearized_flux_covariance(j0, tau.sigma_tau);
    Matrix sj_diag = decorrelate(sj);
    bool nonlinear = exceeds_linear_regime(tau);
    for (auto& bm : model.binnings) {
      BinnedStats corr = bin_counts(bm.detector, j0, sj, unit.exposure_time);
      UnitPixel& up = bm.objects[static_cast<std::size_t>(obj)][static_cast<std::size_t>(pix)];
      up.jd0 = corr.jd0;
      up.sigma_correlated = corr.sigma_material;
      up.sigma_uncorrelated = cfg.decorrelation == DecorrelationStage::flux
                                  ? bin_counts(bm.detector, j0, sj_diag, unit.exposure_time).sigma_material
                                  : decorrelate(corr.sigma_material);
      up.nonlinear = nonlinear;
    }
  };
  auto guarded = [&](int task) {
    try {
      evaluate(task);
    } catch (const Error& e) {
      throw Error(fmt::format("pair {} object {} pixel {}: {}", task / n_pix / 2, task / n_pix, task % n_pix, e.what()));
    }
  };
  if (exec == Exec::parallel) {
    // Exceptions may not escape an OpenMP region; capture the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (int t = 0; t < n_tasks; ++t) {
      try {
        guarded(t);
      } catch (...) {
#pragma omp critical(xtsi_prepare_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int t = 0; t < n_tasks; ++t) guarded(t);
  }
  for (auto& bm : model.binnings)
    for (int obj = 1; obj < n_obj; obj += 2)
      for (int pix = 0; pix < n_pix; ++pix)
        if (is_copy(obj, pix))
          bm.objects[static_cast<std::size_t>(obj)][static_cast<std::size_t>(pix)] =
              bm.objects[static_cast<std::size_t>(obj - 1)][static_cast<std::size_t>(pix)];
  return model;
}

EnsembleSpec build_ensemble(const ScenarioModel& model, int n_bins, double n0, ModelVariant variant,
                            CorrelationMode mode) {
  const BinningModel& bm = model.binning(n_bins);
  const int n_pairs = static_cast<int>(model.pairs.size());
  const double prior = model.config.threat_prior;
  EnsembleSpec ens;
  ens.members.reserve(bm.objects.size());
  std::vector<std::pair<int, int>> pairing;
  for (int obj = 0; obj < model.n_objects(); ++obj) {
    EnsembleMember m;
    m.label = obj % 2 == 0 ? ClassLabel::threat : ClassLabel::non_threat;
    m.weight = (obj % 2 == 0 ? prior : 1.0 - prior) / n_pairs;
    for (const UnitPixel& up : bm.objects[static_cast<std::size_t>(obj)]) {
      const Matrix& unit_sigma = mode == CorrelationMode::correlated ? up.sigma_correlated : up.sigma_uncorrelated;
      PixelDistribution p = combine_shot_noise(n0 * up.jd0, (n0 * n0) * unit_sigma);
      p.nonlinear = up.nonlinear;
      m.distribution.pixels.push_back(build_model_variant(p, variant));
    }
    ens.members.push_back(std::move(m));
    if (obj % 2 == 1) pairing.emplace_back(obj - 1, obj);
  }
  ens.pairing = std::move(pairing);
  return ens;
}

SweepTable run_sweep(const ScenarioModel& model, Exec exec) {
  const ScenarioConfig& cfg = model.config;
  SweepTable table;
  // Material-only statistics scale as (N0 jd0, N0^2 sigma), which leaves every
  // divergence and I_S unchanged; evaluate once at unit budget per (bins, mode)
  // so rounding cannot make the rows drift with N0.
  std::map<std::pair<int, CorrelationMode>, BoundsResult> material_only;
  for (double n0 : cfg.n0) {
    for (int b : cfg.bins) {
      for (ModelVariant v : cfg.variants) {
        std::optional<BoundsResult> shot_result;
        for (CorrelationMode mode : cfg.corr_modes) {
          SweepRow row{n0, b, v, mode, {}};
          try {
            // Shot noise alone does not see the material covariance.
            if (v == ModelVariant::shot_only && shot_result) {
              row.bounds = *shot_result;
            } else if (v == ModelVariant::material_only) {
              auto key = std::make_pair(b, mode);
              auto it = material_only.find(key);
              if (it == material_only.end())
                it = material_only
                         .emplace(key, pe_bounds(PreparedEnsemble(build_ensemble(model, b, 1.0, v, mode), exec)))
                         .first;
              row.bounds = it->second;
            } else {
              row.bounds = pe_bounds(PreparedEnsemble(build_ensemble(model, b, n0, v, mode), exec));
              if (v == ModelVariant::shot_only) shot_result = row.bounds;
            }
          } catch (const Error& e) {
            throw Error(fmt::format("sweep point n0={} bins={} variant={} corr_mode={}: {}", n0, b, to_string(v),
                                    to_string(mode), e.what()));
          }
          table.rows.push_back(row);
        }
      }
    }
  }
  return table;
}

SweepTable run_sweep(const ScenarioConfig& cfg, const std::vector<MaterialStats>& library,
                     const SourceSpectrum& spectrum, Exec exec) {
  return run_sweep(prepare_scenario(cfg, library, spectrum, exec), exec);
}

std::string sweep_csv(const SweepTable& table) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& r : table.rows) {
    double hc = r.bounds.class_entropy_bits();
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.n0, r.n_bins, to_string(r.variant), to_string(r.corr_mode),
                       r.bounds.is_lower_bits(), r.bounds.is_upper_bits(), r.bounds.pe_lower, r.bounds.pe_upper,
                       hc - r.bounds.is_lower_bits(), hc - r.bounds.is_upper_bits());
  }
  return out;
}

std::vector<std::vector<double>> volume_ratios(const ScenarioModel& model, int n_bins) {
  const BinningModel& bm = model.binning(n_bins);
  std::vector<std::vector<double>> out;
  out.reserve(bm.objects.size());
  for (const auto& obj : bm.objects) {
    std::vector<double> row;
    row.reserve(obj.size());
    for (const auto& up : obj) row.push_back(ellipsoid_volume_ratio(up.sigma_correlated, up.sigma_uncorrelated));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace xtsi
