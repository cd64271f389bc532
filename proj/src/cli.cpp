#include "xtsi/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "xtsi/distribution_io.hpp"
#include "xtsi/error.hpp"
#include "xtsi/mc_validate.hpp"
#include "xtsi/rng.hpp"

namespace fs = std::filesystem;

namespace xtsi::cli {
namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  if (!f) throw Error("write failed: " + path.string());
}

std::string safe_name(const std::string& name) {
  std::string s;
  for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return s;
}

struct Options {
  std::string config_path;
  std::string library_path;
  std::string spectrum_path;
  std::string elements_dir;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool emit_plots = false;
  std::vector<std::string> variants;
  std::vector<int> bins;
  std::vector<std::string> corr_modes;
  std::vector<double> n0;
  bool dump_distributions = false;
  std::string ensemble_path;
  std::size_t samples = 1000000;
};

ScenarioConfig resolve_config(const Options& o) {
  ScenarioConfig cfg = o.config_path.empty() ? ScenarioConfig{} : load_scenario_config(o.config_path);
  if (!o.library_path.empty()) cfg.library_path = o.library_path;
  if (!o.spectrum_path.empty()) cfg.spectrum_path = o.spectrum_path;
  if (!o.elements_dir.empty()) cfg.elements_dir = o.elements_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.variants.empty()) {
    cfg.variants.clear();
    for (const auto& v : o.variants) cfg.variants.push_back(parse_variant(v));
  }
  if (!o.bins.empty()) cfg.bins = o.bins;
  if (!o.corr_modes.empty()) {
    cfg.corr_modes.clear();
    for (const auto& m : o.corr_modes) cfg.corr_modes.push_back(parse_corr_mode(m));
  }
  if (!o.n0.empty()) cfg.n0 = o.n0;
  validate(cfg);
  auto require = [](const std::string& path, const char* what, const char* flag) {
    if (path.empty()) throw ConfigurationError(fmt::format("no {} given (use {} or the config file)", what, flag));
    if (!fs::exists(path)) throw ConfigurationError(fmt::format("{} not found: {}", what, path));
  };
  require(cfg.library_path, "material library", "--library");
  require(cfg.spectrum_path, "spectrum", "--spectrum");
  require(cfg.elements_dir, "element directory", "--elements");
  return cfg;
}

fs::path output_dir(const Options& o) {
  fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string cache_dir(const Options& o) {
  if (const char* env = std::getenv("XTSI_CACHE_DIR"); env && *env) return env;
  return (output_dir(o) / "cache").string();
}

struct Inputs {
  ScenarioConfig cfg;
  SourceSpectrum spectrum;
  CacheOutcome stats;
};

// Cache activity goes to `log`: the report for `stats`, a diagnostic elsewhere.
Inputs load_inputs(const Options& o, std::ostream& log) {
  ScenarioConfig cfg = resolve_config(o);
  EnergyGrid grid = cfg.grid();
  auto library = load_material_library(cfg.library_path);
  ElementSet elements = load_element_directory(cfg.elements_dir, grid);
  CacheOutcome stats = cached_material_stats(library, elements, grid, cfg.n_realizations, cfg.seed, cache_dir(o));
  for (const auto& n : stats.computed) log << "stats computed: " << n << '\n';
  for (const auto& n : stats.reused) log << "stats cached:   " << n << '\n';
  return {cfg, load_spectrum(cfg.spectrum_path, grid), std::move(stats)};
}

int cmd_stats(const Options& o, std::ostream& out) {
  Inputs in = load_inputs(o, out);
  out << fmt::format("{} materials, {} recomputed, cache {}\n", in.stats.stats.size(), in.stats.computed.size(),
                     cache_dir(o));
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(o, err);
  fs::path dir = output_dir(o);
  ScenarioModel model = prepare_scenario(in.cfg, in.stats.stats, in.spectrum);
  SweepTable table = run_sweep(model);
  write_text(dir / "sweep.csv", sweep_csv(table));
  out << fmt::format("wrote {} rows to {}\n", table.rows.size(), (dir / "sweep.csv").string());
  if (o.emit_plots) {
    write_text(dir / "sweep_pe.gp", plot_script(in.cfg, "sweep.csv"));
    out << "wrote " << (dir / "sweep_pe.gp").string() << '\n';
  }
  if (o.dump_distributions) {
    fs::path dump = dir / "distributions";
    fs::create_directories(dump);
    for (double n0 : in.cfg.n0)
      for (int b : in.cfg.bins)
        for (ModelVariant v : in.cfg.variants)
          for (CorrelationMode m : in.cfg.corr_modes)
            write_ensemble_csv(
                (dump / fmt::format("n0_{}_bins_{}_{}_{}.csv", text::format_exact(n0), b, to_string(v), to_string(m)))
                    .string(),
                build_ensemble(model, b, n0, v, m));
    out << "wrote ensemble dumps to " << dump.string() << '\n';
  }
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
  std::uint64_t seed = o.seed.value_or(ScenarioConfig{}.seed);
  EnsembleSpec ens = o.ensemble_path.empty() ? canonical_fixture() : read_ensemble_csv(o.ensemble_path);
  OracleReport report = mc_validate(ens, o.samples, seed);
  std::string text = report.to_text();
  out << text;
  if (!o.out_dir.empty()) write_text(output_dir(o) / "oracle_report.txt", text);
  return report.all_passed() ? 0 : 1;
}

int cmd_bin_edges(const Options& o, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(o, err);
  ScenarioModel model = prepare_scenario(in.cfg, in.stats.stats, in.spectrum);
  std::string csv = "n_bins,edges_keV\n";
  for (const auto& b : model.binnings) {
    csv += std::to_string(b.n_bins);
    for (double e : b.detector.bin_edges) csv += "," + text::format_exact(e);
    csv += '\n';
  }
  out << csv;
  if (!o.out_dir.empty()) write_text(output_dir(o) / "bin_edges.csv", csv);
  return 0;
}

int cmd_volume_ratio(const Options& o, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(o, err);
  ScenarioModel model = prepare_scenario(in.cfg, in.stats.stats, in.spectrum);
  std::string csv = "n_bins,object,pixel,r,log10_r\n";
  for (int b : in.cfg.bins) {
    auto ratios = volume_ratios(model, b);
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0, at_least_one = 0;
    for (std::size_t obj = 0; obj < ratios.size(); ++obj) {
      for (std::size_t pix = 0; pix < ratios[obj].size(); ++pix) {
        double r = ratios[obj][pix];
        double lr = std::log10(r);
        csv += fmt::format("{},{},{},{},{}\n", b, obj, pix, r, lr);
        sum += lr;
        sum2 += lr * lr;
        ++count;
        if (r >= 1.0) ++at_least_one;
      }
    }
    double mean = sum / count;
    double sd = count > 1 ? std::sqrt(std::max(0.0, (sum2 - count * mean * mean) / (count - 1))) : 0.0;
    out << fmt::format("bins={} log10(r) mean={:.3f} sd={:.3f} r>=1 in {}/{}\n", b, mean, sd, at_least_one, count);
  }
  fs::path dir = output_dir(o);
  write_text(dir / "volume_ratio.csv", csv);
  out << "wrote " << (dir / "volume_ratio.csv").string() << '\n';
  return 0;
}

}  // namespace

std::uint64_t stats_cache_key(const MaterialDefinition& def, const ElementSet& elements, const EnergyGrid& grid,
                              int n_realizations, std::uint64_t seed) {
  std::string blob = serialize_material_library({def});
  for (const ElementTable* t : component_tables(def, elements)) blob += serialize_element_table(*t);
  for (double e : grid.energies()) blob += text::format_exact(e) + ",";
  blob += fmt::format("|{}|{}", n_realizations, seed);
  return fnv1a(blob.data(), blob.size());
}

CacheOutcome cached_material_stats(const std::vector<MaterialDefinition>& library, const ElementSet& elements,
                                   const EnergyGrid& grid, int n_realizations, std::uint64_t seed,
                                   const std::string& dir) {
  fs::create_directories(dir);
  CacheOutcome result;
  for (const auto& def : library) {
    std::uint64_t key = stats_cache_key(def, elements, grid, n_realizations, seed);
    std::string stem = (fs::path(dir) / fmt::format("{}-{:016x}", safe_name(def.name), key)).string();
    if (fs::exists(stem + "_mu0.csv") && fs::exists(stem + "_cov.csv")) {
      MaterialStats s = load_material_stats(stem);
      if (s.grid == grid && s.name == def.name) {
        result.stats.push_back(std::move(s));
        result.reused.push_back(def.name);
        continue;
      }
    }
    MaterialStats s =
        estimate_material_stats(def, elements, grid, n_realizations, material_seed(seed, def.name), Exec::parallel);
    save_material_stats(s, stem);
    result.stats.push_back(std::move(s));
    result.computed.push_back(def.name);
  }
  return result;
}

std::string plot_script(const ScenarioConfig& cfg, const std::string& csv_name) {
  std::string s;
  s += "# gnuplot script; run from the directory holding " + csv_name + "\n";
  s += "set datafile separator ','\n";
  s += "set logscale x\nset logscale y\nset key outside right\n";
  s += "set xlabel 'N0 (photons per pixel)'\nset ylabel 'P_e bound'\n";
  s += "set terminal pngcairo size 1200,800\n";
  for (CorrelationMode mode : cfg.corr_modes) {
    s += fmt::format("set output 'sweep_pe_{}.png'\n", to_string(mode));
    s += "plot \\\n";
    bool first = true;
    for (ModelVariant v : cfg.variants) {
      for (int b : cfg.bins) {
        for (auto [col, which] : {std::pair{7, "lower"}, std::pair{8, "upper"}}) {
          if (!first) s += ", \\\n";
          first = false;
          s += fmt::format(
              "  '{}' skip 1 using 1:((strcol(3) eq '{}' && $2 == {} && strcol(4) eq '{}') ? ${} : 1/0) "
              "with linespoints title '{} {} bins {}'",
              csv_name, to_string(v), b, to_string(mode), col, to_string(v), b, which);
        }
      }
    }
    s += "\n";
  }
  return s;
}

EnsembleSpec canonical_fixture() {
  auto member = [](double jd0, double var, double weight, ClassLabel label) {
    EnsembleMember m;
    Vector mean = Vector::Constant(1, jd0);
    Matrix mat = Matrix::Constant(1, 1, var);
    m.distribution.pixels.push_back(combine_shot_noise(mean, mat));
    m.weight = weight;
    m.label = label;
    return m;
  };
  EnsembleSpec ens;
  ens.members.push_back(member(1000.0, 400.0, 0.5, ClassLabel::threat));
  ens.members.push_back(member(1080.0, 300.0, 0.5, ClassLabel::non_threat));
  ens.pairing = std::vector<std::pair<int, int>>{{0, 1}};
  return ens;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Task-specific information bounds for spectral X-ray measurements", "xtsi"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd, bool scenario) {
    if (scenario) {
      cmd->add_option("--config", o.config_path, "Scenario config (structured text)")->check(CLI::ExistingFile);
      cmd->add_option("--library", o.library_path, "Material library; overrides the config");
      cmd->add_option("--spectrum", o.spectrum_path, "Source spectrum CSV; overrides the config");
      cmd->add_option("--elements", o.elements_dir, "Element table directory; overrides the config");
      cmd->add_option("--variant", o.variants, "Model variants: shot_only, material_only, combined")
          ->delimiter(',');
      cmd->add_option("--bins", o.bins, "Bin counts to sweep, e.g. 1,2,3")->delimiter(',');
      cmd->add_option("--corr-mode", o.corr_modes, "Correlation modes: correlated, uncorrelated")->delimiter(',');
      cmd->add_option("--n0", o.n0, "Photon budgets to sweep")->delimiter(',');
    }
    cmd->add_option("--out", o.out_dir, "Output directory (created if absent)");
    cmd->add_option("--seed", o.seed, "Base RNG seed");
    cmd->add_option("--threads", o.threads, "Worker thread cap (results do not depend on it)")
        ->check(CLI::PositiveNumber);
  };

  auto* stats = app.add_subcommand("stats", "Estimate and cache material attenuation statistics");
  add_common(stats, true);
  auto* sweep = app.add_subcommand("sweep", "Run the photon-budget sweep and write sweep.csv");
  add_common(sweep, true);
  sweep->add_flag("--emit-plots", o.emit_plots, "Also write a gnuplot script for the sweep");
  sweep->add_flag("--dump-distributions", o.dump_distributions,
                  "Write every sweep point's ensemble as CSV under <out>/distributions");
  auto* val = app.add_subcommand("validate", "Monte Carlo check of an ensemble against its analytic bounds");
  add_common(val, false);
  val->add_option("--ensemble", o.ensemble_path, "Ensemble CSV (default: built-in two-object fixture)")
      ->check(CLI::ExistingFile);
  val->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  auto* edges = app.add_subcommand("bin-edges", "Print count-balanced bin edges");
  add_common(edges, true);
  auto* volume = app.add_subcommand("volume-ratio", "Correlated vs uncorrelated noise-ellipsoid volume ratios");
  add_common(volume, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (o.threads > 0) omp_set_num_threads(o.threads);

  try {
    if (*stats) return cmd_stats(o, out);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*val) return cmd_validate(o, out);
    if (*edges) return cmd_bin_edges(o, out, err);
    if (*volume) return cmd_volume_ratio(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace xtsi::cli
