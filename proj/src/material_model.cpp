#include "xtsi/material_model.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "csv_util.hpp"
#include "xtsi/error.hpp"

namespace xtsi {
namespace {

double truncated_normal(double mean, double sd, double lo, double hi, Engine& rng) {
  if (sd == 0.0) return mean;
  std::normal_distribution<double> normal(mean, sd);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    double x = normal(rng);
    if (x >= lo && x <= hi && x != 0.0) return x;
  }
  return mean;
}

}  // namespace

CompositionSample sample_composition(const MaterialDefinition& def, Engine& rng) {
  CompositionSample s;
  s.density = truncated_normal(def.density_mean, def.density_std, 0.0, HUGE_VAL, rng);
  s.weights.reserve(def.components.size());
  bool varies = false;
  double sum = 0.0;
  for (const auto& c : def.components) {
    double w = truncated_normal(c.w_mean, c.w_std, 0.0, 1.0, rng);
    varies = varies || c.w_std > 0.0;
    s.weights.push_back(w);
    sum += w;
  }
  // With no weight variability the means are returned untouched.
  if (varies && sum > 0.0)
    for (double& w : s.weights) w /= sum;
  return s;
}

CompositionSample sample_composition(const MaterialDefinition& def, std::uint64_t seed) {
  Engine rng(seed);
  return sample_composition(def, rng);
}

Vector attenuation_of_realization(double density, const std::vector<double>& weights,
                                  const std::vector<const ElementTable*>& tables, const EnergyGrid& grid) {
  if (weights.size() != tables.size())
    throw AlignmentError(fmt::format("{} weight fractions for {} element tables", weights.size(), tables.size()));
  Vector mass = Vector::Zero(grid.size());
  for (std::size_t c = 0; c < tables.size(); ++c) {
    require_same_grid(tables[c]->grid, grid, "element " + tables[c]->symbol);
    mass += weights[c] * tables[c]->mass_attenuation;
  }
  return density * mass;
}

std::vector<const ElementTable*> component_tables(const MaterialDefinition& def, const ElementSet& elements) {
  std::vector<const ElementTable*> out;
  for (const auto& c : def.components) {
    auto it = elements.find(c.element);
    if (it == elements.end())
      throw AlignmentError("material '" + def.name + "' references unknown element '" + c.element + "'");
    out.push_back(&it->second);
  }
  return out;
}

MaterialStats estimate_material_stats(const MaterialDefinition& def, const ElementSet& elements,
                                      const EnergyGrid& grid, int n_realizations, std::uint64_t seed, Exec exec) {
  if (n_realizations < 2) throw ParameterError("n_realizations must be at least 2");
  validate(def);
  auto tables = component_tables(def, elements);
  const int r = grid.size();
  Matrix profiles(r, n_realizations);

  auto realize = [&](int k) {
    Engine rng = make_engine(seed, {static_cast<std::uint64_t>(k)});
    CompositionSample s = sample_composition(def, rng);
    profiles.col(k) = attenuation_of_realization(s.density, s.weights, tables, grid);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_realizations; ++k) realize(k);
  } else {
    for (int k = 0; k < n_realizations; ++k) realize(k);
  }

  // Shifted by the first realization so a constant material gives exact zeros.
  Vector origin = profiles.col(0);
  Matrix centered = profiles.colwise() - origin;
  Vector offset = centered.rowwise().mean();
  centered.colwise() -= offset;
  Vector mean = origin + offset;
  Matrix cov = repair_psd(centered * centered.transpose() / static_cast<double>(n_realizations - 1));
  return MaterialStats{def.name, def.class_label, grid, std::move(mean), std::move(cov), n_realizations};
}

std::uint64_t material_seed(std::uint64_t base_seed, const std::string& name) {
  return derive_seed(base_seed, {fnv1a(name.data(), name.size())});
}

void save_material_stats(const MaterialStats& stats, const std::string& stem) {
  std::string header = fmt::format("# material={} class={} n_realizations={}\n", stats.name,
                                   to_string(stats.class_label), stats.n_realizations);
  std::string mu = header + "energy_keV,mu0\n";
  for (int i = 0; i < stats.grid.size(); ++i) mu += fmt::format("{},{}\n", stats.grid[i], stats.mu0[i]);
  csv::write_file(stem + "_mu0.csv", mu);
  csv::write_file(stem + "_cov.csv", header + csv::matrix_rows(stats.sigma_mu));
}

MaterialStats load_material_stats(const std::string& stem) {
  const std::string mu_path = stem + "_mu0.csv";
  const std::string cov_path = stem + "_cov.csv";
  std::string mu_text = csv::read_file(mu_path);

  std::string name;
  ClassLabel label = ClassLabel::non_threat;
  int n_real = 0;
  {
    auto first = mu_text.substr(0, mu_text.find('\n'));
    std::istringstream words(first.size() > 1 ? first.substr(1) : std::string());
    std::string w;
    while (words >> w) {
      auto eq = w.find('=');
      if (eq == std::string::npos) continue;
      std::string key = w.substr(0, eq), val = w.substr(eq + 1);
      if (key == "material") name = val;
      else if (key == "class") label = parse_class_label(val);
      else if (key == "n_realizations") n_real = std::stoi(val);
    }
  }
  std::vector<double> e, mu;
  for (const auto& line : csv::data_lines(mu_text)) {
    if (line.text == "energy_keV,mu0") continue;
    auto cells = csv::split(line.text);
    if (cells.size() != 2) throw ParseError(mu_path, line.number, "expected energy_keV,mu0");
    e.push_back(csv::to_double(cells[0], mu_path, line.number));
    mu.push_back(csv::to_double(cells[1], mu_path, line.number));
  }
  MaterialStats out{name, label, EnergyGrid(e), Eigen::Map<Vector>(mu.data(), static_cast<Eigen::Index>(mu.size())),
                    Matrix(), n_real};

  const int r = out.grid.size();
  out.sigma_mu = Matrix(r, r);
  std::string cov_text = csv::read_file(cov_path);
  int row = 0;
  for (const auto& line : csv::data_lines(cov_text)) {
    auto cells = csv::split(line.text);
    if (row >= r || static_cast<int>(cells.size()) != r)
      throw ParseError(cov_path, line.number, fmt::format("expected a {}x{} matrix", r, r));
    for (int j = 0; j < r; ++j) out.sigma_mu(row, j) = csv::to_double(cells[static_cast<std::size_t>(j)], cov_path, line.number);
    ++row;
  }
  if (row != r) throw ParseError(cov_path, 0, fmt::format("expected {} rows, found {}", r, row));
  return out;
}

}  // namespace xtsi
