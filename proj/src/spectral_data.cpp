#include "xtsi/spectral_data.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "xtsi/error.hpp"

namespace xtsi {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool to_double(std::string_view text, double& out) {
  std::string s(trim(text));
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

struct Row {
  std::size_t line;
  double x;
  double y;
};

// Two-column numeric CSV. `on_comment` sees every '#' line (without the '#').
template <typename OnComment>
std::vector<Row> parse_two_columns(std::string_view content, const std::string& source,
                                   std::string_view header, OnComment&& on_comment) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    std::string_view raw = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? content.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      on_comment(line.substr(1), line_no);
      continue;
    }
    if (rows.empty() && line == header) continue;
    auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(source, line_no, "expected two comma-separated columns");
    Row r{line_no, 0.0, 0.0};
    if (!to_double(line.substr(0, comma), r.x) || !to_double(line.substr(comma + 1), r.y))
      throw ParseError(source, line_no, "non-numeric value in '" + std::string(line) + "'");
    if (!rows.empty() && r.x < rows.back().x) throw ParseError(source, line_no, "energies must be non-decreasing");
    rows.push_back(r);
  }
  if (rows.size() < 2) throw ParseError(source, line_no, "need at least two data rows");
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// EnergyGrid

EnergyGrid::EnergyGrid(std::vector<double> energies_kev) : e_(std::move(energies_kev)) {
  if (e_.size() < 2) throw ValidationError("energy grid needs at least two samples");
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (!(e_[i] > 0.0) || !std::isfinite(e_[i])) throw ValidationError("energy grid values must be positive");
    if (i > 0 && !(e_[i] > e_[i - 1])) throw ValidationError("energy grid must be strictly increasing");
  }
}

EnergyGrid EnergyGrid::uniform(double lo_kev, double hi_kev, int count) {
  if (count < 2) throw ValidationError("energy grid needs at least two samples");
  std::vector<double> e(static_cast<std::size_t>(count));
  double step = (hi_kev - lo_kev) / (count - 1);
  for (int i = 0; i < count; ++i) e[static_cast<std::size_t>(i)] = lo_kev + step * i;
  e.back() = hi_kev;
  return EnergyGrid(std::move(e));
}

Vector EnergyGrid::trapezoid_weights() const {
  Vector w = Vector::Zero(size());
  for (int i = 0; i + 1 < size(); ++i) {
    double h = (*this)[i + 1] - (*this)[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

void require_same_grid(const EnergyGrid& a, const EnergyGrid& b, std::string_view what) {
  if (!(a == b)) throw AlignmentError(std::string(what) + ": energy grids differ");
}

// ---------------------------------------------------------------------------
// Spectra

SourceSpectrum make_spectrum(const EnergyGrid& grid, Vector intensity) {
  if (intensity.size() != grid.size()) throw AlignmentError("spectrum length does not match grid");
  intensity = intensity.cwiseMax(0.0);
  double total = grid.integrate(intensity);
  if (!(total > 0.0)) throw DegenerateError("degenerate spectrum: intensity is zero everywhere on the grid");
  return SourceSpectrum{grid, intensity / total};
}

SourceSpectrum kramers_spectrum(const EnergyGrid& grid, double kvp) {
  Vector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = std::max(0.0, (kvp - grid[i]) / grid[i]);
  return make_spectrum(grid, std::move(v));
}

SourceSpectrum parse_spectrum(std::string_view content, const std::string& source, const EnergyGrid& grid) {
  auto rows = parse_two_columns(content, source, "energy_keV,intensity", [](std::string_view, std::size_t) {});
  Vector v = Vector::Zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    double x = grid[i];
    if (x < rows.front().x || x > rows.back().x) continue;
    auto it = std::upper_bound(rows.begin(), rows.end(), x, [](double a, const Row& r) { return a < r.x; });
    std::size_t k = static_cast<std::size_t>(it - rows.begin()) - 1;
    if (rows[k].x == x || k + 1 == rows.size()) {
      v[i] = rows[k].y;
      continue;
    }
    const Row& a = rows[k];
    const Row& b = rows[k + 1];
    v[i] = a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
  }
  try {
    return make_spectrum(grid, std::move(v));
  } catch (const DegenerateError& e) {
    throw DegenerateError(source + ": " + e.what());
  }
}

SourceSpectrum load_spectrum(const std::string& path, const EnergyGrid& grid) {
  return parse_spectrum(read_file(path), path, grid);
}

std::string serialize_spectrum(const SourceSpectrum& spectrum) {
  std::string out = "# normalized source spectrum\nenergy_keV,intensity\n";
  for (int i = 0; i < spectrum.grid.size(); ++i)
    out += fmt::format("{},{}\n", spectrum.grid[i], spectrum.s[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Element tables

RawElementTable parse_element_csv(std::string_view content, const std::string& source) {
  RawElementTable raw;
  bool have_symbol = false;
  bool have_density = false;
  auto on_comment = [&](std::string_view c, std::size_t line) {
    std::istringstream words{std::string(c)};
    std::string w;
    while (words >> w) {
      auto eq = w.find('=');
      if (eq == std::string::npos) continue;
      std::string key = w.substr(0, eq);
      std::string val = w.substr(eq + 1);
      if (key == "symbol") {
        raw.symbol = val;
        have_symbol = !val.empty();
      } else if (key == "density_g_cm3") {
        if (!to_double(val, raw.density)) throw ParseError(source, line, "bad density '" + val + "'");
        have_density = true;
      }
    }
  };
  auto rows = parse_two_columns(content, source, "energy_keV,mu_over_rho_cm2_g", on_comment);
  if (!have_symbol || !have_density)
    throw ParseError(source, 1, "missing header '# symbol=<S> density_g_cm3=<rho>'");
  if (!(raw.density > 0.0)) throw ValidationError(source + ": element density must be positive");
  for (const auto& r : rows) {
    if (!(r.x > 0.0)) throw ValidationError(fmt::format("{}:{}: energy must be positive", source, r.line));
    if (!(r.y > 0.0))
      throw ValidationError(fmt::format("{}:{}: mass attenuation must be positive, got {}", source, r.line, r.y));
    raw.energies.push_back(r.x);
    raw.mass_attenuation.push_back(r.y);
  }
  return raw;
}

ElementTable resample(const RawElementTable& raw, const EnergyGrid& grid) {
  const auto& e = raw.energies;
  const auto& v = raw.mass_attenuation;
  if (grid.front() < e.front() || grid.back() > e.back())
    throw CoverageError(fmt::format("element {}: table covers [{}, {}] keV but grid spans [{}, {}] keV", raw.symbol,
                                    e.front(), e.back(), grid.front(), grid.back()));
  Vector out(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    double x = grid[i];
    auto it = std::upper_bound(e.begin(), e.end(), x);
    std::size_t k = static_cast<std::size_t>(it - e.begin()) - 1;
    if (e[k] == x || k + 1 == e.size()) {
      out[i] = v[k];
      continue;
    }
    double t = (std::log(x) - std::log(e[k])) / (std::log(e[k + 1]) - std::log(e[k]));
    out[i] = std::exp(std::log(v[k]) + t * (std::log(v[k + 1]) - std::log(v[k])));
  }
  return ElementTable{raw.symbol, grid, std::move(out), raw.density};
}

ElementTable load_element_table(const std::string& path, const EnergyGrid& grid) {
  return resample(parse_element_csv(read_file(path), path), grid);
}

std::string serialize_element_table(const ElementTable& table) {
  std::string out = fmt::format("# symbol={} density_g_cm3={}\nenergy_keV,mu_over_rho_cm2_g\n", table.symbol,
                                table.density);
  for (int i = 0; i < table.grid.size(); ++i)
    out += fmt::format("{},{}\n", table.grid[i], table.mass_attenuation[i]);
  return out;
}

ElementSet load_element_directory(const std::string& dir, const EnergyGrid& grid) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("element directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  ElementSet set;
  for (const auto& f : files) {
    ElementTable t = load_element_table(f.string(), grid);
    std::string sym = t.symbol;
    if (!set.emplace(sym, std::move(t)).second) throw ValidationError("duplicate element symbol " + sym + " in " + dir);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Material definitions

std::string_view to_string(ClassLabel c) { return c == ClassLabel::threat ? "threat" : "non_threat"; }

ClassLabel parse_class_label(std::string_view s) {
  if (s == "threat") return ClassLabel::threat;
  if (s == "non_threat") return ClassLabel::non_threat;
  throw ValidationError("unknown class label '" + std::string(s) + "' (expected threat or non_threat)");
}

void validate(const MaterialDefinition& def) {
  auto fail = [&](const std::string& why) { throw ValidationError("material '" + def.name + "': " + why); };
  if (def.name.empty()) throw ValidationError("material without a name");
  if (!(def.density_mean > 0.0)) fail("density_mean must be positive");
  if (!(def.density_std >= 0.0)) fail("density_std must be non-negative");
  if (def.components.empty()) fail("no components");
  double sum = 0.0;
  for (const auto& c : def.components) {
    if (c.element.empty()) fail("component without an element");
    if (!(c.w_mean >= 0.0 && c.w_mean <= 1.0)) fail("weight fraction of " + c.element + " outside [0, 1]");
    if (!(c.w_std >= 0.0)) fail("weight-fraction std of " + c.element + " must be non-negative");
    sum += c.w_mean;
  }
  if (std::abs(sum - 1.0) > 1e-6) fail(fmt::format("weight fractions sum to {}, expected 1", sum));
}

std::vector<MaterialDefinition> parse_material_library(const text::Block& root) {
  std::vector<MaterialDefinition> defs;
  std::set<std::string, std::less<>> names;
  for (const text::Block* b : root.blocks("material")) {
    MaterialDefinition d;
    d.name = b->str("name");
    d.class_label = parse_class_label(b->str("class"));
    d.density_mean = b->number("density_mean");
    d.density_std = b->number_or("density_std").value_or(0.0);
    for (const text::Block* c : b->blocks("component"))
      d.components.push_back(Component{c->str("element"), c->number("w_mean"), c->number_or("w_std").value_or(0.0)});
    validate(d);
    if (!names.insert(d.name).second) throw ValidationError("duplicate material name '" + d.name + "'");
    defs.push_back(std::move(d));
  }
  return defs;
}

std::vector<MaterialDefinition> load_material_library(const std::string& path) {
  return parse_material_library(text::parse_file(path));
}

text::Block to_block(const MaterialDefinition& def) {
  text::Block b;
  b.type = "material";
  b.entries = {{"name", def.name, 0},
               {"class", std::string(to_string(def.class_label)), 0},
               {"density_mean", text::format_exact(def.density_mean), 0},
               {"density_std", text::format_exact(def.density_std), 0}};
  for (const auto& c : def.components) {
    text::Block cb;
    cb.type = "component";
    cb.entries = {{"element", c.element, 0},
                  {"w_mean", text::format_exact(c.w_mean), 0},
                  {"w_std", text::format_exact(c.w_std), 0}};
    b.children.push_back(std::move(cb));
  }
  return b;
}

std::string serialize_material_library(const std::vector<MaterialDefinition>& defs) {
  text::Block root;
  for (const auto& d : defs) root.children.push_back(to_block(d));
  return text::serialize(root);
}

}  // namespace xtsi
