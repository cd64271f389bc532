#include "xtsi/distribution_io.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "csv_util.hpp"
#include "xtsi/error.hpp"

namespace xtsi {
namespace {

std::string values_of(const Matrix& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += fmt::format(",{}", m(i, j));
  return s;
}

struct PixelRows {
  std::optional<Vector> jd0;
  std::optional<Vector> sigma_material;
  std::optional<Vector> sigma_total;
  std::optional<std::pair<bool, bool>> flags;
  std::size_t line = 0;
};

struct ObjectRows {
  ClassLabel label = ClassLabel::non_threat;
  double weight = 0.0;
  int pair = -1;
  std::size_t line = 0;
  std::map<int, PixelRows> pixels;
};

Matrix square(const Vector& v, int m, const std::string& source, std::size_t line, const char* field) {
  if (v.size() != static_cast<Eigen::Index>(m) * m)
    throw ParseError(source, line, fmt::format("{} has {} values, expected {}", field, v.size(), m * m));
  Matrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = v[i * m + j];
  return out;
}

}  // namespace

std::string ensemble_csv(const EnsembleSpec& ens) {
  std::vector<int> pair_of(ens.members.size(), -1);
  if (ens.pairing) {
    for (std::size_t p = 0; p < ens.pairing->size(); ++p) {
      pair_of[static_cast<std::size_t>((*ens.pairing)[p].first)] = static_cast<int>(p);
      pair_of[static_cast<std::size_t>((*ens.pairing)[p].second)] = static_cast<int>(p);
    }
  }
  std::string out = std::string(kEnsembleHeader) + '\n';
  for (std::size_t k = 0; k < ens.members.size(); ++k) {
    const auto& m = ens.members[k];
    std::string prefix = fmt::format("{},{},{},{}", k, to_string(m.label), m.weight, pair_of[k]);
    for (std::size_t n = 0; n < m.distribution.pixels.size(); ++n) {
      const auto& p = m.distribution.pixels[n];
      out += fmt::format("{},{},jd0{}\n", prefix, n, values_of(p.jd0));
      out += fmt::format("{},{},sigma_material{}\n", prefix, n, values_of(p.sigma_material));
      out += fmt::format("{},{},sigma_total{}\n", prefix, n, values_of(p.sigma_total));
      out += fmt::format("{},{},flags,{},{}\n", prefix, n, int(p.low_count), int(p.nonlinear));
    }
  }
  return out;
}

void write_ensemble_csv(const std::string& path, const EnsembleSpec& ens) { csv::write_file(path, ensemble_csv(ens)); }

EnsembleSpec parse_ensemble_csv(std::string_view content, const std::string& source) {
  auto lines = csv::data_lines(content);
  if (lines.empty() || lines.front().text != kEnsembleHeader)
    throw ParseError(source, lines.empty() ? 1 : lines.front().number,
                     std::string("expected header '") + kEnsembleHeader + "'");
  std::map<int, ObjectRows> objects;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line, text] = lines[i];
    auto cells = csv::split(text);
    if (cells.size() < 7) throw ParseError(source, line, "expected at least 7 columns");
    auto as_int = [&](std::string_view s) {
      double v = csv::to_double(s, source, line);
      if (v != std::floor(v)) throw ParseError(source, line, "expected an integer, got '" + std::string(s) + "'");
      return static_cast<int>(v);
    };
    int obj = as_int(cells[0]);
    if (obj < 0) throw ParseError(source, line, "negative object index");
    ClassLabel label;
    try {
      label = parse_class_label(cells[1]);
    } catch (const Error& e) {
      throw ParseError(source, line, e.what());
    }
    double weight = csv::to_double(cells[2], source, line);
    int pair = as_int(cells[3]);
    int pix = as_int(cells[4]);
    if (pix < 0) throw ParseError(source, line, "negative pixel index");

    auto [it, inserted] = objects.try_emplace(obj);
    ObjectRows& o = it->second;
    if (inserted) {
      o.label = label;
      o.weight = weight;
      o.pair = pair;
      o.line = line;
    } else if (o.label != label || o.weight != weight || o.pair != pair) {
      throw ParseError(source, line, fmt::format("object {} changes class, weight or pair between rows", obj));
    }
    PixelRows& p = o.pixels[pix];
    if (p.line == 0) p.line = line;

    Vector values(static_cast<Eigen::Index>(cells.size() - 6));
    for (std::size_t c = 6; c < cells.size(); ++c)
      values[static_cast<Eigen::Index>(c - 6)] = csv::to_double(cells[c], source, line);
    auto store = [&](std::optional<Vector>& slot, const char* field) {
      if (slot) throw ParseError(source, line, fmt::format("duplicate {} for object {} pixel {}", field, obj, pix));
      slot = values;
    };
    std::string_view field = cells[5];
    if (field == "jd0") {
      store(p.jd0, "jd0");
    } else if (field == "sigma_material") {
      store(p.sigma_material, "sigma_material");
    } else if (field == "sigma_total") {
      store(p.sigma_total, "sigma_total");
    } else if (field == "flags") {
      if (p.flags) throw ParseError(source, line, "duplicate flags");
      if (values.size() != 2) throw ParseError(source, line, "flags needs two values");
      p.flags = std::pair{values[0] != 0.0, values[1] != 0.0};
    } else {
      throw ParseError(source, line, "unknown field '" + std::string(field) + "'");
    }
  }

  EnsembleSpec ens;
  std::map<int, std::pair<int, int>> pairs;
  int expected = 0;
  for (auto& [index, o] : objects) {
    if (index != expected++) throw ParseError(source, o.line, fmt::format("object indices must be 0..K-1; missing {}", expected - 1));
    EnsembleMember m;
    m.label = o.label;
    m.weight = o.weight;
    int expected_pixel = 0;
    for (auto& [n, p] : o.pixels) {
      if (n != expected_pixel++) throw ParseError(source, p.line, fmt::format("object {} is missing pixel {}", index, expected_pixel - 1));
      if (!p.jd0 || !p.sigma_material || !p.sigma_total)
        throw ParseError(source, p.line, fmt::format("object {} pixel {} lacks jd0, sigma_material or sigma_total", index, n));
      int bins = static_cast<int>(p.jd0->size());
      PixelDistribution px;
      px.jd0 = *p.jd0;
      px.sigma_material = square(*p.sigma_material, bins, source, p.line, "sigma_material");
      px.sigma_total = square(*p.sigma_total, bins, source, p.line, "sigma_total");
      if (p.flags) std::tie(px.low_count, px.nonlinear) = *p.flags;
      m.distribution.pixels.push_back(std::move(px));
    }
    if (o.pair >= 0) {
      auto& slot = pairs.try_emplace(o.pair, -1, -1).first->second;
      int& target = o.label == ClassLabel::threat ? slot.first : slot.second;
      if (target >= 0) throw ParseError(source, o.line, fmt::format("pair {} has two {} members", o.pair, to_string(o.label)));
      target = index;
    }
    ens.members.push_back(std::move(m));
  }
  if (!pairs.empty()) {
    std::vector<std::pair<int, int>> pairing;
    for (const auto& [p, members] : pairs) {
      if (members.first < 0 || members.second < 0) throw ValidationError(fmt::format("pair {} is incomplete", p));
      pairing.push_back(members);
    }
    ens.pairing = std::move(pairing);
  }
  validate(ens);
  return ens;
}

EnsembleSpec read_ensemble_csv(const std::string& path) { return parse_ensemble_csv(csv::read_file(path), path); }

}  // namespace xtsi
