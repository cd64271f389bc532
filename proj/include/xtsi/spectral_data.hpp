#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xtsi/linalg.hpp"
#include "xtsi/structured_text.hpp"

namespace xtsi {

/// Discrete energy axis in keV shared by every spectral quantity.
/// Strictly increasing, positive, at least two samples.
class EnergyGrid {
 public:
  explicit EnergyGrid(std::vector<double> energies_kev);

  static EnergyGrid uniform(double lo_kev, double hi_kev, int count);
  /// 180 samples on [30, 160] keV.
  static EnergyGrid standard() { return uniform(30.0, 160.0, 180); }

  int size() const { return static_cast<int>(e_.size()); }
  double operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  double front() const { return e_.front(); }
  double back() const { return e_.back(); }
  std::span<const double> energies() const { return e_; }

  /// Trapezoidal quadrature weights over the full grid.
  Vector trapezoid_weights() const;
  double integrate(const Vector& f) const { return trapezoid_weights().dot(f); }

  bool operator==(const EnergyGrid& other) const = default;

 private:
  std::vector<double> e_;
};

void require_same_grid(const EnergyGrid& a, const EnergyGrid& b, std::string_view what);

struct SourceSpectrum {
  EnergyGrid grid;
  Vector s;                    // normalized density, 1/keV; trapezoid integral 1
  double n0 = 1.0;             // photons per detector element per exposure
  double exposure_time = 1.0;  // s

  SourceSpectrum with_budget(double photons) const {
    SourceSpectrum c = *this;
    c.n0 = photons;
    return c;
  }
};

/// Clip negatives, renormalize to unit trapezoid integral.
/// Throws DegenerateError when nothing positive remains.
SourceSpectrum make_spectrum(const EnergyGrid& grid, Vector intensity);

/// Unfiltered Kramers shape (kvp - E)/E, zero above kvp.
SourceSpectrum kramers_spectrum(const EnergyGrid& grid, double kvp);

SourceSpectrum load_spectrum(const std::string& path, const EnergyGrid& grid);
SourceSpectrum parse_spectrum(std::string_view content, const std::string& source, const EnergyGrid& grid);
std::string serialize_spectrum(const SourceSpectrum& spectrum);

/// Mass-attenuation table for one element (or pseudo-element such as Air).
struct ElementTable {
  std::string symbol;
  EnergyGrid grid;
  Vector mass_attenuation;  // cm^2/g
  double density = 0.0;     // g/cm^3
};

/// Native (unresampled) table as read from an XCOM-style CSV.
struct RawElementTable {
  std::string symbol;
  double density = 0.0;
  std::vector<double> energies;
  std::vector<double> mass_attenuation;
};

RawElementTable parse_element_csv(std::string_view content, const std::string& source);
/// Log-log interpolation onto `grid`; exact table energies are copied through.
ElementTable resample(const RawElementTable& raw, const EnergyGrid& grid);

ElementTable load_element_table(const std::string& path, const EnergyGrid& grid);
std::string serialize_element_table(const ElementTable& table);

using ElementSet = std::map<std::string, ElementTable, std::less<>>;

/// Every *.csv in `dir`, keyed by symbol.
ElementSet load_element_directory(const std::string& dir, const EnergyGrid& grid);

enum class ClassLabel { threat, non_threat };

std::string_view to_string(ClassLabel c);
ClassLabel parse_class_label(std::string_view s);

struct Component {
  std::string element;
  double w_mean = 0.0;
  double w_std = 0.0;

  bool operator==(const Component&) const = default;
};

struct MaterialDefinition {
  std::string name;
  ClassLabel class_label = ClassLabel::non_threat;
  double density_mean = 0.0;  // g/cm^3
  double density_std = 0.0;
  std::vector<Component> components;

  bool operator==(const MaterialDefinition&) const = default;
};

/// Checks weight sums, signs and density; throws ValidationError naming the material.
void validate(const MaterialDefinition& def);

std::vector<MaterialDefinition> parse_material_library(const text::Block& root);
std::vector<MaterialDefinition> load_material_library(const std::string& path);
std::string serialize_material_library(const std::vector<MaterialDefinition>& defs);
text::Block to_block(const MaterialDefinition& def);

}  // namespace xtsi
