#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xtsi/linalg.hpp"
#include "xtsi/rng.hpp"
#include "xtsi/spectral_data.hpp"

namespace xtsi {

/// Gaussian-process statistics of one material's linear attenuation μ(E):
/// mean vector (1/cm) and energy-energy covariance (1/cm^2) on the grid.
struct MaterialStats {
  std::string name;
  ClassLabel class_label = ClassLabel::non_threat;
  EnergyGrid grid;
  Vector mu0;
  Matrix sigma_mu;
  int n_realizations = 0;
};

struct CompositionSample {
  double density = 0.0;
  std::vector<double> weights;  // aligned with def.components; sums to 1
};

/// One realization of density and weight fractions: each w_c from a normal
/// truncated to [0, 1], then renormalized; density from a normal truncated
/// to (0, inf). Zero std returns the mean exactly.
CompositionSample sample_composition(const MaterialDefinition& def, Engine& rng);
CompositionSample sample_composition(const MaterialDefinition& def, std::uint64_t seed);

/// μ(E) = ρ Σ_c w_c (μ/ρ)_c(E). `tables[c]` must correspond to weights[c].
Vector attenuation_of_realization(double density, const std::vector<double>& weights,
                                  const std::vector<const ElementTable*>& tables, const EnergyGrid& grid);

/// Resolve a definition's component elements against `elements`.
std::vector<const ElementTable*> component_tables(const MaterialDefinition& def, const ElementSet& elements);

inline constexpr int kDefaultRealizations = 1000;

/// Sample mean and unbiased sample covariance of `n_realizations` attenuation
/// profiles, followed by PSD repair. Realization k draws from the stream
/// derived from (seed, k), so the result does not depend on `exec` or on the
/// number of threads.
MaterialStats estimate_material_stats(const MaterialDefinition& def, const ElementSet& elements,
                                      const EnergyGrid& grid, int n_realizations, std::uint64_t seed,
                                      Exec exec = Exec::parallel);

/// Per-material seed that does not depend on the rest of the library.
std::uint64_t material_seed(std::uint64_t base_seed, const std::string& name);

// CSV bundle: "<stem>_mu0.csv" holds "energy_keV,mu0" rows, "<stem>_cov.csv"
// holds R comma-separated rows. Header comments carry name/class/n.
void save_material_stats(const MaterialStats& stats, const std::string& stem);
MaterialStats load_material_stats(const std::string& stem);

}  // namespace xtsi
