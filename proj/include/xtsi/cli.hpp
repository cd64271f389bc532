#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xtsi/material_model.hpp"
#include "xtsi/scenario.hpp"

namespace xtsi::cli {

/// Runs the command line; returns the process exit code. Diagnostics go to
/// `err`, reports and summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Content hash of everything a material's statistics depend on.
std::uint64_t stats_cache_key(const MaterialDefinition& def, const ElementSet& elements, const EnergyGrid& grid,
                              int n_realizations, std::uint64_t seed);

struct CacheOutcome {
  std::vector<MaterialStats> stats;
  std::vector<std::string> computed;  // names recomputed on this call
  std::vector<std::string> reused;    // names served from the cache
};

/// Material statistics for every definition, read from `cache_dir` when a
/// bundle with a matching key exists and written there otherwise.
CacheOutcome cached_material_stats(const std::vector<MaterialDefinition>& library, const ElementSet& elements,
                                   const EnergyGrid& grid, int n_realizations, std::uint64_t seed,
                                   const std::string& cache_dir);

/// Gnuplot script drawing the P_e bounds of `csv_name` against N0.
std::string plot_script(const ScenarioConfig& cfg, const std::string& csv_name);

/// Two Gaussian one-pixel, one-bin objects, one per class.
EnsembleSpec canonical_fixture();

}  // namespace xtsi::cli
