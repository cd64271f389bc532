#pragma once

#include <string>

#include "xtsi/info_bounds.hpp"

namespace xtsi {

// Ensemble dump, one CSV row per (object, pixel, field):
//   object,class,weight,pair,pixel,field,values...
// field is jd0, sigma_material or sigma_total (row-major) or flags
// (low_count, nonlinear as 0/1). pair is the bag-pair index, or -1 when the
// ensemble has no pairing. Values are written in shortest round-trip form.

inline constexpr const char* kEnsembleHeader = "object,class,weight,pair,pixel,field,values";

std::string ensemble_csv(const EnsembleSpec& ens);
void write_ensemble_csv(const std::string& path, const EnsembleSpec& ens);

/// Throws ParseError on malformed rows and ValidationError when the result
/// is not a valid ensemble.
EnsembleSpec parse_ensemble_csv(std::string_view content, const std::string& source);
EnsembleSpec read_ensemble_csv(const std::string& path);

}  // namespace xtsi
