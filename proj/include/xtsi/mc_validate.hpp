#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xtsi/info_bounds.hpp"

namespace xtsi {

/// Monte Carlo estimates for a Gaussian-mixture ensemble, in nats. Samples
/// are stratified by member; the posterior P(c | g) is evaluated exactly.
struct MixtureEstimate {
  double mutual_information = 0.0;
  double mutual_information_se = 0.0;
  double bayes_error = 0.0;
  double bayes_error_se = 0.0;
  std::size_t n_samples = 0;
};

/// Every member's pixels are sampled from N(jd0, sigma_total).
MixtureEstimate estimate_mixture(const EnsembleSpec& ens, std::size_t n_samples, std::uint64_t seed,
                                 Exec exec = Exec::parallel);

/// Two-stage draw of one pixel's counts: J ~ N(jd0, sigma_material) with
/// negative values set to zero, then independent Poisson(J_m) per bin.
struct CountMoments {
  Vector mean;
  Matrix covariance;
};
CountMoments two_stage_moments(const Vector& jd0, const Matrix& sigma_material, std::size_t n_samples,
                               std::uint64_t seed);

struct OracleCheck {
  std::string name;
  enum class Status { pass, fail, skipped } status = Status::pass;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string detail;
};

std::string_view to_string(OracleCheck::Status s);

struct OracleReport {
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<OracleCheck> checks;

  bool all_passed() const;
  /// Structured text: one `check { ... }` block per check.
  std::string to_text() const;
};

/// Size guard for the oracle.
inline constexpr int kOracleMaxMembers = 8;
inline constexpr int kOracleMaxDims = 8;
/// Covariance comparisons need every bin's mean count at least this large.
inline constexpr double kOracleMinCounts = 1000.0;
inline constexpr double kOracleCovarianceTolerance = 0.03;

/// Checks the ensemble against its generative model sigma_material +
/// diag(jd0): stored-covariance consistency, I_S and P_e bracketing at 3
/// standard errors, and per-pixel count moments under the two-stage chain.
/// Throws SizeError when K or N·M exceeds the guard.
OracleReport mc_validate(const EnsembleSpec& ens, std::size_t n_samples, std::uint64_t seed,
                         Exec exec = Exec::parallel);

}  // namespace xtsi
