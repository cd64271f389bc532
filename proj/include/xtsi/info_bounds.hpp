#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "xtsi/divergence.hpp"
#include "xtsi/linalg.hpp"
#include "xtsi/spectral_data.hpp"

namespace xtsi {

// Entropies and mutual information are in nats throughout this header except
// where a name says bits. The binary-entropy machinery (h_b, f_ub, Fano, Hu)
// is base 2.

struct EnsembleMember {
  ObjectDistribution distribution;
  double weight = 0.0;
  ClassLabel label = ClassLabel::non_threat;
};

/// Weighted two-class mixture of objects. Optional pairing matches each
/// threat member with one non-threat member (pair.first is the threat).
struct EnsembleSpec {
  std::vector<EnsembleMember> members;
  std::optional<std::vector<std::pair<int, int>>> pairing;
};

/// Throws ValidationError when weights, classes or pairing are malformed.
void validate(const EnsembleSpec& ens);

struct Priors {
  double threat = 0.5;
  double non_threat = 0.5;

  double min() const { return threat < non_threat ? threat : non_threat; }
  double of(ClassLabel c) const { return c == ClassLabel::threat ? threat : non_threat; }
};

enum class DivergenceKind { bhattacharyya, kl };

/// Pairwise divergence matrices and per-member entropies of an ensemble.
/// bd is symmetric; kl(i, j) = KL(pr_i || pr_j).
struct PairwiseTables {
  Matrix bd;
  Matrix kl;
  Vector entropy;
};

PairwiseTables pairwise_tables(const std::vector<PreparedObject>& objects, Exec exec = Exec::parallel);

/// Ensemble with its pairwise tables computed once.
class PreparedEnsemble {
 public:
  explicit PreparedEnsemble(const EnsembleSpec& ens, Exec exec = Exec::parallel);
  PreparedEnsemble(std::vector<double> weights, std::vector<ClassLabel> labels,
                   std::optional<std::vector<std::pair<int, int>>> pairing, PairwiseTables tables);

  int size() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }
  const std::optional<std::vector<std::pair<int, int>>>& pairing() const { return pairing_; }
  const PairwiseTables& tables() const { return tables_; }
  const Matrix& divergence(DivergenceKind k) const { return k == DivergenceKind::bhattacharyya ? tables_.bd : tables_.kl; }
  const Priors& priors() const { return priors_; }
  /// H(C) in nats.
  double class_entropy() const;

 private:
  std::vector<double> weights_;
  std::vector<ClassLabel> labels_;
  std::optional<std::vector<std::pair<int, int>>> pairing_;
  PairwiseTables tables_;
  Priors priors_;
};

/// Pairwise-divergence mixture entropy estimate over the members in
/// `indices` with (unnormalized) `weights`, which are renormalized:
///   Σ_i a_i H_i - Σ_i a_i ln Σ_j a_j exp(-D_ij)
/// The inner sum is evaluated as a log-sum-exp.
double entropy_bound(const std::vector<int>& indices, const std::vector<double>& weights, const Matrix& divergence,
                     const Vector& entropy);

/// Bound over the full ensemble (class labels ignored).
double entropy_bound(const PreparedEnsemble& ens, DivergenceKind kind);
/// Bound over the members of one class, weights renormalized by the prior.
double conditional_entropy_bound(const PreparedEnsemble& ens, DivergenceKind kind, ClassLabel c);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// I_S >= H_BD(g) - Σ_c P_c H_KL(g|c);  I_S <= H_KL(g) - Σ_c P_c H_BD(g|c).
Interval is_bounds_main(const PreparedEnsemble& ens);

/// Upper bound from the pair decomposition. Throws PreconditionError
/// without a pairing.
double is_upper_paired(const PreparedEnsemble& ens);

/// Lower bound from pairwise cross-class Bhattacharyya distances.
double is_lower_class_bd(const PreparedEnsemble& ens);

enum class BoundSource { main, paired, class_bd };
std::string_view to_string(BoundSource s);

struct CombinedBounds {
  double lower = 0.0;  // clamped to [0, H(C)]
  double upper = 0.0;
  BoundSource lower_source = BoundSource::main;
  BoundSource upper_source = BoundSource::main;
  Interval main;
  double class_bd_lower = 0.0;
  std::optional<double> paired_upper;
};

/// Tightest of the available bounds, clamped to [0, H(C)]. Throws
/// ConsistencyError when lower exceeds upper by more than 1e-9.
CombinedBounds combined_is_bounds(const PreparedEnsemble& ens);

/// h_b(x) in bits; h_b(0) = h_b(1) = 0.
double binary_entropy(double x);
/// Preimage of h in [0, 1/2] by bisection to adjacent doubles. DomainError outside [0, 1].
double binary_entropy_inverse(double h_bits);

/// f_ub(x) in bits for the given minimum prior.
double fub(double x, double p_min);
/// Preimage on [0, p_min]; returns p_min when h exceeds f_ub(p_min).
double fub_inverse(double h_bits, double p_min);

/// Fano: P_e >= h_b^-1(H(C) - I_S). Both arguments in bits.
double pe_lower_fano(double is_bits, const Priors& priors);
/// P_e <= min(P_min, f_ub^-1(H(C) - I_S)). Bits.
double pe_upper_hu(double is_bits, const Priors& priors);

struct BoundsResult {
  CombinedBounds is;  // nats
  double class_entropy = 0.0;  // nats
  double pe_lower = 0.0;
  double pe_upper = 0.0;

  double is_lower_bits() const;
  double is_upper_bits() const;
  double class_entropy_bits() const;
};

/// Error-probability bounds: the upper I_S bound yields the lower P_e bound
/// and vice versa, so the interval contains P_e whenever [lower, upper]
/// contains I_S.
BoundsResult pe_bounds(const PreparedEnsemble& ens);
BoundsResult pe_bounds(const EnsembleSpec& ens, Exec exec = Exec::parallel);

inline double nats_to_bits(double v) { return v / 0.69314718055994530942; }
inline double bits_to_nats(double v) { return v * 0.69314718055994530942; }

}  // namespace xtsi
