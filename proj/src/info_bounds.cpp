#include "xtsi/info_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "xtsi/error.hpp"

namespace xtsi {
namespace {

double log_sum_exp(const std::vector<double>& terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

double entropy_nats(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

std::vector<int> members_of(const PreparedEnsemble& ens, ClassLabel c) {
  std::vector<int> out;
  for (int i = 0; i < ens.size(); ++i)
    if (ens.labels()[static_cast<std::size_t>(i)] == c) out.push_back(i);
  return out;
}

void validate_parts(const std::vector<double>& weights, const std::vector<ClassLabel>& labels,
                    const std::optional<std::vector<std::pair<int, int>>>& pairing) {
  if (weights.empty()) throw ValidationError("ensemble is empty");
  if (weights.size() != labels.size()) throw ValidationError("ensemble weights and labels differ in length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ValidationError("ensemble weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(fmt::format("ensemble weights sum to {}, expected 1", sum));
  std::set<ClassLabel> seen(labels.begin(), labels.end());
  if (seen.size() != 2) throw ValidationError("ensemble must contain both classes");
  if (!pairing) return;
  const int k = static_cast<int>(weights.size());
  std::vector<int> used(weights.size(), 0);
  for (auto [t, nt] : *pairing) {
    if (t < 0 || t >= k || nt < 0 || nt >= k) throw ValidationError("pairing index out of range");
    if (labels[static_cast<std::size_t>(t)] != ClassLabel::threat ||
        labels[static_cast<std::size_t>(nt)] != ClassLabel::non_threat)
      throw ValidationError(fmt::format("pair ({}, {}) is not (threat, non_threat)", t, nt));
    ++used[static_cast<std::size_t>(t)];
    ++used[static_cast<std::size_t>(nt)];
  }
  for (int u : used)
    if (u != 1) throw ValidationError("pairing must be a perfect matching between the two classes");
}

}  // namespace

void validate(const EnsembleSpec& ens) {
  std::vector<double> w;
  std::vector<ClassLabel> l;
  for (const auto& m : ens.members) {
    w.push_back(m.weight);
    l.push_back(m.label);
  }
  validate_parts(w, l, ens.pairing);
  for (std::size_t i = 1; i < ens.members.size(); ++i) {
    const auto& a = ens.members.front().distribution;
    const auto& b = ens.members[i].distribution;
    if (a.n_pixels() != b.n_pixels() || a.n_bins() != b.n_bins())
      throw ValidationError(fmt::format("member {} does not match the pixel/bin layout of member 0", i));
  }
}

PairwiseTables pairwise_tables(const std::vector<PreparedObject>& objects, Exec exec) {
  const int k = static_cast<int>(objects.size());
  PairwiseTables t{Matrix::Zero(k, k), Matrix::Zero(k, k), Vector::Zero(k)};
  auto row = [&](int i) {
    const auto& a = objects[static_cast<std::size_t>(i)];
    t.entropy[i] = gaussian_entropy(a);
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const auto& b = objects[static_cast<std::size_t>(j)];
      if (j > i) {
        double d = bhattacharyya(a, b);
        t.bd(i, j) = d;
        t.bd(j, i) = d;
      }
      t.kl(i, j) = kl(a, b);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < k; ++i) row(i);
  } else {
    for (int i = 0; i < k; ++i) row(i);
  }
  return t;
}

PreparedEnsemble::PreparedEnsemble(std::vector<double> weights, std::vector<ClassLabel> labels,
                                   std::optional<std::vector<std::pair<int, int>>> pairing, PairwiseTables tables)
    : weights_(std::move(weights)), labels_(std::move(labels)), pairing_(std::move(pairing)), tables_(std::move(tables)) {
  validate_parts(weights_, labels_, pairing_);
  const auto k = static_cast<Eigen::Index>(weights_.size());
  if (tables_.bd.rows() != k || tables_.bd.cols() != k || tables_.kl.rows() != k || tables_.kl.cols() != k ||
      tables_.entropy.size() != k)
    throw AlignmentError("pairwise tables do not match the ensemble size");
  priors_ = Priors{0.0, 0.0};
  for (std::size_t i = 0; i < weights_.size(); ++i)
    (labels_[i] == ClassLabel::threat ? priors_.threat : priors_.non_threat) += weights_[i];
}

namespace {

PreparedEnsemble prepare(const EnsembleSpec& ens, Exec exec) {
  validate(ens);
  std::vector<PreparedObject> objs;
  std::vector<double> w;
  std::vector<ClassLabel> l;
  objs.reserve(ens.members.size());
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    try {
      objs.emplace_back(ens.members[i].distribution);
    } catch (const DecompositionError& e) {
      throw DecompositionError(fmt::format("member {}: {}", i, e.what()));
    }
    w.push_back(ens.members[i].weight);
    l.push_back(ens.members[i].label);
  }
  return PreparedEnsemble(std::move(w), std::move(l), ens.pairing, pairwise_tables(objs, exec));
}

}  // namespace

PreparedEnsemble::PreparedEnsemble(const EnsembleSpec& ens, Exec exec) : PreparedEnsemble(prepare(ens, exec)) {}

double PreparedEnsemble::class_entropy() const { return entropy_nats({priors_.threat, priors_.non_threat}); }

double entropy_bound(const std::vector<int>& indices, const std::vector<double>& weights, const Matrix& divergence,
                     const Vector& entropy) {
  double total = 0.0;
  for (int i : indices) total += weights[static_cast<std::size_t>(i)];
  std::vector<double> log_a;
  log_a.reserve(indices.size());
  for (int j : indices) log_a.push_back(std::log(weights[static_cast<std::size_t>(j)] / total));

  double mean_entropy = 0.0;
  double mean_lse = 0.0;
  std::vector<double> terms(indices.size());
  for (std::size_t ii = 0; ii < indices.size(); ++ii) {
    int i = indices[ii];
    double a = weights[static_cast<std::size_t>(i)] / total;
    for (std::size_t jj = 0; jj < indices.size(); ++jj) terms[jj] = log_a[jj] - divergence(i, indices[jj]);
    mean_entropy += a * entropy[i];
    mean_lse += a * log_sum_exp(terms);
  }
  return mean_entropy - mean_lse;
}

double entropy_bound(const PreparedEnsemble& ens, DivergenceKind kind) {
  std::vector<int> all(static_cast<std::size_t>(ens.size()));
  for (int i = 0; i < ens.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  return entropy_bound(all, ens.weights(), ens.divergence(kind), ens.tables().entropy);
}

double conditional_entropy_bound(const PreparedEnsemble& ens, DivergenceKind kind, ClassLabel c) {
  return entropy_bound(members_of(ens, c), ens.weights(), ens.divergence(kind), ens.tables().entropy);
}

Interval is_bounds_main(const PreparedEnsemble& ens) {
  const Priors& p = ens.priors();
  auto cond = [&](DivergenceKind k) {
    return p.threat * conditional_entropy_bound(ens, k, ClassLabel::threat) +
           p.non_threat * conditional_entropy_bound(ens, k, ClassLabel::non_threat);
  };
  return Interval{entropy_bound(ens, DivergenceKind::bhattacharyya) - cond(DivergenceKind::kl),
                  entropy_bound(ens, DivergenceKind::kl) - cond(DivergenceKind::bhattacharyya)};
}

double is_upper_paired(const PreparedEnsemble& ens) {
  if (!ens.pairing()) throw PreconditionError("paired upper bound requires a pairing of the ensemble");
  const auto& a = ens.weights();
  const Vector& h = ens.tables().entropy;
  double bound = ens.class_entropy();
  for (int i = 0; i < ens.size(); ++i) bound -= a[static_cast<std::size_t>(i)] * h[i];
  for (auto [t, nt] : *ens.pairing()) {
    double at = a[static_cast<std::size_t>(t)], ant = a[static_cast<std::size_t>(nt)];
    double pair_weight = at + ant;
    double pair_class_entropy = entropy_nats({at / pair_weight, ant / pair_weight});
    double pair_mixture = entropy_bound({t, nt}, a, ens.tables().kl, h);
    bound += pair_weight * (pair_mixture - pair_class_entropy);
  }
  return bound;
}

double is_lower_class_bd(const PreparedEnsemble& ens) {
  const Priors& p = ens.priors();
  const auto& a = ens.weights();
  const Matrix& bd = ens.tables().bd;
  // H(C) - sum_c p_c ln(1 + e^x_c), folded per class as -p_c ln(p_c + s_c) with
  // s_c = p_c e^x_c. s_c is a sum of terms below 1, so the plain sum is safe
  // and identical classes cancel to exactly zero.
  double bound = 0.0;
  for (ClassLabel c : {ClassLabel::threat, ClassLabel::non_threat}) {
    ClassLabel other = c == ClassLabel::threat ? ClassLabel::non_threat : ClassLabel::threat;
    auto in_other = members_of(ens, other);
    double cross = 0.0;
    for (int i : members_of(ens, c))
      for (int j : in_other)
        cross += std::sqrt(a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)]) * std::exp(-bd(i, j));
    double s = std::sqrt(p.of(other) / p.of(c)) * cross;
    bound -= p.of(c) * std::log1p(p.of(c) - 1.0 + s);
  }
  return bound;
}

std::string_view to_string(BoundSource s) {
  switch (s) {
    case BoundSource::main: return "main";
    case BoundSource::paired: return "paired";
    case BoundSource::class_bd: return "class_bd";
  }
  return "?";
}

CombinedBounds combined_is_bounds(const PreparedEnsemble& ens) {
  const double hc = ens.class_entropy();
  CombinedBounds out;
  out.main = is_bounds_main(ens);
  out.class_bd_lower = is_lower_class_bd(ens);
  if (ens.pairing()) out.paired_upper = is_upper_paired(ens);

  double lower = out.main.lower;
  if (out.class_bd_lower > lower) {
    lower = out.class_bd_lower;
    out.lower_source = BoundSource::class_bd;
  }
  double upper = out.main.upper;
  if (out.paired_upper && *out.paired_upper < upper) {
    upper = *out.paired_upper;
    out.upper_source = BoundSource::paired;
  }
  out.lower = std::clamp(lower, 0.0, hc);
  out.upper = std::clamp(upper, 0.0, hc);
  if (out.lower > out.upper + 1e-9)
    throw ConsistencyError(fmt::format("I_S lower bound {} exceeds upper bound {}", out.lower, out.upper));
  out.upper = std::max(out.upper, out.lower);
  return out;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("binary entropy argument {} outside [0, 1]", x));
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

namespace {

template <typename F>
double bisect_increasing(F&& f, double target, double lo, double hi) {
  // Runs until the bracket is two adjacent doubles, so tiny preimages keep
  // their relative precision.
  while (true) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double binary_entropy_inverse(double h_bits) {
  if (!(h_bits >= 0.0 && h_bits <= 1.0)) throw DomainError(fmt::format("binary entropy value {} outside [0, 1]", h_bits));
  if (h_bits == 0.0) return 0.0;
  if (h_bits == 1.0) return 0.5;
  return bisect_increasing([](double x) { return binary_entropy(x); }, h_bits, 0.0, 0.5);
}

double fub(double x, double p_min) {
  if (x <= 0.0) return 0.0;
  double s = x + p_min;
  return -p_min * std::log2(p_min / s) - x * std::log2(x / s);
}

double fub_inverse(double h_bits, double p_min) {
  if (!(h_bits >= 0.0)) throw DomainError(fmt::format("f_ub value {} is negative", h_bits));
  if (h_bits == 0.0) return 0.0;
  if (h_bits >= fub(p_min, p_min)) return p_min;
  return bisect_increasing([p_min](double x) { return fub(x, p_min); }, h_bits, 0.0, p_min);
}

namespace {

double conditional_class_entropy_bits(double is_bits, const Priors& priors) {
  double hc = binary_entropy(priors.threat);
  return hc - std::clamp(is_bits, 0.0, hc);
}

}  // namespace

double pe_lower_fano(double is_bits, const Priors& priors) {
  return binary_entropy_inverse(std::clamp(conditional_class_entropy_bits(is_bits, priors), 0.0, 1.0));
}

double pe_upper_hu(double is_bits, const Priors& priors) {
  double p_min = priors.min();
  return std::min(p_min, fub_inverse(conditional_class_entropy_bits(is_bits, priors), p_min));
}

double BoundsResult::is_lower_bits() const { return nats_to_bits(is.lower); }
double BoundsResult::is_upper_bits() const { return nats_to_bits(is.upper); }
double BoundsResult::class_entropy_bits() const { return nats_to_bits(class_entropy); }

BoundsResult pe_bounds(const PreparedEnsemble& ens) {
  BoundsResult r;
  r.is = combined_is_bounds(ens);
  r.class_entropy = ens.class_entropy();
  r.pe_lower = pe_lower_fano(r.is_upper_bits(), ens.priors());
  r.pe_upper = pe_upper_hu(r.is_lower_bits(), ens.priors());
  return r;
}

BoundsResult pe_bounds(const EnsembleSpec& ens, Exec exec) { return pe_bounds(PreparedEnsemble(ens, exec)); }

}  // namespace xtsi
