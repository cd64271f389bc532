#include "xtsi/mc_validate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "xtsi/error.hpp"
#include "xtsi/rng.hpp"
#include "xtsi/structured_text.hpp"

namespace xtsi {
namespace {

constexpr std::uint64_t kMixtureStream = 0x6d6978;  // "mix"
constexpr std::uint64_t kCountStream = 0x636e74;    // "cnt"
constexpr std::size_t kBlock = 4096;

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct BlockSums {
  double h = 0.0, h2 = 0.0;  // H(C | g)
  double e = 0.0, e2 = 0.0;  // min_c P(c | g)
  std::size_t n = 0;
};

}  // namespace

MixtureEstimate estimate_mixture(const EnsembleSpec& ens, std::size_t n_samples, std::uint64_t seed, Exec exec) {
  validate(ens);
  if (n_samples < 2) throw ParameterError("estimate_mixture needs at least 2 samples");
  const int k_members = static_cast<int>(ens.members.size());
  std::vector<PreparedObject> objects;
  std::vector<double> log_w;
  for (const auto& m : ens.members) {
    objects.emplace_back(m.distribution);
    log_w.push_back(std::log(m.weight));
  }
  const int n_pix = objects.front().n_pixels();
  const int m_bins = objects.front().n_bins();

  struct Task {
    int member;
    std::size_t begin, end, block;
  };
  std::vector<Task> tasks;
  std::vector<std::size_t> per_member(static_cast<std::size_t>(k_members));
  for (int i = 0; i < k_members; ++i) {
    std::size_t n_i = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(ens.members[i].weight * n_samples)));
    per_member[static_cast<std::size_t>(i)] = n_i;
    for (std::size_t b = 0, start = 0; start < n_i; ++b, start += kBlock)
      tasks.push_back({i, start, std::min(n_i, start + kBlock), b});
  }
  std::vector<BlockSums> sums(tasks.size());

  auto run = [&](std::size_t t) {
    const Task& task = tasks[t];
    Engine rng = make_engine(seed, {kMixtureStream, static_cast<std::uint64_t>(task.member), task.block});
    std::normal_distribution<double> normal;
    const PreparedObject& src = objects[static_cast<std::size_t>(task.member)];
    std::vector<BinVector> g(static_cast<std::size_t>(n_pix));
    BinVector z(m_bins);
    BlockSums& s = sums[t];
    for (std::size_t k = task.begin; k < task.end; ++k) {
      for (int n = 0; n < n_pix; ++n) {
        for (int m = 0; m < m_bins; ++m) z[m] = normal(rng);
        g[static_cast<std::size_t>(n)] = src.mean(n) + src.factor(n).llt().matrixL() * z;
      }
      double log_class[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (int j = 0; j < k_members; ++j) {
        const PreparedObject& o = objects[static_cast<std::size_t>(j)];
        double lp = log_w[static_cast<std::size_t>(j)];
        for (int n = 0; n < n_pix; ++n) {
          BinVector d = g[static_cast<std::size_t>(n)] - o.mean(n);
          lp -= 0.5 * (o.factor(n).quad_form(d) + o.factor(n).log_det());
        }
        int c = ens.members[static_cast<std::size_t>(j)].label == ClassLabel::threat ? 0 : 1;
        log_class[c] = log_sum_exp(log_class[c], lp);
      }
      double log_total = log_sum_exp(log_class[0], log_class[1]);
      double p0 = std::exp(log_class[0] - log_total);
      double p1 = std::exp(log_class[1] - log_total);
      double h = 0.0;
      if (p0 > 0.0) h -= p0 * (log_class[0] - log_total);
      if (p1 > 0.0) h -= p1 * (log_class[1] - log_total);
      double e = std::min(p0, p1);
      s.h += h;
      s.h2 += h * h;
      s.e += e;
      s.e2 += e * e;
      ++s.n;
    }
  };
  const auto n_tasks = static_cast<std::ptrdiff_t>(tasks.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < n_tasks; ++t) run(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < n_tasks; ++t) run(static_cast<std::size_t>(t));
  }

  std::vector<BlockSums> member(static_cast<std::size_t>(k_members));
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    BlockSums& m = member[static_cast<std::size_t>(tasks[t].member)];
    m.h += sums[t].h;
    m.h2 += sums[t].h2;
    m.e += sums[t].e;
    m.e2 += sums[t].e2;
    m.n += sums[t].n;
  }
  double class_entropy = 0.0;
  {
    double pt = 0.0;
    for (const auto& m : ens.members)
      if (m.label == ClassLabel::threat) pt += m.weight;
    for (double p : {pt, 1.0 - pt})
      if (p > 0.0) class_entropy -= p * std::log(p);
  }
  MixtureEstimate est;
  double cond = 0.0, var_h = 0.0, var_e = 0.0;
  for (int i = 0; i < k_members; ++i) {
    const BlockSums& m = member[static_cast<std::size_t>(i)];
    double a = ens.members[static_cast<std::size_t>(i)].weight;
    double n = static_cast<double>(m.n);
    double mh = m.h / n, me = m.e / n;
    double vh = std::max(0.0, (m.h2 - n * mh * mh) / (n - 1.0));
    double ve = std::max(0.0, (m.e2 - n * me * me) / (n - 1.0));
    cond += a * mh;
    est.bayes_error += a * me;
    var_h += a * a * vh / n;
    var_e += a * a * ve / n;
    est.n_samples += m.n;
  }
  est.mutual_information = class_entropy - cond;
  est.mutual_information_se = std::sqrt(var_h);
  est.bayes_error_se = std::sqrt(var_e);
  return est;
}

CountMoments two_stage_moments(const Vector& jd0, const Matrix& sigma_material, std::size_t n_samples,
                               std::uint64_t seed) {
  const auto m = jd0.size();
  if (sigma_material.rows() != m || sigma_material.cols() != m)
    throw AlignmentError("two-stage sampling: covariance does not match the mean");
  if (n_samples < 2) throw ParameterError("two-stage sampling needs at least 2 samples");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(sigma_material));
  Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Engine rng = make_engine(seed, {kCountStream});
  std::normal_distribution<double> normal;
  Vector z(m), counts(m);
  Vector mean = Vector::Zero(m);
  Matrix m2 = Matrix::Zero(m, m);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) z[i] = normal(rng);
    Vector flux = (jd0 + root * z).cwiseMax(0.0);
    for (Eigen::Index i = 0; i < m; ++i)
      counts[i] = flux[i] > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(flux[i])(rng)) : 0.0;
    // Welford update.
    Vector delta = counts - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (counts - mean).transpose();
  }
  return {mean, symmetrize(m2 / static_cast<double>(n_samples - 1))};
}

std::string_view to_string(OracleCheck::Status s) {
  switch (s) {
    case OracleCheck::Status::pass: return "pass";
    case OracleCheck::Status::fail: return "fail";
    case OracleCheck::Status::skipped: return "skipped";
  }
  return "?";
}

bool OracleReport::all_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const OracleCheck& c) { return c.status == OracleCheck::Status::fail; });
}

std::string OracleReport::to_text() const {
  text::Block report;
  report.type = "oracle_report";
  report.entries.push_back({"seed", std::to_string(seed), 0});
  report.entries.push_back({"n_samples", std::to_string(n_samples), 0});
  report.entries.push_back({"result", all_passed() ? "pass" : "fail", 0});
  for (const auto& c : checks) {
    text::Block b;
    b.type = "check";
    b.entries.push_back({"name", c.name, 0});
    b.entries.push_back({"status", std::string(to_string(c.status)), 0});
    b.entries.push_back({"value", text::format_exact(c.value), 0});
    b.entries.push_back({"lower", text::format_exact(c.lower), 0});
    b.entries.push_back({"upper", text::format_exact(c.upper), 0});
    if (!c.detail.empty()) b.entries.push_back({"detail", c.detail, 0});
    report.children.push_back(std::move(b));
  }
  text::Block root;
  root.children.push_back(std::move(report));
  return text::serialize(root);
}

OracleReport mc_validate(const EnsembleSpec& ens, std::size_t n_samples, std::uint64_t seed, Exec exec) {
  validate(ens);
  const int k = static_cast<int>(ens.members.size());
  const int dims = ens.members.front().distribution.n_pixels() * ens.members.front().distribution.n_bins();
  if (k > kOracleMaxMembers || dims > kOracleMaxDims)
    throw SizeError(fmt::format("oracle limited to {} members and {} dimensions; got {} and {}", kOracleMaxMembers,
                                kOracleMaxDims, k, dims));

  OracleReport report;
  report.seed = seed;
  report.n_samples = n_samples;
  using Status = OracleCheck::Status;

  // Stored total covariance against the generative model.
  EnsembleSpec generative = ens;
  double worst = 0.0;
  for (auto& m : generative.members) {
    for (auto& p : m.distribution.pixels) {
      Matrix model = p.sigma_material;
      model.diagonal() += p.jd0;
      double scale = std::max(model.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
      worst = std::max(worst, (p.sigma_total - model).cwiseAbs().maxCoeff() / scale);
      p.sigma_total = model;
    }
  }
  report.checks.push_back({"sigma_total_consistency", worst <= 1e-9 ? Status::pass : Status::fail, worst, 0.0, 1e-9,
                           "max relative deviation of sigma_total from sigma_material + diag(jd0)"});

  std::optional<BoundsResult> bounds;
  try {
    bounds = pe_bounds(PreparedEnsemble(ens, exec));
  } catch (const Error& e) {
    report.checks.push_back({"analytic_bounds", Status::fail, 0.0, 0.0, 0.0, e.what()});
  }
  MixtureEstimate mc = estimate_mixture(generative, n_samples, derive_seed(seed, {1}), exec);
  constexpr double kSlack = 1e-9;
  if (bounds) {
    auto bracket = [&](const char* name, double value, double se, double lo, double hi) {
      bool ok = value + 3.0 * se >= lo - kSlack && value - 3.0 * se <= hi + kSlack;
      report.checks.push_back({name, ok ? Status::pass : Status::fail, value, lo, hi, fmt::format("mc_se={}", se)});
    };
    bracket("mutual_information_nats", mc.mutual_information, mc.mutual_information_se, bounds->is.lower,
            bounds->is.upper);
    bracket("bayes_error", mc.bayes_error, mc.bayes_error_se, bounds->pe_lower, bounds->pe_upper);
  }

  const std::size_t n_counts = std::clamp<std::size_t>(n_samples, 1000, 200000);
  for (int i = 0; i < k; ++i) {
    const auto& pixels = ens.members[static_cast<std::size_t>(i)].distribution.pixels;
    for (std::size_t n = 0; n < pixels.size(); ++n) {
      const auto& p = pixels[n];
      std::string where = fmt::format("member {} pixel {}", i, n);
      if (p.jd0.minCoeff() < kOracleMinCounts) {
        report.checks.push_back({"count_covariance", Status::skipped, 0.0, 0.0, kOracleCovarianceTolerance,
                                 where + ": mean counts below " + fmt::format("{}", kOracleMinCounts)});
        continue;
      }
      CountMoments mom = two_stage_moments(p.jd0, p.sigma_material, n_counts,
                                           derive_seed(seed, {2, static_cast<std::uint64_t>(i), n}));
      Matrix model = p.sigma_material;
      model.diagonal() += p.jd0;
      double rel = (mom.covariance - model).norm() / model.norm();
      report.checks.push_back({"count_covariance", rel <= kOracleCovarianceTolerance ? Status::pass : Status::fail, rel,
                               0.0, kOracleCovarianceTolerance, where + ": relative Frobenius error"});
      Vector z = ((mom.mean - p.jd0).array() / (model.diagonal().array() / static_cast<double>(n_counts)).sqrt()).matrix();
      double zmax = z.cwiseAbs().maxCoeff();
      report.checks.push_back({"count_mean", zmax <= 4.0 ? Status::pass : Status::fail, zmax, 0.0, 4.0,
                               where + ": largest standardized mean deviation"});
    }
  }
  return report;
}

}  // namespace xtsi
