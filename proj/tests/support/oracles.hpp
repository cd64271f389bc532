#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the library's divergence or bound code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

inline double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double normal_log_pdf(double x, double mean, double var) {
  return -(x - mean) * (x - mean) / (2.0 * var) - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

template <typename F>
double integrate(F&& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

struct Gauss1 {
  double mean, var;
};

inline std::pair<double, double> support_of(const std::vector<Gauss1>& g) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& c : g) {
    double s = std::sqrt(c.var);
    lo = std::min(lo, c.mean - 14.0 * s);
    hi = std::max(hi, c.mean + 14.0 * s);
  }
  return {lo, hi};
}

/// -ln ∫ sqrt(p q)
inline double bhattacharyya_1d(Gauss1 a, Gauss1 b) {
  auto [lo, hi] = support_of({a, b});
  double bc = integrate(
      [&](double x) { return std::exp(0.5 * (normal_log_pdf(x, a.mean, a.var) + normal_log_pdf(x, b.mean, b.var))); },
      lo, hi);
  return -std::log(bc);
}

/// ∫ p ln(p / q)
inline double kl_1d(Gauss1 a, Gauss1 b) {
  auto [lo, hi] = support_of({a, b});
  return integrate(
      [&](double x) {
        double lp = normal_log_pdf(x, a.mean, a.var);
        return std::exp(lp) * (lp - normal_log_pdf(x, b.mean, b.var));
      },
      lo, hi);
}

struct Gauss2 {
  double mx, my;
  double sxx, sxy, syy;

  double log_pdf(double x, double y) const {
    double det = sxx * syy - sxy * sxy;
    double dx = x - mx, dy = y - my;
    double q = (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det;
    return -0.5 * q - std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
  }
};

template <typename F>
double integrate_2d(F&& f, const Gauss2& a, const Gauss2& b) {
  double sx = std::sqrt(std::max(a.sxx, b.sxx)), sy = std::sqrt(std::max(a.syy, b.syy));
  double xlo = std::min(a.mx, b.mx) - 12.0 * sx, xhi = std::max(a.mx, b.mx) + 12.0 * sx;
  double ylo = std::min(a.my, b.my) - 12.0 * sy, yhi = std::max(a.my, b.my) + 12.0 * sy;
  return integrate([&](double x) { return integrate([&](double y) { return f(x, y); }, ylo, yhi); }, xlo, xhi);
}

inline double bhattacharyya_2d(const Gauss2& a, const Gauss2& b) {
  return -std::log(integrate_2d([&](double x, double y) { return std::exp(0.5 * (a.log_pdf(x, y) + b.log_pdf(x, y))); },
                                a, b));
}

inline double kl_2d(const Gauss2& a, const Gauss2& b) {
  return integrate_2d(
      [&](double x, double y) {
        double lp = a.log_pdf(x, y);
        return std::exp(lp) * (lp - b.log_pdf(x, y));
      },
      a, b);
}

struct Weighted1 {
  Gauss1 g;
  double weight;
  int label;  // 0 or 1
};

inline double mixture_pdf(const std::vector<Weighted1>& m, double x, int label = -1) {
  double s = 0.0;
  for (const auto& c : m)
    if (label < 0 || c.label == label) s += c.weight * normal_pdf(x, c.g.mean, c.g.var);
  return s;
}

inline std::pair<double, double> support_of(const std::vector<Weighted1>& m) {
  std::vector<Gauss1> g;
  for (const auto& c : m) g.push_back(c.g);
  return support_of(g);
}

/// Differential entropy of a 1-d Gaussian mixture (nats), by quadrature.
inline double mixture_entropy_1d(const std::vector<Weighted1>& m) {
  auto [lo, hi] = support_of(m);
  return integrate(
      [&](double x) {
        double p = mixture_pdf(m, x);
        return p > 0.0 ? -p * std::log(p) : 0.0;
      },
      lo, hi);
}

/// I(g; C) in nats for a labelled 1-d mixture, by quadrature.
inline double mixture_mutual_information_1d(const std::vector<Weighted1>& m) {
  auto [lo, hi] = support_of(m);
  return integrate(
      [&](double x) {
        double p = mixture_pdf(m, x);
        if (!(p > 0.0)) return 0.0;
        double v = 0.0;
        for (int c = 0; c < 2; ++c) {
          double pc = mixture_pdf(m, x, c);
          double prior = 0.0;
          for (const auto& k : m)
            if (k.label == c) prior += k.weight;
          if (pc > 0.0) v += pc * std::log(pc / (p * prior));
        }
        return v;
      },
      lo, hi);
}

/// Bayes error ∫ min_c P_c p(x | c) for a labelled 1-d mixture.
inline double mixture_bayes_error_1d(const std::vector<Weighted1>& m) {
  auto [lo, hi] = support_of(m);
  return integrate([&](double x) { return std::min(mixture_pdf(m, x, 0), mixture_pdf(m, x, 1)); }, lo, hi);
}

/// Monte Carlo entropy of a 1-d mixture with standard error.
inline std::pair<double, double> mixture_entropy_mc(const std::vector<Weighted1>& m, std::size_t n,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w;
  for (const auto& c : m) w.push_back(c.weight);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::normal_distribution<double> z;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = m[static_cast<std::size_t>(pick(rng))];
    double x = c.g.mean + std::sqrt(c.g.var) * z(rng);
    double v = -std::log(mixture_pdf(m, x));
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / n;
  return {mean, std::sqrt((sum2 / n - mean * mean) / n)};
}

/// Mixture rule written out element by element:
///   μ(E) = ρ Σ_c w_c (μ/ρ)_c(E)
inline std::vector<double> mixture_attenuation(double density, const std::vector<double>& weights,
                                               const std::vector<std::vector<double>>& mass_attenuation) {
  std::vector<double> mu(mass_attenuation.front().size(), 0.0);
  for (std::size_t r = 0; r < mu.size(); ++r) {
    double per_gram = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) per_gram += weights[c] * mass_attenuation[c][r];
    mu[r] = density * per_gram;
  }
  return mu;
}

/// Poisson pmf via a running product (no lgamma).
inline double poisson_pmf(double lambda, int k) {
  double log_p = -lambda;
  for (int i = 1; i <= k; ++i) log_p += std::log(lambda / i);
  return std::exp(log_p);
}

}  // namespace oracle
