#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "xtsi/error.hpp"
#include "xtsi/material_model.hpp"

using namespace xtsi;

namespace {

ElementSet toy_elements(const EnergyGrid& grid) {
  ElementSet set;
  struct Spec {
    const char* sym;
    double rho, a, b;
  };
  for (Spec s : {Spec{"A", 1.0, 0.8, 2.8}, Spec{"B", 1.0, 0.3, 0.4}, Spec{"C", 2.2, 0.5, 1.5}}) {
    set.emplace(s.sym, resample(parse_element_csv(fixture::power_law_element(s.sym, s.rho, s.a, s.b), s.sym), grid));
  }
  return set;
}

ElementSet shipped_elements(const EnergyGrid& grid) {
  return load_element_directory((fixture::data_dir() / "elements").string(), grid);
}

MaterialDefinition density_only(double rho, double sd) {
  return {"dense", ClassLabel::non_threat, rho, sd, {{"A", 0.4, 0.0}, {"C", 0.6, 0.0}}};
}

}  // namespace

TEST(SampleComposition, ZeroStdReturnsMeans) {
  MaterialDefinition d{"m", ClassLabel::threat, 1.3, 0.0, {{"A", 0.3, 0.0}, {"B", 0.7, 0.0}}};
  auto s = sample_composition(d, 42u);
  EXPECT_EQ(s.density, 1.3);
  EXPECT_EQ(s.weights, (std::vector<double>{0.3, 0.7}));
}

TEST(SampleComposition, DeterministicForSeed) {
  MaterialDefinition d{"m", ClassLabel::threat, 1.3, 0.1, {{"A", 0.3, 0.05}, {"B", 0.7, 0.05}}};
  auto a = sample_composition(d, 7u);
  auto b = sample_composition(d, 7u);
  EXPECT_EQ(a.density, b.density);
  EXPECT_EQ(a.weights, b.weights);
  auto c = sample_composition(d, 8u);
  EXPECT_NE(a.weights, c.weights);
}

TEST(SampleComposition, SymmetricMeanConverges) {
  MaterialDefinition d{"m", ClassLabel::threat, 1.0, 0.0, {{"A", 0.5, 0.08}, {"B", 0.5, 0.08}}};
  Engine rng(123);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    auto s = sample_composition(d, rng);
    ASSERT_NEAR(s.weights[0] + s.weights[1], 1.0, 1e-15);
    ASSERT_GE(s.weights[0], 0.0);
    sum += s.weights[0];
    sum2 += s.weights[0] * s.weights[0];
  }
  double mean = sum / n;
  double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - 0.5), 3.0 * se);
}

TEST(Attenuation, SingleElementIdentity) {
  EnergyGrid grid = EnergyGrid::standard();
  auto el = toy_elements(grid);
  const auto& c = el.at("C");
  Vector mu = attenuation_of_realization(c.density, {1.0}, {&c}, grid);
  for (int i = 0; i < grid.size(); ++i) EXPECT_DOUBLE_EQ(mu[i], c.density * c.mass_attenuation[i]);
}

TEST(Attenuation, HalfAndHalfIsArithmeticMean) {
  EnergyGrid grid = EnergyGrid::standard();
  auto el = toy_elements(grid);
  const auto& a = el.at("A");
  const auto& b = el.at("B");
  double rho = 1.7;
  Vector mu = attenuation_of_realization(rho, {0.5, 0.5}, {&a, &b}, grid);
  for (int i = 0; i < grid.size(); ++i) {
    double la = a.density * a.mass_attenuation[i], lb = b.density * b.mass_attenuation[i];
    EXPECT_NEAR(mu[i], 0.5 * (la + lb) * rho / a.density, 1e-13 * mu[i]);
  }
}

TEST(Attenuation, ThreeComponentMatchesIndependentSum) {
  EnergyGrid grid = EnergyGrid::standard();
  auto el = shipped_elements(grid);
  std::vector<std::string> syms{"H", "C", "O"};
  std::vector<double> w{0.0648, 0.4211, 0.5141};
  std::vector<const ElementTable*> tables;
  std::vector<std::vector<double>> raw;
  for (const auto& s : syms) {
    tables.push_back(&el.at(s));
    const Vector& m = el.at(s).mass_attenuation;
    raw.emplace_back(m.data(), m.data() + m.size());
  }
  Vector mu = attenuation_of_realization(1.2, w, tables, grid);
  auto ref = oracle::mixture_attenuation(1.2, w, raw);
  for (int i = 0; i < grid.size(); ++i) EXPECT_NEAR(mu[i], ref[i], 1e-13 * ref[i]);
}

TEST(Attenuation, MismatchedListsRaiseAlignmentError) {
  EnergyGrid grid = EnergyGrid::standard();
  auto el = toy_elements(grid);
  EXPECT_THROW(attenuation_of_realization(1.0, {0.5, 0.5}, {&el.at("A")}, grid), AlignmentError);
  MaterialDefinition d{"m", ClassLabel::threat, 1.0, 0.0, {{"Zz", 1.0, 0.0}}};
  EXPECT_THROW(component_tables(d, el), AlignmentError);
}

TEST(MaterialStats, TooFewRealizations) {
  EnergyGrid grid = EnergyGrid::uniform(30, 160, 10);
  EXPECT_THROW(estimate_material_stats(density_only(1.0, 0.1), toy_elements(grid), grid, 1, 1), ParameterError);
}

TEST(MaterialStats, ZeroVarianceMaterial) {
  EnergyGrid grid = EnergyGrid::uniform(30, 160, 20);
  auto el = toy_elements(grid);
  auto def = density_only(1.4, 0.0);
  auto st = estimate_material_stats(def, el, grid, 50, 9);
  Vector exact = attenuation_of_realization(1.4, {0.4, 0.6}, {&el.at("A"), &el.at("C")}, grid);
  EXPECT_EQ(st.sigma_mu.norm(), 0.0);
  for (int i = 0; i < grid.size(); ++i) EXPECT_NEAR(st.mu0[i], exact[i], 1e-14 * exact[i]);
}

TEST(MaterialStats, PureDensityVariationTendsToRankOne) {
  EnergyGrid grid = EnergyGrid::uniform(30, 160, 20);
  auto el = toy_elements(grid);
  const double rho = 1.4, sd = 0.05;
  Vector mu_nominal = attenuation_of_realization(rho, {0.4, 0.6}, {&el.at("A"), &el.at("C")}, grid);
  Matrix limit = (sd * sd / (rho * rho)) * mu_nominal * mu_nominal.transpose();
  auto mean_error = [&](int n) {
    double e = 0.0;
    for (std::uint64_t s = 0; s < 8; ++s)
      e += (estimate_material_stats(density_only(rho, sd), el, grid, n, 100 + s).sigma_mu - limit).norm();
    return e / 8.0 / limit.norm();
  };
  double small = mean_error(100), large = mean_error(10000);
  // 1/sqrt(n) scaling predicts a factor of 10.
  EXPECT_LT(large, small / 5.0);
  EXPECT_GT(large, small / 20.0);

  auto st = estimate_material_stats(density_only(rho, sd), el, grid, 20000, 5);
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j)
      EXPECT_GT(st.sigma_mu(i, j) / std::sqrt(st.sigma_mu(i, i) * st.sigma_mu(j, j)), 1.0 - 1e-9);
}

TEST(MaterialStats, BatchesAgreeWithinErrorBars) {
  EnergyGrid grid = EnergyGrid::uniform(30, 160, 12);
  auto el = toy_elements(grid);
  MaterialDefinition d{"mix", ClassLabel::threat, 1.2, 0.03, {{"A", 0.3, 0.04}, {"B", 0.5, 0.04}, {"C", 0.2, 0.03}}};
  const int n = 4000;
  auto a = estimate_material_stats(d, el, grid, n, 1);
  auto b = estimate_material_stats(d, el, grid, n, 2);
  auto both = estimate_material_stats(d, el, grid, 2 * n, 3);
  Matrix avg = 0.5 * (a.sigma_mu + b.sigma_mu);
  for (int i = 0; i < grid.size(); ++i) {
    double v = both.sigma_mu(i, i);
    // Variance of a sample variance is about 2 v² / n for near-Gaussian data.
    double se = std::sqrt(2.0 * v * v / (2.0 * n) + 2.0 * v * v / (2.0 * n));
    EXPECT_LT(std::abs(avg(i, i) - v), 5.0 * se) << "energy " << grid[i];
  }
}

TEST(MaterialStats, InvariantsHold) {
  EnergyGrid grid = EnergyGrid::standard();
  auto el = shipped_elements(grid);
  auto lib = load_material_library((fixture::data_dir() / "materials" / "synthetic_library.txt").string());
  for (const auto& def : lib) {
    auto st = estimate_material_stats(def, el, grid, 200, material_seed(1, def.name));
    EXPECT_LT(asymmetry(st.sigma_mu), 1e-12) << def.name;
    Eigen::SelfAdjointEigenSolver<Matrix> es(st.sigma_mu);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff()) << def.name;
    EXPECT_GT(st.mu0.minCoeff(), 0.0) << def.name;
  }
}

TEST(MaterialStats, SerialEqualsParallel) {
  EnergyGrid grid = EnergyGrid::uniform(30, 160, 40);
  auto el = toy_elements(grid);
  MaterialDefinition d{"mix", ClassLabel::threat, 1.2, 0.03, {{"A", 0.3, 0.04}, {"B", 0.7, 0.04}}};
  auto s = estimate_material_stats(d, el, grid, 500, 77, Exec::serial);
  auto p = estimate_material_stats(d, el, grid, 500, 77, Exec::parallel);
  EXPECT_EQ(s.mu0, p.mu0);
  EXPECT_EQ(s.sigma_mu, p.sigma_mu);
}

TEST(MaterialStats, CsvBundleRoundTrip) {
  fixture::TempDir dir;
  EnergyGrid grid = EnergyGrid::uniform(30, 160, 15);
  auto el = toy_elements(grid);
  MaterialDefinition d{"mix", ClassLabel::threat, 1.2, 0.03, {{"A", 0.3, 0.04}, {"B", 0.7, 0.04}}};
  auto st = estimate_material_stats(d, el, grid, 300, 4);
  std::string stem = (dir / "mix").string();
  save_material_stats(st, stem);
  auto back = load_material_stats(stem);
  EXPECT_EQ(back.name, "mix");
  EXPECT_EQ(back.class_label, ClassLabel::threat);
  EXPECT_EQ(back.n_realizations, 300);
  EXPECT_EQ(back.grid, grid);
  EXPECT_EQ(back.mu0, st.mu0);
  EXPECT_EQ(back.sigma_mu, st.sigma_mu);
}

// Golden regression for one library material at n = 1000. Set
// XTSI_UPDATE_GOLDEN=1 to rewrite the stored bundle.
TEST(MaterialStats, GoldenWater) {
  EnergyGrid grid = EnergyGrid::uniform(30.0, 160.0, 27);
  auto el = shipped_elements(grid);
  auto lib = load_material_library((fixture::data_dir() / "materials" / "synthetic_library.txt").string());
  auto it = std::find_if(lib.begin(), lib.end(), [](const auto& d) { return d.name == "water"; });
  ASSERT_NE(it, lib.end());
  auto st = estimate_material_stats(*it, el, grid, 1000, 20190601);
  std::string stem = (fixture::golden_dir() / "water_n1000").string();
  if (std::getenv("XTSI_UPDATE_GOLDEN")) save_material_stats(st, stem);
  auto ref = load_material_stats(stem);
  ASSERT_EQ(ref.grid, grid);
  for (int i = 0; i < grid.size(); ++i) EXPECT_NEAR(st.mu0[i], ref.mu0[i], 1e-12 * ref.mu0[i]);
  double scale = ref.sigma_mu.cwiseAbs().maxCoeff();
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) EXPECT_NEAR(st.sigma_mu(i, j), ref.sigma_mu(i, j), 1e-10 * scale);
}
