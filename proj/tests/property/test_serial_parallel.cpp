#include <gtest/gtest.h>

#include <omp.h>

#include "generators.hpp"
#include "scenario_fixture.hpp"
#include "xtsi/info_bounds.hpp"
#include "xtsi/mc_validate.hpp"

using namespace xtsi;

namespace {

class ThreadCount {
 public:
  explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved_); }

 private:
  int saved_;
};

}  // namespace

TEST(SerialParallel, PairwiseTables) {
  gen::Rng rng(301);
  auto ens = gen::paired_ensemble(rng, 10, 4, 3, 1.5);
  std::vector<PreparedObject> objs;
  for (const auto& m : ens.members) objs.emplace_back(m.distribution);
  auto s = pairwise_tables(objs, Exec::serial);
  for (int threads : {1, 3, 8}) {
    ThreadCount tc(threads);
    auto p = pairwise_tables(objs, Exec::parallel);
    EXPECT_EQ(s.bd, p.bd) << threads;
    EXPECT_EQ(s.kl, p.kl) << threads;
    EXPECT_EQ(s.entropy, p.entropy) << threads;
  }
}

TEST(SerialParallel, MaterialStats) {
  const auto& sc = fixture::small_scenario();
  EnergyGrid grid = sc.cfg.grid();
  auto elements = load_element_directory((fixture::data_dir() / "elements").string(), grid);
  auto defs = load_material_library((fixture::data_dir() / "materials" / "synthetic_library.txt").string());
  auto s = estimate_material_stats(defs[2], elements, grid, 300, 11, Exec::serial);
  for (int threads : {1, 4}) {
    ThreadCount tc(threads);
    auto p = estimate_material_stats(defs[2], elements, grid, 300, 11, Exec::parallel);
    EXPECT_EQ(s.mu0, p.mu0);
    EXPECT_EQ(s.sigma_mu, p.sigma_mu);
  }
}

TEST(SerialParallel, ScenarioSweep) {
  const auto& sc = fixture::small_scenario();
  std::string serial = sweep_csv(run_sweep(sc.cfg, sc.library, sc.spectrum, Exec::serial));
  for (int threads : {1, 2, 8}) {
    ThreadCount tc(threads);
    EXPECT_EQ(sweep_csv(run_sweep(sc.cfg, sc.library, sc.spectrum, Exec::parallel)), serial) << threads;
  }
}

TEST(SerialParallel, MixtureEstimate) {
  gen::Rng rng(302);
  auto ens = gen::paired_ensemble(rng, 2, 1, 2, 1.0);
  auto s = estimate_mixture(ens, 30000, 5, Exec::serial);
  ThreadCount tc(5);
  auto p = estimate_mixture(ens, 30000, 5, Exec::parallel);
  EXPECT_EQ(s.mutual_information, p.mutual_information);
  EXPECT_EQ(s.mutual_information_se, p.mutual_information_se);
  EXPECT_EQ(s.bayes_error, p.bayes_error);
}
