// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "xtsi/info_bounds.hpp"
#include "xtsi/material_model.hpp"
#include "xtsi/mc_validate.hpp"
#include "xtsi/scenario.hpp"

using namespace xtsi;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

const std::string data(const char* rel) { return std::string(XTSI_DATA_DIR) + "/" + rel; }

std::vector<ObjectDistribution> random_objects(int count, int n, int m) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(500.0, 5000.0);
  std::vector<ObjectDistribution> out;
  for (int k = 0; k < count; ++k) {
    ObjectDistribution o;
    for (int p = 0; p < n; ++p) {
      Vector jd0(m);
      for (int i = 0; i < m; ++i) jd0[i] = u(rng);
      Vector v = jd0 * 0.02;
      o.pixels.push_back(combine_shot_noise(jd0, v * v.transpose() + Matrix::Identity(m, m)));
    }
    out.push_back(std::move(o));
  }
  return out;
}

void BM_PairwiseTables(benchmark::State& state) {
  std::vector<PreparedObject> objs;
  for (const auto& o : random_objects(320, 10, 3)) objs.emplace_back(o);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_tables(objs, exec_of(state)));
}
BENCHMARK(BM_PairwiseTables)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MaterialStats(benchmark::State& state) {
  EnergyGrid grid = EnergyGrid::standard();
  auto elements = load_element_directory(data("elements"), grid);
  auto defs = load_material_library(data("materials/synthetic_library.txt"));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_material_stats(defs[0], elements, grid, 1000, 1, exec_of(state)));
}
BENCHMARK(BM_MaterialStats)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MixtureEstimate(benchmark::State& state) {
  EnsembleSpec ens;
  auto objs = random_objects(4, 2, 2);
  for (int k = 0; k < 4; ++k)
    ens.members.push_back({objs[static_cast<std::size_t>(k)], 0.25,
                           k % 2 ? ClassLabel::non_threat : ClassLabel::threat});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_mixture(ens, 100000, 3, exec_of(state)));
}
BENCHMARK(BM_MixtureEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
