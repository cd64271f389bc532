#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "fixtures.hpp"
#include "xtsi/cli.hpp"
#include "xtsi/distribution_io.hpp"

using namespace xtsi;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "xtsi");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string small_config(const fixture::TempDir& dir, const std::string& library = "") {
  auto d = fixture::data_dir();
  std::string cfg = "scenario {\n  n_pixels = 2\n  n_bag_pairs = 3\n  n_realizations = 100\n  grid_samples = 27\n"
                    "  n0 = 1e3, 1e6\n  seed = 5\n"
                    "  library = " + (library.empty() ? (d / "materials" / "synthetic_library.txt").string() : library) +
                    "\n  spectrum = " + (d / "spectra" / "kramers_160kvp.csv").string() +
                    "\n  elements = " + (d / "elements").string() + "\n}\n";
  auto path = dir / "config.txt";
  fixture::write(path, cfg);
  return path.string();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { ::unsetenv("XTSI_CACHE_DIR"); }
};

}  // namespace

TEST_F(CliTest, HelpListsFlags) {
  auto r = run({"sweep", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--config", "--library", "--spectrum", "--out", "--seed", "--threads", "--emit-plots",
                           "--variant", "--bins", "--corr-mode"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
}

TEST_F(CliTest, UnknownFlagIsAnError) {
  auto r = run({"sweep", "--frobnicate"});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_NE(run({}).code, 0);
}

TEST_F(CliTest, StatsCacheHitAndSelectiveRecompute) {
  fixture::TempDir dir;
  std::string lib_path = (dir / "lib.txt").string();
  fs::copy_file(fixture::data_dir() / "materials" / "synthetic_library.txt", lib_path);
  std::string cfg = small_config(dir, lib_path);
  std::string out = (dir / "out").string();

  auto first = run({"stats", "--config", cfg, "--out", out});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(std::count(first.out.begin(), first.out.end(), '\n'), 9);  // 8 computed + summary
  EXPECT_NE(first.out.find("8 recomputed"), std::string::npos) << first.out;

  auto second = run({"stats", "--config", cfg, "--out", out});
  ASSERT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("0 recomputed"), std::string::npos) << second.out;

  std::string lib = fixture::read(lib_path);
  auto pos = lib.find("density_mean = 1.03");  // milk
  ASSERT_NE(pos, std::string::npos);
  lib.replace(pos, 19, "density_mean = 1.04");
  fixture::write(lib_path, lib);
  auto third = run({"stats", "--config", cfg, "--out", out});
  ASSERT_EQ(third.code, 0);
  EXPECT_NE(third.out.find("1 recomputed"), std::string::npos) << third.out;
  EXPECT_NE(third.out.find("stats computed: milk"), std::string::npos) << third.out;
}

TEST_F(CliTest, CacheDirFromEnvironment) {
  fixture::TempDir dir;
  std::string cache = (dir / "elsewhere").string();
  ::setenv("XTSI_CACHE_DIR", cache.c_str(), 1);
  auto r = run({"stats", "--config", small_config(dir), "--out", (dir / "out").string()});
  ::unsetenv("XTSI_CACHE_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::distance(fs::directory_iterator(cache), fs::directory_iterator{}), 16);
  EXPECT_FALSE(fs::exists(dir / "out" / "cache"));
}

// The full shipped library at n = 1000 on a 27-sample grid. XTSI_UPDATE_GOLDEN=1
// rewrites the stored cache.
TEST_F(CliTest, GoldenStatsCache) {
  fixture::TempDir dir;
  auto d = fixture::data_dir();
  std::string cfg = "scenario {\n  n_realizations = 1000\n  grid_samples = 27\n  seed = 20190601\n"
                    "  library = " + (d / "materials" / "synthetic_library.txt").string() +
                    "\n  spectrum = " + (d / "spectra" / "kramers_160kvp.csv").string() +
                    "\n  elements = " + (d / "elements").string() + "\n}\n";
  fixture::write(dir / "config.txt", cfg);
  auto golden = fixture::golden_dir() / "stats_cache";
  if (std::getenv("XTSI_UPDATE_GOLDEN")) {
    fs::remove_all(golden);
    ::setenv("XTSI_CACHE_DIR", golden.c_str(), 1);
    ASSERT_EQ(run({"stats", "--config", (dir / "config.txt").string()}).code, 0);
    ::unsetenv("XTSI_CACHE_DIR");
  }
  auto r = run({"stats", "--config", (dir / "config.txt").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<fs::path> produced;
  for (const auto& e : fs::directory_iterator(dir / "out" / "cache")) produced.push_back(e.path().filename());
  std::sort(produced.begin(), produced.end());
  std::vector<fs::path> expected;
  for (const auto& e : fs::directory_iterator(golden)) expected.push_back(e.path().filename());
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(produced, expected);
  for (const auto& name : produced) {
    std::string f = name.string();
    if (f.size() < 8 || f.substr(f.size() - 8) != "_mu0.csv") continue;
    std::string stem = f.substr(0, f.size() - 8);
    auto now = load_material_stats((dir / "out" / "cache" / stem).string());
    auto ref = load_material_stats((golden / stem).string());
    EXPECT_TRUE(now.mu0.isApprox(ref.mu0, 1e-12)) << stem;
    EXPECT_LE((now.sigma_mu - ref.sigma_mu).cwiseAbs().maxCoeff(), 1e-10 * ref.sigma_mu.cwiseAbs().maxCoeff()) << stem;
  }
}

TEST_F(CliTest, SweepCardinalityPlotsAndDumps) {
  fixture::TempDir dir;
  std::string out = (dir / "out").string();
  auto r = run({"sweep", "--config", small_config(dir), "--out", out, "--emit-plots", "--dump-distributions",
                "--variant", "combined", "--bins", "1,2,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = fixture::read(fs::path(out) / "sweep.csv");
  // 2 budgets x 3 bin counts x 1 variant x 2 modes
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 12);
  std::string gp = fixture::read(fs::path(out) / "sweep_pe.gp");
  EXPECT_NE(gp.find("'sweep.csv'"), std::string::npos);
  EXPECT_NE(gp.find("combined 3 bins"), std::string::npos);
  auto dump = fs::path(out) / "distributions" / "n0_1000_bins_2_combined_correlated.csv";
  ASSERT_TRUE(fs::exists(dump));
  auto ens = read_ensemble_csv(dump.string());
  EXPECT_EQ(ens.members.size(), 6u);
  EXPECT_EQ(ens.members[0].distribution.n_bins(), 2);
}

TEST_F(CliTest, SweepRejectsBadInputs) {
  fixture::TempDir dir;
  auto bad_variant = run({"sweep", "--config", small_config(dir), "--out", (dir / "o").string(), "--variant", "both"});
  EXPECT_EQ(bad_variant.code, 2);
  EXPECT_NE(bad_variant.err.find("both"), std::string::npos);
  auto missing = run({"sweep", "--library", (dir / "nope.txt").string(), "--out", (dir / "o").string()});
  EXPECT_NE(missing.code, 0);
  EXPECT_NE(run({"sweep", "--config", (dir / "missing.txt").string()}).code, 0);
}

TEST_F(CliTest, SweepDeterministicAcrossThreads) {
  fixture::TempDir dir;
  std::string cfg = small_config(dir);
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", (dir / "a").string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", (dir / "b").string(), "--threads", "4"}).code, 0);
  EXPECT_EQ(fixture::read(dir / "a" / "sweep.csv"), fixture::read(dir / "b" / "sweep.csv"));
}

TEST_F(CliTest, ValidateCanonicalAndCorrupted) {
  fixture::TempDir dir;
  auto ok = run({"validate", "--samples", "100000", "--seed", "31", "--out", (dir / "v").string()});
  EXPECT_EQ(ok.code, 0) << ok.out;
  std::string report = fixture::read(dir / "v" / "oracle_report.txt");
  EXPECT_EQ(report, ok.out);
  EXPECT_NE(report.find("seed = 31"), std::string::npos);

  auto ens = cli::canonical_fixture();
  for (auto& m : ens.members) m.distribution.pixels[0].sigma_total(0, 0) = 1.0;
  write_ensemble_csv((dir / "bad.csv").string(), ens);
  auto bad = run({"validate", "--ensemble", (dir / "bad.csv").string(), "--samples", "100000"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("result = fail"), std::string::npos);
}

TEST_F(CliTest, BinEdgesAndVolumeRatio) {
  fixture::TempDir dir;
  std::string cfg = small_config(dir);
  auto edges = run({"bin-edges", "--config", cfg, "--bins", "2", "--out", (dir / "be").string()});
  ASSERT_EQ(edges.code, 0) << edges.err;
  EXPECT_EQ(edges.out.rfind("n_bins,edges_keV\n2,30,", 0), 0u) << edges.out;
  EXPECT_NE(edges.err.find("stats c"), std::string::npos) << edges.err;
  auto vr = run({"volume-ratio", "--config", cfg, "--bins", "1", "--out", (dir / "vr").string()});
  ASSERT_EQ(vr.code, 0) << vr.err;
  EXPECT_NE(vr.out.find("r>=1 in 12/12"), std::string::npos) << vr.out;
  EXPECT_TRUE(fs::exists(dir / "vr" / "volume_ratio.csv"));
}
