#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "xtsi/spectral_data.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(XTSI_DATA_DIR); }
inline fs::path golden_dir() { return fs::path(XTSI_GOLDEN_DIR); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("xtsi-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

inline std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Element CSV for a power law μ/ρ = a (E / 30)^-b on [lo, hi].
inline std::string power_law_element(const std::string& symbol, double density, double a, double b, double lo = 1.0,
                                      double hi = 200.0, int n = 40) {
  std::string s = "# symbol=" + symbol + " density_g_cm3=" + xtsi::text::format_exact(density) + "\n";
  s += "energy_keV,mu_over_rho_cm2_g\n";
  for (int i = 0; i < n; ++i) {
    double e = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    s += xtsi::text::format_exact(e) + "," + xtsi::text::format_exact(a * std::pow(e / 30.0, -b)) + "\n";
  }
  return s;
}

}  // namespace fixture
