#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "xtsi/distribution_io.hpp"
#include "xtsi/error.hpp"

using namespace xtsi;

namespace {

void expect_same(const EnsembleSpec& a, const EnsembleSpec& b) {
  ASSERT_EQ(a.members.size(), b.members.size());
  EXPECT_EQ(a.pairing, b.pairing);
  for (std::size_t k = 0; k < a.members.size(); ++k) {
    const auto& x = a.members[k];
    const auto& y = b.members[k];
    EXPECT_EQ(x.weight, y.weight);
    EXPECT_EQ(x.label, y.label);
    ASSERT_EQ(x.distribution.n_pixels(), y.distribution.n_pixels());
    for (int n = 0; n < x.distribution.n_pixels(); ++n) {
      const auto& p = x.distribution.pixels[static_cast<std::size_t>(n)];
      const auto& q = y.distribution.pixels[static_cast<std::size_t>(n)];
      EXPECT_EQ(p.jd0, q.jd0);
      EXPECT_EQ(p.sigma_material, q.sigma_material);
      EXPECT_EQ(p.sigma_total, q.sigma_total);
      EXPECT_EQ(p.low_count, q.low_count);
      EXPECT_EQ(p.nonlinear, q.nonlinear);
    }
  }
}

}  // namespace

TEST(EnsembleCsv, RoundTripIsBitExact) {
  gen::Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    auto ens = gen::paired_ensemble(rng, gen::integer(rng, 1, 4), gen::integer(rng, 1, 3), gen::integer(rng, 1, 4), 2.0);
    ens.members[0].distribution.pixels[0].nonlinear = true;
    if (trial % 2) ens.pairing.reset();
    expect_same(parse_ensemble_csv(ensemble_csv(ens), "rt.csv"), ens);
  }
}

TEST(EnsembleCsv, FileRoundTrip) {
  fixture::TempDir dir;
  gen::Rng rng(2);
  auto ens = gen::paired_ensemble(rng, 2, 2, 2, 1.0);
  write_ensemble_csv((dir / "e.csv").string(), ens);
  expect_same(read_ensemble_csv((dir / "e.csv").string()), ens);
}

TEST(EnsembleCsv, Rejections) {
  EXPECT_THROW(parse_ensemble_csv("object,weight\n", "h.csv"), ParseError);
  std::string base = std::string(kEnsembleHeader) + "\n";
  // Wrong matrix size.
  EXPECT_THROW(parse_ensemble_csv(base + "0,threat,1,-1,0,jd0,5\n0,threat,1,-1,0,sigma_material,1,2\n"
                                         "0,threat,1,-1,0,sigma_total,6\n0,threat,1,-1,0,flags,0,0\n",
                                  "m.csv"),
               ParseError);
  // A single class is not a valid ensemble.
  EXPECT_THROW(parse_ensemble_csv(base + "0,threat,1,-1,0,jd0,5\n0,threat,1,-1,0,sigma_material,1\n"
                                         "0,threat,1,-1,0,sigma_total,6\n0,threat,1,-1,0,flags,0,0\n",
                                  "c.csv"),
               ValidationError);
  EXPECT_THROW(parse_ensemble_csv(base + "0,threat,1,-1,0,bogus,5\n", "f.csv"), ParseError);
  EXPECT_THROW(parse_ensemble_csv(base + "0,threat,x,-1,0,jd0,5\n", "n.csv"), ParseError);
}
