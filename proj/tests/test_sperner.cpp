#include <gtest/gtest.h>

#include "dhj/error.hpp"
#include "dhj/measures.hpp"
#include "dhj/sperner.hpp"
#include "support.hpp"

using namespace dhj;
using dhj::testing::random_set;
using dhj::testing::set_of;

namespace {

Rational q(long p, long r) {
  Rational x(p, r);
  x.canonicalize();
  return x;
}

CubeSet layer(int n, int size) {
  return CubeSet::from_predicate(CubeShape(2, n), [&](const Point& p) { return p.value_counts()[1] == size; });
}

// Line density computed pattern by pattern over [3]^n with equal-slices weights.
Rational line_density_oracle(const CubeSet& a) {
  const int n = a.shape().n();
  CubeShape enc(3, n);
  Rational total = 0;
  for (Index y = 0; y < enc.size(); ++y) {
    Point p = Point::from_index(enc, y);
    auto l = LinePattern::from_point(p);
    bool inside = true;
    for (Index i : l.point_indices()) inside = inside && a.contains(i);
    if (inside) total += equal_slices_prob(p);
  }
  return total;
}

}  // namespace

TEST(Antichain, Examples) {
  EXPECT_TRUE(is_antichain(layer(4, 2)));
  EXPECT_FALSE(is_antichain(set_of(CubeShape(2, 1), {"1", "2"})));
  EXPECT_THROW(is_antichain(CubeSet(CubeShape(3, 2))), InvalidArgument);
}

TEST(Antichain, EquivalentToLineFreeExhaustively) {
  CubeShape s(2, 3);
  for (Index mask = 0; mask < 256; ++mask) {
    CubeSet a(s);
    a.words()[0] = mask;
    ASSERT_EQ(is_antichain(a), !find_line_in_set(a).has_value()) << mask;
  }
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    CubeShape t(2, 4 + static_cast<int>(rng.below(7)));
    auto a = random_set(t, rng, static_cast<unsigned>(1 + rng.below(6)));
    ASSERT_EQ(is_antichain(a), !find_line_in_set(a).has_value());
  }
}

TEST(SpernerBound, Values) {
  EXPECT_EQ(sperner_bound(4), 6);
  EXPECT_EQ(sperner_bound(1), 1);
  EXPECT_EQ(sperner_bound(10), 252);
}

TEST(ChainHit, Examples) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(chain_hit_probability(CubeSet::full(CubeShape(2, n))), 1);
    for (int m = 0; m <= n; ++m) EXPECT_EQ(chain_hit_probability(layer(n, m)), q(1, n + 1));
  }
}

TEST(ChainHit, EqualsEqualSlicesAndLYM) {
  CubeShape s(2, 4);
  const Rational cap = q(1, 5);
  for (Index mask = 0; mask < (Index{1} << 16); ++mask) {
    CubeSet a(s);
    a.words()[0] = mask;
    Rational hit = chain_hit_probability(a);
    if ((mask & 0x3ff) == 0) ASSERT_EQ(hit, equal_slices_measure(a));
    if (is_antichain(a)) ASSERT_LE(hit, cap) << mask;
  }
}

TEST(LineDensity, Examples) {
  auto s = probabilistic_sperner_density(set_of(CubeShape(2, 2), {"11", "22"}));
  EXPECT_EQ(s.delta, q(2, 3));
  EXPECT_EQ(s.line_density, q(1, 2));
  EXPECT_EQ(s.bound, q(1, 3));
  EXPECT_TRUE(s.holds());
  for (int n = 1; n <= 6; ++n) {
    auto f = probabilistic_sperner_density(CubeSet::full(CubeShape(2, n)));
    EXPECT_EQ(f.line_density, 1);
    EXPECT_EQ(f.bound, q(n + 1, n + 2));
  }
}

TEST(LineDensity, MatchesPatternOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    CubeShape s(2, 1 + static_cast<int>(rng.below(5)));
    auto a = random_set(s, rng, static_cast<unsigned>(rng.below(101)));
    auto d = probabilistic_sperner_density(a);
    ASSERT_EQ(d.line_density, line_density_oracle(a));
    ASSERT_EQ(d.delta, equal_slices_measure(a));
  }
}

TEST(LineDensity, ExhaustiveAtThree) {
  LineDensityTable table(3);
  CubeShape s(2, 3);
  for (Index mask = 0; mask < 256; ++mask) {
    CubeSet a(s);
    a.words()[0] = mask;
    ASSERT_TRUE(table.evaluate(a).holds()) << mask;
  }
}

TEST(LineDensity, RandomSetsUpToEight) {
  Rng rng(13);
  for (int n = 4; n <= 8; ++n) {
    LineDensityTable table(n);
    for (int trial = 0; trial < 2000; ++trial) {
      auto a = random_set(CubeShape(2, n), rng, static_cast<unsigned>(rng.below(101)));
      ASSERT_TRUE(table.evaluate(a).holds());
    }
  }
}

TEST(Refine, FullCubeSucceeds) {
  auto r = multidim_sperner_refine(CubeSet::full(CubeShape(2, 4)), {.d = 1, .rng = nullptr});
  ASSERT_TRUE(r.subspace);
  EXPECT_EQ(r.subspace->dim(), 1);
}

TEST(Refine, AgreesWithExhaustiveSearch) {
  Rng rng(14);
  CubeShape s(2, 8);
  int successes = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto a = random_set(s, rng, static_cast<unsigned>(50 + rng.below(45)));
    auto exhaustive = find_subspace_in_set(a, 2);
    for (bool randomized : {false, true}) {
      Rng local(static_cast<std::uint64_t>(trial));
      auto r = multidim_sperner_refine(a, {.d = 2, .rng = randomized ? &local : nullptr});
      if (r.subspace) {
        ++successes;
        EXPECT_EQ(r.subspace->dim(), 2);
        for (Index p : r.subspace->point_indices()) ASSERT_TRUE(a.contains(p));
      }
      if (!exhaustive) EXPECT_FALSE(r.subspace);
      EXPECT_FALSE(r.stages.empty());
    }
  }
  EXPECT_GT(successes, 0);
}

TEST(Refine, RejectsInfeasibleBlocks) {
  EXPECT_THROW(multidim_sperner_refine(CubeSet::full(CubeShape(2, 3)), {.d = 3, .rng = nullptr}), InvalidArgument);
}
