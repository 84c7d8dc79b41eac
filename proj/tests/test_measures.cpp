#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "dhj/error.hpp"
#include "dhj/io.hpp"
#include "dhj/measures.hpp"
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

// Equal-slices mass of one point from first principles: 1 / (#slices * #points in its slice).
Rational es_oracle(const Point& x) {
  const int n = x.n();
  const int k = static_cast<int>(x.value_counts().size());
  Integer slices = binomial(static_cast<unsigned long>(n + k - 1), static_cast<unsigned long>(k - 1));
  Integer same = 0;
  const CubeShape& s = CubeShape(k, n);
  auto target = x.value_counts();
  for (Index i = 0; i < s.size(); ++i)
    if (Point::from_index(s, i).value_counts() == target) ++same;
  Rational r(1, 1);
  r /= Rational(slices * same);
  return r;
}

std::map<Index, double> empirical(const CubeShape& s, int samples, const std::function<Point(Rng&)>& draw,
                                  std::uint64_t seed) {
  Rng rng(seed);
  std::map<Index, double> f;
  for (int i = 0; i < samples; ++i) f[draw(rng).index()] += 1.0 / samples;
  return f;
}

double empirical_tv(const Distribution& d, const std::map<Index, double>& f) {
  double tv = 0;
  for (Index i = 0; i < d.shape().size(); ++i) {
    auto it = f.find(i);
    tv += std::abs(to_double(d[i]) - (it == f.end() ? 0.0 : it->second));
  }
  return tv / 2;
}

}  // namespace

TEST(SliceCount, Examples) {
  EXPECT_EQ(slice_count(CubeShape(3, 2)), 6);
  EXPECT_EQ(slice_count(CubeShape(1, 7)), 1);
  EXPECT_EQ(slice_count(CubeShape(2, 3)), 4);
  int visited = 0;
  for_each_slice(CubeShape(3, 4), [&](std::span<const int> c) {
    EXPECT_EQ(c[0] + c[1] + c[2], 4);
    ++visited;
  });
  EXPECT_EQ(visited, 15);
}

TEST(EqualSlices, PointExamples) {
  CubeShape s(2, 2);
  EXPECT_EQ(equal_slices_prob(Point::parse(s, "12")), q(1, 6));
  EXPECT_EQ(equal_slices_prob(Point::parse(s, "11")), q(1, 3));
}

TEST(EqualSlices, MatchesCountingOracle) {
  for (int k = 1; k <= 3; ++k)
    for (int n = 1; n <= 4; ++n) {
      CubeShape s(k, n);
      for (Index i = 0; i < s.size(); ++i) {
        Point p = Point::from_index(s, i);
        ASSERT_EQ(equal_slices_prob(p), es_oracle(p)) << p.str();
      }
    }
}

TEST(EqualSlices, SlicesHaveEqualMass) {
  CubeShape s(3, 4);
  std::map<std::vector<int>, Rational> mass;
  for (Index i = 0; i < s.size(); ++i) {
    Point p = Point::from_index(s, i);
    mass[p.value_counts()] += equal_slices_prob(p);
  }
  EXPECT_EQ(mass.size(), 15u);
  for (const auto& [c, m] : mass) EXPECT_EQ(m, q(1, 15));
}

TEST(EqualSlices, SetMeasures) {
  CubeShape s(2, 2);
  EXPECT_EQ(equal_slices_measure(set_of(s, {"11", "22"})), q(2, 3));
  for (int n = 2; n <= 4; ++n) {
    auto full = CubeSet::full(CubeShape(2, n));
    EXPECT_EQ(equal_slices_measure(full), 1);
    EXPECT_EQ(nondegenerate_equal_slices_measure(full), 1);
    EXPECT_EQ(uniform_measure(full), 1);
  }
  EXPECT_THROW(nondegenerate_equal_slices_measure(CubeSet(CubeShape(3, 2))), InvalidArgument);
}

TEST(Nondegenerate, IsConditionedEqualSlices) {
  for (int k = 1; k <= 3; ++k)
    for (int n = k; n <= 5; ++n) {
      CubeShape s(k, n);
      Rational live = 0;
      for (Index i = 0; i < s.size(); ++i) {
        Point p = Point::from_index(s, i);
        if (p.has_all_values()) live += equal_slices_prob(p);
      }
      for (Index i = 0; i < s.size(); ++i) {
        Point p = Point::from_index(s, i);
        Rational want = p.has_all_values() ? equal_slices_prob(p) / live : Rational(0);
        ASSERT_EQ(nondegenerate_prob(p), want);
      }
    }
}

TEST(Nondegenerate, DegeneracyBoundOnRandomSets) {
  CubeShape s(3, 12);
  Rng rng(33);
  const Rational bound = q(9, 12);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_set(s, rng, static_cast<unsigned>(rng.below(101)));
    Rational gap = abs(equal_slices_measure(a) - nondegenerate_equal_slices_measure(a));
    ASSERT_LE(gap, bound);
  }
}

TEST(DegenerateProb, Examples) {
  EXPECT_EQ(degenerate_prob(CubeShape(3, 4)), q(1, 3));
  EXPECT_EQ(degenerate_prob(CubeShape(1, 5)), 0);
  auto no3 = CubeSet::from_predicate(CubeShape(3, 4), [](const Point& p) { return p.value_counts()[2] == 0; });
  EXPECT_EQ(equal_slices_measure(no3), q(1, 3));
}

TEST(DegenerateProb, MissingAnyValue) {
  for (int k = 2; k <= 4; ++k)
    for (int n = 1; n <= 8; ++n) {
      auto b = missing_value_prob(CubeShape(k, n));
      EXPECT_TRUE(b.holds());
      EXPECT_EQ(b.bound, q(k * (k - 1), n + k - 1));
    }
}

TEST(FewValues, Examples) {
  auto b = few_k_prob_bound(CubeShape(2, 10), 2);
  EXPECT_EQ(b.exact, q(2, 11));
  EXPECT_EQ(b.bound, q(2, 5));
  EXPECT_TRUE(b.holds());
  EXPECT_TRUE(b.precondition_met);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(few_k_prob_bound(CubeShape(3, n), 1).exact, degenerate_prob(CubeShape(3, n)));
  auto c = few_any_prob_bound(CubeShape(3, 20), 2);
  EXPECT_TRUE(c.holds());
  EXPECT_EQ(c.bound, q(18, 20));
  EXPECT_THROW(few_k_prob_bound(CubeShape(2, 3), 0), InvalidArgument);
}

TEST(FewValues, PreconditionedInequalityHolds) {
  for (int k = 2; k <= 4; ++k)
    for (int n = 1; n <= 14; ++n)
      for (int m = 1; m <= n; ++m) {
        auto b = few_k_prob_bound(CubeShape(k, n), m);
        if (b.precondition_met) EXPECT_TRUE(b.holds()) << k << " " << n << " " << m;
        auto c = few_any_prob_bound(CubeShape(k, n), m);
        if (c.precondition_met) EXPECT_TRUE(c.holds()) << k << " " << n << " " << m;
      }
}

TEST(Samplers, SingleCoordinateIsUniform) {
  CubeShape s(3, 1);
  auto f = empirical(s, 30000, [&](Rng& r) { return sample_equal_slices(s, r); }, 2);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(f[i], 1.0 / 3, 0.02);
}

TEST(Samplers, EqualSlicesLaw) {
  CubeShape s(3, 3);
  auto f = empirical(s, 200000, [&](Rng& r) { return sample_equal_slices(s, r); }, 3);
  EXPECT_LT(empirical_tv(equal_slices_distribution(s), f), 0.02);
}

TEST(Samplers, NondegenerateLawBothConstructions) {
  CubeShape s(3, 4);
  auto exact = nondegenerate_distribution(s);
  auto circle = empirical(s, 200000, [&](Rng& r) { return sample_nondegenerate(s, r); }, 4);
  auto pegs = empirical(s, 200000, [&](Rng& r) { return sample_nondegenerate_pegs(s, r); }, 5);
  EXPECT_LT(empirical_tv(exact, circle), 0.02);
  EXPECT_LT(empirical_tv(exact, pegs), 0.02);
  for (const auto& [i, p] : circle) EXPECT_TRUE(Point::from_index(s, i).has_all_values());
  Rng rng(1);
  EXPECT_THROW(sample_nondegenerate(CubeShape(3, 2), rng), InvalidArgument);
}

TEST(Samplers, Reproducible) {
  CubeShape s(3, 6);
  Rng a(77);
  Rng b(77);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_equal_slices(s, a), sample_equal_slices(s, b));
}

TEST(SpecialSubspace, ExtremeDimensions) {
  Rng rng(8);
  CubeShape s(3, 4);
  auto whole = sample_special_subspace(s, 1, rng);
  EXPECT_EQ(whole.str(), "****");
  std::map<std::string, int> seen;
  for (int i = 0; i < 24000; ++i) {
    auto v = sample_special_subspace(s, 4, rng);
    EXPECT_TRUE(v.fixed().empty());
    ++seen[v.str()];
  }
  EXPECT_EQ(seen.size(), 24u);
  for (const auto& [key, c] : seen) EXPECT_NEAR(c, 1000, 150);
  EXPECT_THROW(sample_special_subspace(s, 5, rng), InvalidArgument);
}

TEST(SpecialSubspace, ComposedLawIsNondegenerate) {
  for (auto [k, d, n] : {std::tuple{2, 2, 5}, {2, 3, 6}, {3, 3, 6}, {2, 2, 4}})
    EXPECT_EQ(special_subspace_composed_law(CubeShape(k, n), d), nondegenerate_distribution(CubeShape(k, n)));
  EXPECT_THROW(special_subspace_composed_law(CubeShape(3, 5), 2), InvalidArgument);
}

TEST(SpecialSubspace, TamperedProbabilityBreaksTheIdentity) {
  // The multinomial in the denominator is off by one.
  PointProbFn off = [](const CubeShape& s, std::span<const int> counts) -> Rational {
    Rational p = nondegenerate_prob(s, counts);
    Integer multi = multinomial(static_cast<unsigned long>(s.n()), counts);
    return p * Rational(multi) / Rational(multi + 1);
  };
  auto composed = special_subspace_composed_law(CubeShape(2, 5), 2, off);
  EXPECT_NE(composed, nondegenerate_distribution(CubeShape(2, 5)));
}

TEST(TotalVariation, Examples) {
  CubeShape s(2, 2);
  auto u = uniform_distribution(s);
  EXPECT_EQ(tv_distance(u, u), 0);
  EXPECT_EQ(tv_distance(point_mass(s, 0), point_mass(s, 3)), 1);
  CubeShape one(2, 1);
  EXPECT_EQ(tv_distance(uniform_distribution(one), point_mass(one, 0)), q(1, 2));
  EXPECT_THROW(tv_distance(u, uniform_distribution(one)), InvalidArgument);
}

TEST(TotalVariation, EqualsMaxOverEvents) {
  Rng rng(6);
  CubeShape s(2, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rational> p(s.size()), r(s.size());
    Rational tp = 0, tr = 0;
    for (Index i = 0; i < s.size(); ++i) {
      p[i] = Rational(static_cast<long>(rng.below(5)));
      r[i] = Rational(static_cast<long>(rng.below(5) + 1));
      tp += p[i];
      tr += r[i];
    }
    if (tp == 0) continue;
    for (auto& v : p) v /= tp;
    for (auto& v : r) v /= tr;
    Distribution a(s, p), b(s, r);
    Rational best = 0;
    for (Index mask = 0; mask < (Index{1} << s.size()); ++mask) {
      CubeSet e(s);
      e.words()[0] = mask;
      best = std::max<Rational>(best, abs(a.measure(e) - b.measure(e)));
    }
    EXPECT_EQ(tv_distance(a, b), best);
  }
}

TEST(TransferRatio, ExamplesAndBounds) {
  EXPECT_EQ(transfer_ratio(5, 3, 1), q(7, 5));
  for (int n = 2; n <= 9; ++n)
    for (int m = 1; m < n; ++m) {
      EXPECT_EQ(transfer_ratio(n, 1, m), 1);
      for (int k = 1; k <= 4; ++k) {
        Rational r = transfer_ratio(n, k, m);
        Rational cap = 1;
        for (int i = 0; i < m; ++i) cap *= 1 + q(k, n - m);
        EXPECT_GE(r, 1);
        EXPECT_LE(r, cap);
      }
    }
  EXPECT_THROW(transfer_ratio(3, 2, 3), InvalidArgument);
}

TEST(ComposedRestriction, UniformAnchor) {
  for (auto [k, n, m] : {std::tuple{2, 3, 1}, {3, 4, 2}, {2, 5, 3}}) {
    CubeShape s(k, n);
    auto d = composed_restriction_distribution(s, m, uniform_distribution(CubeShape(k, m)), YLaw::uniform);
    EXPECT_EQ(d, uniform_distribution(s));
  }
}

TEST(ComposedRestriction, SmallerAlphabetTinyCase) {
  // J is one of the two coordinates, x_J = 1 and y uniform on the other one.
  CubeShape s(2, 2);
  auto d = composed_restriction_distribution(s, 1, uniform_distribution(CubeShape(1, 1)), YLaw::uniform);
  EXPECT_EQ(d[Point::parse(s, "11").index()], q(1, 2));
  EXPECT_EQ(d[Point::parse(s, "12").index()], q(1, 4));
  EXPECT_EQ(d[Point::parse(s, "21").index()], q(1, 4));
  EXPECT_EQ(d[Point::parse(s, "22").index()], 0);
  EXPECT_EQ(tv_distance(d, uniform_distribution(s)), q(1, 4));
}

TEST(ComposedRestriction, PerPointRatio) {
  for (auto [n, k, m] : {std::tuple{3, 2, 1}, {4, 2, 1}, {5, 3, 1}, {5, 2, 2}, {6, 3, 2}}) {
    CubeShape s(k, n);
    auto d = composed_restriction_distribution(s, m, uniform_distribution(CubeShape(k, m)), YLaw::equal_slices);
    EXPECT_EQ(d.total(), 1);
    Rational r = transfer_ratio(n, k, m);
    for (Index z = 0; z < s.size(); ++z) {
      Point p = Point::from_index(s, z);
      auto c = p.value_counts();
      if (*std::min_element(c.begin(), c.end()) >= m) ASSERT_EQ(d[z], r * equal_slices_prob(p));
    }
  }
  EXPECT_EQ(transfer_ratio(3, 2, 1), q(4, 3));
}

TEST(Intersections, CauchySchwarzOnRandomFamilies) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    CubeShape s(2 + static_cast<int>(rng.below(2)), 3);
    std::vector<CubeSet> family;
    int size = 2 + static_cast<int>(rng.below(8));
    for (int g = 0; g < size; ++g) family.push_back(random_set(s, rng, static_cast<unsigned>(rng.below(101))));
    Rational delta = 0, pair = 0;
    for (const auto& x : family) delta += x.density();
    delta /= size;
    for (const auto& x : family)
      for (const auto& y : family) pair += (x & y).density();
    pair /= size * size;
    EXPECT_GE(pair, delta * delta);
  }
}

TEST(DistributionJson, RoundTrip) {
  auto d = equal_slices_distribution(CubeShape(3, 2));
  auto j = distribution_to_json(d);
  EXPECT_EQ(j["probs"]["12"], "1/12");
  EXPECT_EQ(distribution_from_json(j), d);
  EXPECT_THROW(distribution_from_json(Json::parse(R"({"k":2,"n":1,"probs":{"1":"1/3"}})")), InvalidArgument);
}

TEST(Normalization, AllSmallShapes) {
  for (int k = 1; k <= 9; ++k)
    for (int n = 1; n <= 16; ++n) {
      auto size = checked_pow(static_cast<Index>(k), n);
      if (!size || *size > 6561) continue;
      EXPECT_EQ(equal_slices_distribution(CubeShape(k, n)).total(), 1) << k << "^" << n;
    }
}
