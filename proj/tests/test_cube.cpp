#include <gtest/gtest.h>

#include <set>

#include "dhj/cube.hpp"
#include "dhj/error.hpp"
#include "dhj/io.hpp"
#include "support.hpp"

using namespace dhj;
using dhj::testing::insensitive_oracle;
using dhj::testing::random_set;
using dhj::testing::set_of;

TEST(Shape, RejectsOverflowAndBadParameters) {
  EXPECT_THROW(CubeShape(3, 50), InvalidArgument);
  EXPECT_THROW(CubeShape(0, 2), InvalidArgument);
  EXPECT_THROW(CubeShape(2, 0), InvalidArgument);
  EXPECT_EQ(CubeShape(3, 4).size(), 81u);
}

TEST(PointIndex, Examples) {
  CubeShape s(2, 2);
  EXPECT_EQ(Point::parse(s, "11").index(), 0u);
  EXPECT_EQ(Point::parse(s, "22").index(), 3u);
  EXPECT_EQ(Point::parse(CubeShape(3, 2), "21").index(), 3u);
  EXPECT_THROW(Point::from_index(s, 4), InvalidArgument);
  EXPECT_THROW(Point::parse(s, "13"), InvalidArgument);
}

TEST(PointIndex, RoundTrip) {
  for (int k = 1; k <= 4; ++k)
    for (int n = 1; n <= 4; ++n) {
      CubeShape s(k, n);
      for (Index i = 0; i < s.size(); ++i) {
        Point p = Point::from_index(s, i);
        ASSERT_EQ(p.index(), i);
        ASSERT_EQ(Point::parse(s, p.str()), p);
      }
    }
}

TEST(LinePoints, DisplayedExample) {
  CubeShape s(3, 8);
  auto pts = LinePattern::parse(s, "*3*22*12").points();
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].str(), "13122112");
  EXPECT_EQ(pts[1].str(), "23222212");
  EXPECT_EQ(pts[2].str(), "33322312");
}

TEST(LinePoints, DegenerateAndFull) {
  CubeShape s(3, 2);
  auto l = LinePattern::parse(s, "12");
  EXPECT_TRUE(l.degenerate());
  for (const auto& p : l.points()) EXPECT_EQ(p.str(), "12");
  auto full = LinePattern::parse(CubeShape(3, 1), "*").points();
  EXPECT_EQ(full[0].str(), "1");
  EXPECT_EQ(full[1].str(), "2");
  EXPECT_EQ(full[2].str(), "3");
}

TEST(LineEncoding, FromPoint) {
  auto y = Point::parse(CubeShape(3, 3), "313");
  EXPECT_EQ(LinePattern::from_point(y).str(), "*1*");
}

TEST(LineEncoding, BijectionAndCounts) {
  for (int k = 1; k <= 3; ++k)
    for (int n = 1; n <= 4; ++n) {
      CubeShape enc(k + 1, n);
      CubeShape s(k, n);
      Index nondeg = 0;
      std::set<std::string> seen;
      for (Index y = 0; y < enc.size(); ++y) {
        Point p = Point::from_index(enc, y);
        auto l = LinePattern::from_point(p);
        ASSERT_EQ(l.to_point(), p);
        seen.insert(l.str());
        if (!l.degenerate()) ++nondeg;
        // Re-encoding the line's points is consistent with the pattern.
        auto pts = l.points();
        for (int j = 0; j < k; ++j)
          for (int i = 0; i < n; ++i)
            ASSERT_EQ(pts[static_cast<std::size_t>(j)][i], l[i] == kWildcard ? j + 1 : l[i]);
      }
      EXPECT_EQ(seen.size(), enc.size());
      EXPECT_EQ(nondeg, enc.size() - s.size());
    }
}

TEST(Subspace, EmbedExample) {
  CubeShape s(3, 3);
  auto v = Subspace::from_parts(s, {{1, 3}}, {{0, 2}});
  EXPECT_EQ(v.embed(Point::parse(CubeShape(3, 1), "2")).str(), "232");
  EXPECT_EQ(v.str(), "*3*");
}

TEST(Subspace, IdentityAndInjective) {
  CubeShape s(3, 3);
  auto id = Subspace::identity(s);
  for (Index i = 0; i < s.size(); ++i) EXPECT_EQ(id.embed_index(i), i);
  auto v = Subspace::parse(CubeShape(3, 5), "a1bba");
  auto pts = v.point_indices();
  EXPECT_EQ(pts.size(), 9u);
  EXPECT_EQ(std::set<Index>(pts.begin(), pts.end()).size(), 9u);
  EXPECT_THROW(v.embed(Point::parse(CubeShape(3, 3), "111")), InvalidArgument);
}

TEST(Subspace, InvalidTemplates) {
  CubeShape s(3, 3);
  EXPECT_THROW(Subspace(s, 2, {1, 4, 4}), InvalidArgument);  // W_2 empty
  EXPECT_THROW(Subspace(s, 0, {1, 2, 3}), InvalidArgument);
}

TEST(Subspace, Compose) {
  CubeShape s(2, 4);
  auto outer = Subspace::parse(s, "ab1b");
  auto inner = Subspace::parse(outer.param_shape(), "*2");
  auto c = outer.compose(inner);
  EXPECT_EQ(c.str(), "*212");
  for (Index z = 0; z < inner.param_shape().size(); ++z)
    EXPECT_EQ(c.embed_index(z), outer.embed_index(inner.embed_index(z)));
}

TEST(ValueSubstitute, Examples) {
  CubeShape s3(3, 4);
  EXPECT_EQ(value_substitute(Point::parse(s3, "1231"), 1, 2).str(), "2232");
  EXPECT_EQ(value_substitute(Point::parse(CubeShape(3, 2), "33"), 3, 1).str(), "11");
  for (Index i = 0; i < s3.size(); ++i) {
    Point p = Point::from_index(s3, i);
    for (int v = 1; v <= 3; ++v) EXPECT_EQ(value_substitute(p, v, v), p);
    auto once = value_substitute(p, 1, 3);
    EXPECT_EQ(value_substitute(once, 1, 3), once);
  }
}

TEST(Insensitive, Examples) {
  for (int n = 1; n <= 3; ++n) {
    auto full = CubeSet::full(CubeShape(3, n));
    EXPECT_TRUE(is_ij_insensitive(full, 1, 2));
    EXPECT_TRUE(is_ij_insensitive(full, 2, 3));
    auto one = CubeSet::from_predicate(CubeShape(3, n), [](const Point& p) { return p[0] == 1; });
    EXPECT_TRUE(is_ij_insensitive(one, 2, 3));
    EXPECT_FALSE(is_ij_insensitive(one, 1, 2));
  }
}

TEST(Insensitive, WorkedExampleFromPartitionSection) {
  CubeShape s(3, 3);
  CubeSet d(s);
  for (const char* u : {"11", "22", "23", "32", "33"})
    for (const char* t : {"2", "3"}) d.insert(Point::parse(s, std::string(u) + t).index());
  EXPECT_TRUE(is_ij_insensitive(d, 2, 3));
  CubeSet removed = d;
  for (const char* u : {"11", "22", "33"})
    for (const char* t : {"1", "2", "3"}) removed.erase(Point::parse(s, std::string(u) + t).index());
  EXPECT_EQ(removed, set_of(s, {"232", "233", "322", "323"}));
  EXPECT_FALSE(is_ij_insensitive(removed, 2, 3));
}

TEST(Insensitive, AgreesWithOrbitOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    CubeShape s(3, 1 + static_cast<int>(rng.below(4)));
    // Unions of orbits are insensitive; random sets mostly are not.
    CubeSet a(s);
    if (trial % 2 == 0) {
      a = random_set(s, rng);
    } else {
      std::vector<bool> pick(s.size());
      for (Index i = 0; i < s.size(); ++i) pick[i] = rng.coin();
      for (Index x = 0; x < s.size(); ++x) {
        auto p = Point::from_index(s, x);
        std::vector<int> dg(p.digits().begin(), p.digits().end());
        for (int& v : dg)
          if (v == 3) v = 2;
        if (pick[Point(s, dg).index()]) a.insert(x);
      }
    }
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        if (i != j) ASSERT_EQ(is_ij_insensitive(a, i, j), insensitive_oracle(a, i, j));
  }
}

namespace {

// For each ordered pair of distinct points, decide whether they are two
// points of a common line lying in A.
bool quadratic_line_oracle(const CubeSet& a) {
  const CubeShape& s = a.shape();
  auto idx = a.indices();
  for (Index x : idx)
    for (Index y : idx) {
      if (x == y) continue;
      auto px = Point::from_index(s, x);
      auto py = Point::from_index(s, y);
      int vx = 0;
      int vy = 0;
      bool ok = true;
      std::vector<int> pattern(static_cast<std::size_t>(s.n()));
      for (int i = 0; i < s.n() && ok; ++i) {
        if (px[i] == py[i]) {
          pattern[static_cast<std::size_t>(i)] = px[i];
          continue;
        }
        if (vx == 0) {
          vx = px[i];
          vy = py[i];
        }
        ok = px[i] == vx && py[i] == vy;
        pattern[static_cast<std::size_t>(i)] = kWildcard;
      }
      if (!ok) continue;
      LinePattern l(s, pattern);
      bool inside = true;
      for (Index p : l.point_indices()) inside = inside && a.contains(p);
      if (inside) return true;
    }
  return false;
}

}  // namespace

TEST(FindLine, Examples) {
  CubeShape s(3, 1);
  EXPECT_EQ(find_line_in_set(CubeSet::full(s))->str(), "*");
  EXPECT_FALSE(find_line_in_set(set_of(s, {"1", "2"})));
  EXPECT_FALSE(find_line_in_set(CubeSet(s)));
  // Degenerate lines only when asked for.
  auto one = set_of(CubeShape(3, 2), {"12"});
  EXPECT_FALSE(find_line_in_set(one));
  EXPECT_EQ(find_line_in_set(one, {.include_degenerate = true})->str(), "12");
}

TEST(FindLine, AgreesWithQuadraticOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 400; ++trial) {
    CubeShape s(3, 1 + static_cast<int>(rng.below(4)));
    auto a = random_set(s, rng, static_cast<unsigned>(10 + rng.below(50)));
    auto line = find_line_in_set(a);
    ASSERT_EQ(line.has_value(), quadratic_line_oracle(a));
    if (line) {
      EXPECT_FALSE(line->degenerate());
      for (Index p : line->point_indices()) EXPECT_TRUE(a.contains(p));
    }
  }
}

TEST(FindLine, LexicographicallyLeast) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    CubeShape s(3, 3);
    auto a = random_set(s, rng, 60);
    auto line = find_line_in_set(a);
    if (!line) continue;
    CubeShape enc(4, 3);
    for (Index y = 0; y < line->to_point().index(); ++y) {
      auto l = LinePattern::from_point(Point::from_index(enc, y));
      if (l.degenerate()) continue;
      bool inside = true;
      for (Index p : l.point_indices()) inside = inside && a.contains(p);
      ASSERT_FALSE(inside) << l.str();
    }
  }
}

TEST(FindLine, Budget) {
  auto a = CubeSet(CubeShape(3, 8));
  EXPECT_THROW(find_line_in_set(a, {.include_degenerate = false, .budget = 100}), BudgetExceeded);
}

TEST(FindSubspace, Examples) {
  EXPECT_EQ(*find_subspace_in_set(CubeSet::full(CubeShape(2, 2)), 2), Subspace::identity(CubeShape(2, 2)));
  auto middle = CubeSet::from_predicate(CubeShape(2, 4), [](const Point& p) { return p.value_counts()[1] == 2; });
  EXPECT_EQ(middle.count(), 6u);
  EXPECT_FALSE(find_subspace_in_set(middle, 1));
  EXPECT_THROW(find_subspace_in_set(middle, 5), InvalidArgument);
}

TEST(FindSubspace, DimensionOneIsLineSearch) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    CubeShape s(3, 1 + static_cast<int>(rng.below(3)));
    auto a = random_set(s, rng, 55);
    auto line = find_line_in_set(a);
    auto v = find_subspace_in_set(a, 1);
    ASSERT_EQ(line.has_value(), v.has_value());
    if (line) EXPECT_EQ(*v, Subspace::from_line(*line));
  }
}

TEST(FindSubspace, WitnessInside) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_set(CubeShape(2, 4), rng, 75);
    if (auto v = find_subspace_in_set(a, 2)) {
      EXPECT_EQ(v->dim(), 2);
      for (Index p : v->point_indices()) EXPECT_TRUE(a.contains(p));
    }
  }
}

TEST(CubeSetOps, PullBackAndAlphabet) {
  CubeShape s(3, 3);
  auto a = CubeSet::from_predicate(s, [](const Point& p) { return p[0] != p[2]; });
  auto v = Subspace::parse(s, "a2b");
  auto back = pull_back(a, v);
  EXPECT_EQ(back.shape(), CubeShape(3, 2));
  for (Index z = 0; z < back.shape().size(); ++z) EXPECT_EQ(back.contains(z), a.contains(v.embed_index(z)));

  auto sub = sub_alphabet_cube(s, 2);
  EXPECT_EQ(sub.count(), 8u);
  auto r = restrict_alphabet(CubeSet::full(s), 2);
  EXPECT_EQ(r, CubeSet::full(CubeShape(2, 3)));
  EXPECT_EQ(extend_alphabet(r, 3), sub);
}

TEST(SetJson, RoundTrip) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_set(CubeShape(3, 3), rng);
    EXPECT_EQ(set_from_json(set_to_json(a)), a);
    EXPECT_EQ(set_from_json(set_to_json_bitset(a)), a);
  }
  auto j = Json::parse(R"({"k":2,"n":2,"bitset_hex":"09"})");
  EXPECT_EQ(set_from_json(j), set_of(CubeShape(2, 2), {"11", "22"}));
  EXPECT_THROW(set_from_json(Json::parse(R"({"k":2,"n":2,"points":["13"]})")), InvalidArgument);
  EXPECT_THROW(set_from_json(Json::parse(R"({"k":2,"n":2,"bitset_hex":"10"})")), InvalidArgument);
}
