#pragma once

#include "dhj/cube.hpp"
#include "dhj/rng.hpp"

namespace dhj::testing {

inline CubeSet random_set(const CubeShape& shape, Rng& rng, unsigned percent = 50) {
  CubeSet a(shape);
  for (Index i = 0; i < shape.size(); ++i)
    if (rng.below(100) < percent) a.insert(i);
  return a;
}

// Drops one point of some line until none is left.
inline CubeSet make_linefree(CubeSet a, Rng& rng) {
  while (auto line = find_line_in_set(a)) {
    auto pts = line->point_indices();
    a.erase(pts[rng.below(pts.size())]);
  }
  return a;
}

inline CubeSet set_of(const CubeShape& shape, std::initializer_list<const char*> points) {
  CubeSet a(shape);
  for (const char* p : points) a.insert(Point::parse(shape, p).index());
  return a;
}

// Membership depends only on the positions of values other than i and j.
inline bool insensitive_oracle(const CubeSet& a, int i, int j) {
  const CubeShape& s = a.shape();
  std::vector<int> state(s.size(), -1);
  for (Index x = 0; x < s.size(); ++x) {
    auto p = Point::from_index(s, x);
    std::vector<int> d(p.digits().begin(), p.digits().end());
    for (int& v : d)
      if (v == j) v = i;
    Index key = Point(s, d).index();
    int in = a.contains(x) ? 1 : 0;
    if (state[key] == -1)
      state[key] = in;
    else if (state[key] != in)
      return false;
  }
  return true;
}

}  // namespace dhj::testing
