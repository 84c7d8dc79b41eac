#include "dhj/measures.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace dhj {

Distribution::Distribution(CubeShape shape) : shape_(std::move(shape)), probs_(shape_.size()) {}

Distribution::Distribution(CubeShape shape, std::vector<Rational> probs)
    : shape_(std::move(shape)), probs_(std::move(probs)) {
  if (probs_.size() != shape_.size()) throw InvalidArgument("distribution size does not match " + shape_.str());
  for (const auto& p : probs_)
    if (p < 0) throw InvalidArgument("negative probability in distribution");
}

Rational Distribution::total() const {
  Rational sum = 0;
  for (const auto& p : probs_) sum += p;
  return sum;
}

Rational Distribution::measure(const CubeSet& a) const {
  if (!(a.shape() == shape_)) throw InvalidArgument("set and distribution live in different cubes");
  Rational sum = 0;
  a.for_each([&](Index i) { sum += probs_[i]; });
  return sum;
}

Integer slice_count(const CubeShape& shape) {
  return binomial(static_cast<unsigned long>(shape.n() + shape.k() - 1), static_cast<unsigned long>(shape.k() - 1));
}

void for_each_slice(const CubeShape& shape, const std::function<void(std::span<const int>)>& fn) {
  const int k = shape.k();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == k - 1) {
      counts[static_cast<std::size_t>(j)] = left;
      fn(counts);
      return;
    }
    for (int a = left; a >= 0; --a) {
      counts[static_cast<std::size_t>(j)] = a;
      rec(j + 1, left - a);
    }
  };
  rec(0, shape.n());
}

namespace {

void check_counts(const CubeShape& shape, std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != shape.k()) throw InvalidArgument("slice vector has wrong length");
  int sum = 0;
  for (int c : counts) {
    if (c < 0) throw InvalidArgument("negative slice count");
    sum += c;
  }
  if (sum != shape.n()) throw InvalidArgument("slice counts do not sum to n");
}

std::vector<int> counts_of(const CubeShape& shape, Index i) {
  std::vector<int> counts(static_cast<std::size_t>(shape.k()), 0);
  const auto k = static_cast<Index>(shape.k());
  for (int c = 0; c < shape.n(); ++c) {
    ++counts[static_cast<std::size_t>(i % k)];
    i /= k;
  }
  return counts;
}

// Fills a distribution from a function of the value counts, evaluating it
// once per slice.
template <typename Fn>
Distribution distribution_by_slice(const CubeShape& shape, Fn&& prob) {
  std::map<std::vector<int>, Rational> cache;
  std::vector<Rational> probs(shape.size());
  for (Index i = 0; i < shape.size(); ++i) {
    auto counts = counts_of(shape, i);
    auto it = cache.find(counts);
    if (it == cache.end()) it = cache.emplace(counts, prob(std::span<const int>(counts))).first;
    probs[i] = it->second;
  }
  return Distribution(shape, std::move(probs));
}

}  // namespace

Rational equal_slices_prob(const CubeShape& shape, std::span<const int> counts) {
  check_counts(shape, counts);
  Rational r(Integer(1), slice_count(shape) * multinomial(static_cast<unsigned long>(shape.n()), counts));
  r.canonicalize();
  return r;
}

Rational equal_slices_prob(const Point& x) { return equal_slices_prob(x.shape(), x.value_counts()); }

Rational nondegenerate_prob(const CubeShape& shape, std::span<const int> counts) {
  if (shape.n() < shape.k())
    throw InvalidArgument("non-degenerate equal-slices measure needs n >= k, got " + shape.str());
  check_counts(shape, counts);
  if (std::any_of(counts.begin(), counts.end(), [](int c) { return c == 0; })) return Rational(0);
  Integer slices = binomial(static_cast<unsigned long>(shape.n() - 1), static_cast<unsigned long>(shape.k() - 1));
  Rational r(Integer(1), slices * multinomial(static_cast<unsigned long>(shape.n()), counts));
  r.canonicalize();
  return r;
}

Rational nondegenerate_prob(const Point& x) { return nondegenerate_prob(x.shape(), x.value_counts()); }

Rational uniform_measure(const CubeSet& a) { return a.density(); }

Rational equal_slices_measure(const CubeSet& a) {
  const CubeShape& shape = a.shape();
  std::map<std::vector<int>, Rational> cache;
  Rational sum = 0;
  a.for_each([&](Index i) {
    auto counts = counts_of(shape, i);
    auto it = cache.find(counts);
    if (it == cache.end()) it = cache.emplace(counts, equal_slices_prob(shape, counts)).first;
    sum += it->second;
  });
  return sum;
}

Rational nondegenerate_equal_slices_measure(const CubeSet& a) {
  const CubeShape& shape = a.shape();
  if (shape.n() < shape.k())
    throw InvalidArgument("non-degenerate equal-slices measure needs n >= k, got " + shape.str());
  std::map<std::vector<int>, Rational> cache;
  Rational sum = 0;
  a.for_each([&](Index i) {
    auto counts = counts_of(shape, i);
    auto it = cache.find(counts);
    if (it == cache.end()) it = cache.emplace(counts, nondegenerate_prob(shape, counts)).first;
    sum += it->second;
  });
  return sum;
}

Distribution uniform_distribution(const CubeShape& shape) {
  Rational p(Integer(1), Integer(std::to_string(shape.size())));
  return Distribution(shape, std::vector<Rational>(shape.size(), p));
}

Distribution equal_slices_distribution(const CubeShape& shape) {
  return distribution_by_slice(shape, [&](std::span<const int> c) { return equal_slices_prob(shape, c); });
}

Distribution nondegenerate_distribution(const CubeShape& shape) {
  if (shape.n() < shape.k())
    throw InvalidArgument("non-degenerate equal-slices measure needs n >= k, got " + shape.str());
  return distribution_by_slice(shape, [&](std::span<const int> c) { return nondegenerate_prob(shape, c); });
}

Distribution point_mass(const CubeShape& shape, Index i) {
  if (i >= shape.size()) throw InvalidArgument("point index out of range");
  Distribution d(shape);
  d[i] = 1;
  return d;
}

Rational degenerate_prob(const CubeShape& shape) {
  Rational r(shape.k() - 1, shape.n() + shape.k() - 1);
  r.canonicalize();
  return r;
}

BoundCheck missing_value_prob(const CubeShape& shape) {
  Integer hits = 0;
  for_each_slice(shape, [&](std::span<const int> c) {
    if (std::find(c.begin(), c.end(), 0) != c.end()) ++hits;
  });
  BoundCheck out;
  out.exact = Rational(hits, slice_count(shape));
  out.exact.canonicalize();
  out.bound = Rational(shape.k() * (shape.k() - 1), shape.n() + shape.k() - 1);
  out.bound.canonicalize();
  return out;
}

BoundCheck few_k_prob_bound(const CubeShape& shape, int m) {
  if (m < 1 || m > shape.n()) throw InvalidArgument("few_k_prob_bound needs 1 <= m <= n");
  Integer hits = 0;
  for_each_slice(shape, [&](std::span<const int> c) {
    if (c.back() < m) ++hits;
  });
  BoundCheck out;
  out.exact = Rational(hits, slice_count(shape));
  out.exact.canonicalize();
  out.bound = Rational(m * shape.k(), shape.n());
  out.bound.canonicalize();
  out.precondition_met = shape.n() >= m * shape.k();
  return out;
}

BoundCheck few_any_prob_bound(const CubeShape& shape, int m) {
  if (m < 1 || m > shape.n()) throw InvalidArgument("few_any_prob_bound needs 1 <= m <= n");
  Integer hits = 0;
  for_each_slice(shape, [&](std::span<const int> c) {
    if (std::any_of(c.begin(), c.end(), [m](int a) { return a < m; })) ++hits;
  });
  BoundCheck out;
  out.exact = Rational(hits, slice_count(shape));
  out.exact.canonicalize();
  out.bound = Rational(m * shape.k() * shape.k(), shape.n());
  out.bound.canonicalize();
  out.precondition_met = shape.n() >= m * shape.k();
  return out;
}

namespace {

Point shuffled_slice_point(const CubeShape& shape, std::span<const int> counts, Rng& rng) {
  std::vector<int> digits;
  digits.reserve(static_cast<std::size_t>(shape.n()));
  for (int j = 0; j < shape.k(); ++j) digits.insert(digits.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), j + 1);
  rng.shuffle(std::span<int>(digits));
  return Point(shape, std::move(digits));
}

// Circle construction: n points in random order, `labels` of the n gaps
// chosen and labelled in random order; each point takes the label of the
// first chosen gap clockwise from it. Returns 1-based labels per coordinate.
std::vector<int> circle_labels(int n, int labels, Rng& rng) {
  auto order = rng.permutation(n);
  auto gaps = rng.subset(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(labels));
  auto names = rng.permutation(labels);
  std::vector<int> out(static_cast<std::size_t>(n));
  std::size_t next = 0;
  for (int pos = 0; pos < n; ++pos) {
    while (next < gaps.size() && gaps[next] < static_cast<std::uint64_t>(pos)) ++next;
    std::size_t g = next < gaps.size() ? next : 0;
    out[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = names[g] + 1;
  }
  return out;
}

}  // namespace

Point sample_equal_slices(const CubeShape& shape, Rng& rng) {
  const int k = shape.k();
  const int n = shape.n();
  auto pegs = rng.subset(static_cast<std::uint64_t>(n + k - 1), static_cast<std::uint64_t>(k - 1));
  std::vector<int> counts(static_cast<std::size_t>(k));
  int prev = 0;
  for (int j = 0; j < k - 1; ++j) {
    int p = static_cast<int>(pegs[static_cast<std::size_t>(j)]) + 1;
    counts[static_cast<std::size_t>(j)] = p - prev - 1;
    prev = p;
  }
  counts[static_cast<std::size_t>(k - 1)] = n + k - prev - 1;
  return shuffled_slice_point(shape, counts, rng);
}

Point sample_nondegenerate(const CubeShape& shape, Rng& rng) {
  if (shape.n() < shape.k())
    throw InvalidArgument("non-degenerate equal-slices measure needs n >= k, got " + shape.str());
  return Point(shape, circle_labels(shape.n(), shape.k(), rng));
}

Point sample_nondegenerate_pegs(const CubeShape& shape, Rng& rng) {
  const int k = shape.k();
  const int n = shape.n();
  if (n < k) throw InvalidArgument("non-degenerate equal-slices measure needs n >= k, got " + shape.str());
  auto cuts = rng.subset(static_cast<std::uint64_t>(n - 1), static_cast<std::uint64_t>(k - 1));
  std::vector<int> counts(static_cast<std::size_t>(k));
  int prev = 0;
  for (int j = 0; j < k - 1; ++j) {
    int c = static_cast<int>(cuts[static_cast<std::size_t>(j)]) + 1;
    counts[static_cast<std::size_t>(j)] = c - prev;
    prev = c;
  }
  counts[static_cast<std::size_t>(k - 1)] = n - prev;
  return shuffled_slice_point(shape, counts, rng);
}

Subspace sample_special_subspace(const CubeShape& shape, int d, Rng& rng) {
  if (d < 1) throw InvalidArgument("subspace dimension must be >= 1");
  if (d > shape.n()) throw InvalidArgument("special subspace dimension exceeds n");
  auto labels = circle_labels(shape.n(), d, rng);
  for (int& s : labels) s += shape.k();
  return Subspace(shape, d, std::move(labels));
}

Rational tv_distance(const Distribution& p, const Distribution& q) {
  if (!(p.shape() == q.shape())) throw InvalidArgument("tv_distance: distributions live in different cubes");
  Rational sum = 0;
  for (Index i = 0; i < p.shape().size(); ++i) sum += abs(p[i] - q[i]);
  return sum / 2;
}

Rational transfer_ratio(int n, int k, int m) {
  if (m < 0 || m >= n) throw InvalidArgument("transfer_ratio needs 0 <= m < n");
  Integer num = 1;
  Integer den = 1;
  for (int i = 1; i <= m; ++i) {
    num *= n + k - i;
    den *= n - i + 1;
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Distribution composed_restriction_distribution(const CubeShape& shape, int m, const Distribution& inner, YLaw y_law,
                                               std::uint64_t budget) {
  const int n = shape.n();
  const int k = shape.k();
  if (m < 1 || m > n) throw InvalidArgument("restriction needs 1 <= m <= n");
  const int k_inner = inner.shape().k();
  if (inner.shape().n() != m || (k_inner != k && k_inner != k - 1))
    throw InvalidArgument("inner distribution must live on [k]^m or [k-1]^m, got " + inner.shape().str());

  // All injections [m] -> [n].
  std::vector<std::vector<int>> injections;
  {
    std::vector<int> current;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::function<void()> rec = [&] {
      if (static_cast<int>(current.size()) == m) {
        injections.push_back(current);
        return;
      }
      for (int c = 0; c < n; ++c) {
        if (used[static_cast<std::size_t>(c)]) continue;
        used[static_cast<std::size_t>(c)] = true;
        current.push_back(c);
        rec();
        current.pop_back();
        used[static_cast<std::size_t>(c)] = false;
      }
    };
    auto count = Integer(factorial(static_cast<unsigned long>(n)) / factorial(static_cast<unsigned long>(n - m)));
    check_budget("composed_restriction_distribution",
                 count.fits_ulong_p() ? count.get_ui() * shape.size() : ~std::uint64_t{0}, budget);
    rec();
  }

  const int rest = n - m;
  std::map<std::vector<int>, Rational> y_cache;
  auto y_prob = [&](const std::vector<int>& counts) -> Rational {
    if (rest == 0) return Rational(1);
    if (y_law == YLaw::uniform) {
      Rational r(Integer(1), Integer(std::to_string(*checked_pow(static_cast<Index>(k), rest))));
      return r;
    }
    auto it = y_cache.find(counts);
    if (it == y_cache.end()) it = y_cache.emplace(counts, equal_slices_prob(CubeShape(k, rest), counts)).first;
    return it->second;
  };

  const CubeShape& ishape = inner.shape();
  Distribution out(shape);
  std::vector<int> digits(static_cast<std::size_t>(n));
  std::vector<int> y_counts(static_cast<std::size_t>(k));
  for (Index z = 0; z < shape.size(); ++z) {
    Point p = Point::from_index(shape, z);
    auto total_counts = p.value_counts();
    Rational sum = 0;
    for (const auto& sigma : injections) {
      Index x = 0;
      bool inside = true;
      y_counts = total_counts;
      for (int i = 0; i < m; ++i) {
        int v = p[sigma[static_cast<std::size_t>(i)]];
        if (v > k_inner) {
          inside = false;
          break;
        }
        x += static_cast<Index>(v - 1) * ishape.weight(i);
        --y_counts[static_cast<std::size_t>(v - 1)];
      }
      if (!inside || inner[x] == 0) continue;
      sum += inner[x] * y_prob(y_counts);
    }
    out[z] = sum / static_cast<unsigned long>(injections.size());
  }
  return out;
}

Distribution special_subspace_composed_law(const CubeShape& shape, int d, const PointProbFn& prob,
                                           std::uint64_t budget) {
  const int n = shape.n();
  const int k = shape.k();
  if (d < 1 || d > n) throw InvalidArgument("special subspace dimension must lie in [1, n]");
  if (d < k)
    throw InvalidArgument("a non-degenerate equal-slices point of [k]^d needs d >= k (k=" + std::to_string(k) +
                          ", d=" + std::to_string(d) + ")");
  PointProbFn p = prob ? prob : PointProbFn([](const CubeShape& s, std::span<const int> c) {
    return nondegenerate_prob(s, c);
  });
  CubeShape outer(d, n);
  CubeShape inner(k, d);
  check_budget("special_subspace_composed_law", outer.size() * inner.size(), budget);

  Distribution dist_outer = distribution_by_slice(outer, [&](std::span<const int> c) { return p(outer, c); });
  Distribution dist_inner = distribution_by_slice(inner, [&](std::span<const int> c) { return p(inner, c); });

  Distribution out(shape);
  for (Index s = 0; s < outer.size(); ++s) {
    if (dist_outer[s] == 0) continue;
    Point sp = Point::from_index(outer, s);
    for (Index w = 0; w < inner.size(); ++w) {
      if (dist_inner[w] == 0) continue;
      Point wp = Point::from_index(inner, w);
      Index x = 0;
      for (int i = 0; i < n; ++i) x += static_cast<Index>(wp[sp[i] - 1] - 1) * shape.weight(i);
      out[x] += dist_outer[s] * dist_inner[w];
    }
  }
  return out;
}

}  // namespace dhj
