#include "dhj/sperner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dhj {

namespace {

void require_binary(const CubeSet& a, const char* what) {
  if (a.shape().k() != 2) throw InvalidArgument(std::string(what) + " needs k = 2, got " + a.shape().str());
}

std::uint64_t small_factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

Rational ratio(const Integer& num, const Integer& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

bool is_antichain(const CubeSet& a) {
  require_binary(a, "is_antichain");
  // With k = 2 the point index is the bitmask of its 2-positions.
  auto members = a.indices();
  for (Index x : members)
    for (Index y : members)
      if (x != y && (x & ~y) == 0) return false;
  return true;
}

Integer sperner_bound(int n) {
  if (n < 1) throw InvalidArgument("sperner_bound needs n >= 1");
  return binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(n / 2));
}

Rational chain_hit_probability(const CubeSet& a) {
  require_binary(a, "chain_hit_probability");
  const int n = a.shape().n();
  std::vector<Integer> per_layer(static_cast<std::size_t>(n + 1), 0);
  a.for_each([&](Index i) { ++per_layer[static_cast<std::size_t>(std::popcount(i))]; });
  // P(m) = 1/(n+1); given m the chain's m-set is a uniform m-subset.
  Rational total = 0;
  for (int m = 0; m <= n; ++m)
    total += ratio(per_layer[static_cast<std::size_t>(m)], binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(m)));
  return total / (n + 1);
}

LineDensityTable::LineDensityTable(int n) : n_(n) {
  if (n < 1) throw InvalidArgument("LineDensityTable needs n >= 1");
  if (n > 14) throw BudgetExceeded("LineDensityTable", static_cast<std::uint64_t>(n), 14);
  CubeShape encoded(3, n);
  CubeShape cube(2, n);
  const std::uint64_t nf = small_factorial(n);
  denominator_ = binomial(static_cast<unsigned long>(n + 2), 2) * Integer(std::to_string(nf));
  point_denominator_ = Integer(n + 1) * Integer(std::to_string(nf));

  entries_.reserve(encoded.size());
  for (Index y = 0; y < encoded.size(); ++y) {
    Index rest = y;
    int counts[3] = {0, 0, 0};
    Index low = 0;
    Index high = 0;
    for (int c = n - 1; c >= 0; --c) {
      int v = static_cast<int>(rest % 3);
      rest /= 3;
      ++counts[v];
      Index bit = cube.weight(c);
      if (v == 1) {
        low |= bit;
        high |= bit;
      } else if (v == 2) {
        high |= bit;
      }
    }
    std::uint64_t w = small_factorial(counts[0]) * small_factorial(counts[1]) * small_factorial(counts[2]);
    entries_.push_back({low, high, w, counts[2] == 0});
  }
  point_weight_.resize(cube.size());
  for (Index x = 0; x < cube.size(); ++x) {
    int ones = std::popcount(x);
    point_weight_[x] = small_factorial(ones) * small_factorial(n - ones);
  }
}

SpernerDensity LineDensityTable::evaluate(const CubeSet& a) const {
  require_binary(a, "probabilistic_sperner_density");
  if (a.shape().n() != n_) throw InvalidArgument("set dimension does not match the line table");
  std::uint64_t point_sum = 0;
  a.for_each([&](Index i) { point_sum += point_weight_[i]; });
  std::uint64_t all = 0;
  std::uint64_t degenerate = 0;
  for (const auto& e : entries_) {
    if (a.contains(e.low) && a.contains(e.high)) {
      all += e.weight;
      if (e.degenerate) degenerate += e.weight;
    }
  }
  SpernerDensity out;
  out.delta = ratio(Integer(std::to_string(point_sum)), point_denominator_);
  out.line_density = ratio(Integer(std::to_string(all)), denominator_);
  out.nondegenerate_line_density = ratio(Integer(std::to_string(all - degenerate)), denominator_);
  out.bound = out.delta * out.delta * Rational(n_ + 1, n_ + 2);
  out.bound.canonicalize();
  return out;
}

SpernerDensity probabilistic_sperner_density(const CubeSet& a) {
  require_binary(a, "probabilistic_sperner_density");
  return LineDensityTable(a.shape().n()).evaluate(a);
}

RefineResult multidim_sperner_refine(const CubeSet& a, const RefineOptions& options) {
  require_binary(a, "multidim_sperner_refine");
  const int n = a.shape().n();
  const int d = options.d;
  if (d < 1) throw InvalidArgument("subspace dimension must be >= 1");

  RefineResult result;
  result.delta = a.density();
  for (int i = 1; i < d; ++i) {
    int size = static_cast<int>(n / std::pow(4.0, d - i));
    if (size < 1)
      throw InvalidArgument("dimension " + std::to_string(d) + " needs n >= 4^(d-1) for the block decomposition");
    result.block_sizes.push_back(size);
  }
  int used = std::accumulate(result.block_sizes.begin(), result.block_sizes.end(), 0);
  if (n - used < 1) throw InvalidArgument("no coordinates left for the final block");
  result.block_sizes.push_back(n - used);
  result.density_bound = std::pow(25.0 / n, 1.0 / std::pow(2.0, d));
  {
    Rational power = 1;
    for (int i = 0; i < (1 << std::min(d, 20)); ++i) power *= result.delta;
    result.precondition_met = result.delta > 0 && Rational(n) * power >= 25;
  }

  // The surviving family lives on `coords` (cube coordinates, in position order).
  std::vector<int> coords(static_cast<std::size_t>(n));
  std::iota(coords.begin(), coords.end(), 0);
  CubeSet family = a;
  std::vector<std::pair<int, int>> fixed;
  std::vector<std::vector<int>> wildcards;
  const double delta = to_double(result.delta);

  for (int r = 1; r < d; ++r) {
    const int size = result.block_sizes[static_cast<std::size_t>(r - 1)];
    const int count = static_cast<int>(coords.size());
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    if (options.rng) options.rng->shuffle(std::span<int>(order));

    const int rest = count - size;
    CubeShape fam_shape(2, count);
    CubeShape rest_shape(2, rest);
    // X_s for every s in 0..size.
    std::vector<CubeSet> xs;
    xs.reserve(static_cast<std::size_t>(size + 1));
    for (int s = 0; s <= size; ++s) {
      Index prefix = 0;
      for (int p = 0; p < s; ++p) prefix |= fam_shape.weight(order[static_cast<std::size_t>(p)]);
      CubeSet x(rest_shape);
      for (Index b = 0; b < rest_shape.size(); ++b) {
        Index idx = prefix;
        for (int j = 0; j < rest; ++j)
          if (b & rest_shape.weight(j)) idx |= fam_shape.weight(order[static_cast<std::size_t>(size + j)]);
        if (family.contains(idx)) x.insert(b);
      }
      xs.push_back(std::move(x));
    }

    int best_s = 0;
    int best_t = 1;
    if (options.rng) {
      if (size < 1) throw InvalidArgument("refinement block is empty");
      int s = 0;
      int t = 0;
      for (int attempt = 0; attempt < 1000 && s == t; ++attempt) {
        s = options.rng->binomial_half(size);
        t = options.rng->binomial_half(size);
      }
      if (s == t) t = s == 0 ? 1 : s - 1;
      best_s = std::min(s, t);
      best_t = std::max(s, t);
    } else {
      Index best = 0;
      bool first = true;
      for (int s = 0; s <= size; ++s)
        for (int t = s + 1; t <= size; ++t) {
          Index c = (xs[static_cast<std::size_t>(s)] & xs[static_cast<std::size_t>(t)]).count();
          if (first || c > best) {
            best = c;
            best_s = s;
            best_t = t;
            first = false;
          }
        }
    }

    CubeSet next = xs[static_cast<std::size_t>(best_s)] & xs[static_cast<std::size_t>(best_t)];
    std::vector<int> wild;
    for (int p = 0; p < size; ++p) {
      int coord = coords[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])];
      if (p < best_s)
        fixed.emplace_back(coord, 2);
      else if (p < best_t)
        wild.push_back(coord);
      else
        fixed.emplace_back(coord, 1);
    }
    std::sort(wild.begin(), wild.end());
    wildcards.push_back(std::move(wild));

    std::vector<int> next_coords(static_cast<std::size_t>(rest));
    for (int j = 0; j < rest; ++j)
      next_coords[static_cast<std::size_t>(j)] = coords[static_cast<std::size_t>(order[static_cast<std::size_t>(size + j)])];
    // Re-index so positions follow the new coordinate list order.
    coords = std::move(next_coords);
    family = std::move(next);

    RefineStage stage;
    stage.block_size = size;
    stage.s = best_s;
    stage.t = best_t;
    stage.density = family.density();
    stage.guaranteed = std::pow(delta, std::pow(2.0, r)) - std::pow(2.0, d - r) / std::sqrt(static_cast<double>(n));
    result.stages.push_back(stage);
    if (family.empty()) return result;
  }

  // Final block: a nested pair in the surviving family is a line of [2]^|coords|.
  SearchOptions search;
  auto line = find_line_in_set(family, search);
  RefineStage last;
  last.block_size = static_cast<int>(coords.size());
  last.density = family.density();
  last.guaranteed = std::pow(delta, std::pow(2.0, d)) - 1.0 / std::sqrt(static_cast<double>(n));
  if (!line) {
    result.stages.push_back(last);
    return result;
  }
  std::vector<int> wild;
  int fixed_twos = 0;
  for (int j = 0; j < static_cast<int>(coords.size()); ++j) {
    int sym = (*line)[j];
    int coord = coords[static_cast<std::size_t>(j)];
    if (sym == kWildcard) {
      wild.push_back(coord);
    } else {
      fixed.emplace_back(coord, sym);
      fixed_twos += sym == 2;
    }
  }
  last.s = fixed_twos;
  last.t = fixed_twos + static_cast<int>(wild.size());
  result.stages.push_back(last);
  std::sort(wild.begin(), wild.end());
  wildcards.push_back(std::move(wild));

  Subspace v = Subspace::from_parts(a.shape(), fixed, wildcards);
  for (Index i : v.point_indices())
    if (!a.contains(i)) throw Error("multidim_sperner_refine produced a subspace outside the set");
  result.subspace = std::move(v);
  return result;
}

}  // namespace dhj
