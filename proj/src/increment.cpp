#include "dhj/increment.hpp"

#include <algorithm>
#include <map>

#include "dhj/measures.hpp"

namespace dhj {

namespace {

Rational power(const Rational& base, unsigned e) {
  Rational out = 1;
  for (unsigned i = 0; i < e; ++i) out *= base;
  return out;
}

Integer floor_of(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Integer ceil_of(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

int fourth_root(int n) {
  int m = 0;
  while (static_cast<long long>(m + 1) * (m + 1) * (m + 1) * (m + 1) <= n) ++m;
  return m;
}

Index ipow(int base, int e) {
  auto p = checked_pow(static_cast<Index>(base), e);
  if (!p) throw BudgetExceeded("power", ~Index{0}, default_work_budget());
  return *p;
}

Rational sum_over(const CubeSet& a, std::span<const Rational> probs) {
  Rational s = 0;
  a.for_each([&](Index i) { s += probs[i]; });
  return s;
}

// Calls fn(J) for every m-subset of {0..n-1} in lexicographic order until fn returns false.
template <typename Fn>
void for_each_combination(int n, int m, Fn&& fn) {
  std::vector<int> c(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!fn(c)) return;
    int i = m - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::vector<int> digits_of(int k, int len, Index idx) {
  std::vector<int> out(static_cast<std::size_t>(len));
  for (int i = len - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<Index>(k)) + 1;
    idx /= static_cast<Index>(k);
  }
  return out;
}

Index substitute_index(const CubeShape& shape, Index i, int from, int to) {
  Index out = i;
  Index rest = i;
  for (int c = shape.n() - 1; c >= 0; --c) {
    int v = static_cast<int>(rest % static_cast<Index>(shape.k())) + 1;
    rest /= static_cast<Index>(shape.k());
    if (v == from) out = out - static_cast<Index>(from - 1) * shape.weight(c) + static_cast<Index>(to - 1) * shape.weight(c);
  }
  return out;
}

void require_insensitive(const CubeSet& d, int j) {
  const int k = d.shape().k();
  if (j < 1 || j >= k) throw InvalidArgument("insensitivity index j must lie in 1..k-1");
  if (!is_ij_insensitive(d, j, k))
    throw InvalidArgument("set is not " + std::to_string(j) + std::to_string(k) + "-insensitive");
}

}  // namespace

Subspace EmbeddingSpec::subspace(const CubeShape& shape) const {
  if (J.empty()) throw InvalidArgument("embedding needs a non-empty coordinate set");
  if (static_cast<int>(J.size() + y.size()) != shape.n()) throw InvalidArgument("embedding does not fit the cube");
  std::vector<int> tmpl(static_cast<std::size_t>(shape.n()), 0);
  for (std::size_t r = 0; r < J.size(); ++r) tmpl[static_cast<std::size_t>(J[r])] = shape.k() + static_cast<int>(r) + 1;
  std::size_t next = 0;
  for (auto& t : tmpl)
    if (t == 0) t = y[next++];
  return Subspace(shape, static_cast<int>(J.size()), std::move(tmpl));
}

Rational pdhj_constant(int k_sub, const Rational& delta) {
  // In [1]^m the only dense set is the single point, and half of the
  // equal-slices mass of [2]^m is on patterns with a wildcard once m >= 1.
  if (k_sub == 1) return Rational(1, 2);
  if (k_sub == 2) return delta * delta / 2;
  throw InvalidArgument("no explicit PDHJ constant for alphabet size " + std::to_string(k_sub));
}

std::optional<Integer> mdhj_bound(int k_sub, int d, const Rational& eta) {
  if (eta <= 0) return std::nullopt;
  if (k_sub == 1) return Integer(d);
  if (k_sub == 2) {
    if (d > 16) return std::nullopt;
    return ceil_of(25 * power(1 / eta, 1u << d));
  }
  return std::nullopt;
}

IncrementParams IncrementParams::for_chain(int k, const Rational& delta, int n) {
  if (k != 2 && k != 3) throw InvalidArgument("the increment chain has explicit constants only for k = 2, 3");
  if (delta <= 0 || delta > 1) throw InvalidArgument("density must lie in (0, 1]");
  IncrementParams p;
  p.delta = delta;
  p.theta = pdhj_constant(k - 1, delta / 4);
  p.eta = delta * delta * p.theta / (96 * k);
  p.gamma = 4 * p.eta / delta;
  p.beta = delta * p.theta / (12 * k);
  p.m = fourth_root(n);
  p.r = static_cast<int>(floor_of(p.beta * p.m / (8 * k * k)).get_si());
  p.d = 1;
  p.m_within_bound = true;
  return p;
}

std::string to_string(DiagonalCase c) {
  switch (c) {
    case DiagonalCase::increment: return "increment";
    case DiagonalCase::diagonal: return "diagonal";
    case DiagonalCase::exhausted: return "exhausted";
  }
  return "?";
}

DiagonalResult dense_diagonal(const CubeSet& a, int m, const DiagonalOptions& options) {
  const CubeShape& shape = a.shape();
  const int k = shape.k();
  const int n = shape.n();
  if (k < 2) throw InvalidArgument("dense_diagonal needs k >= 2");
  if (m < 1 || m > n) throw InvalidArgument("dense_diagonal needs 1 <= m <= n");

  DiagonalResult res;
  res.delta = a.density();
  res.eta = options.eta == 0 ? res.delta / 4 : options.eta;
  res.increment_threshold = res.delta + res.eta;
  res.prime_threshold = res.delta / 4;
  if (res.delta > 0) res.density_threshold = res.delta - 4 * res.eta / res.delta;
  res.precondition_met = res.eta > 0 && res.eta <= res.delta / 4 &&
                         static_cast<long long>(m) * m * m * m <= n &&
                         Rational(n) >= power(Rational(16 * k) / res.eta, 12);
  if (res.delta == 0) return res;

  const CubeShape inner(k, m);
  auto full_probs = equal_slices_distribution(inner);
  auto sub_probs = equal_slices_distribution(inner.with_k(k - 1));

  struct Candidate {
    EmbeddingSpec spec;
    Rational density;
    Rational density_prime;
  };
  std::optional<Candidate> first_increment;
  std::optional<Candidate> first_diagonal;
  std::optional<Candidate> best;

  auto consider = [&](EmbeddingSpec spec) {
    ++res.candidates;
    CubeSet pb = pull_back(a, spec.subspace(shape));
    Candidate c{std::move(spec), sum_over(pb, full_probs.probs()), sum_over(restrict_alphabet(pb, k - 1), sub_probs.probs())};
    if (!first_increment && c.density >= res.increment_threshold) first_increment = c;
    if (!first_diagonal && c.density >= res.density_threshold && c.density_prime >= res.prime_threshold)
      first_diagonal = c;
    if (!best || c.density > best->density) best = std::move(c);
    return !first_increment;
  };

  const Index tail = ipow(k, n - m);
  Integer work = binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(m)) * Integer(std::to_string(shape.size()));
  if (work <= Integer(std::to_string(options.budget))) {
    res.exhaustive = true;
    for_each_combination(n, m, [&](const std::vector<int>& J) {
      for (Index y = 0; y < tail; ++y)
        if (!consider(EmbeddingSpec{J, digits_of(k, n - m, y)})) return false;
      return true;
    });
  } else {
    if (!options.rng) throw BudgetExceeded("dense_diagonal exhaustive scan", work.get_ui(), options.budget);
    Rng& rng = *options.rng;
    for (int s = 0; s < options.samples; ++s) {
      auto picked = rng.subset(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m));
      std::vector<int> J(picked.begin(), picked.end());
      std::vector<int> y(static_cast<std::size_t>(n - m));
      for (auto& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k))) + 1;
      if (!consider(EmbeddingSpec{std::move(J), std::move(y)})) break;
    }
  }

  const Candidate* chosen = nullptr;
  if (first_increment) {
    res.outcome = DiagonalCase::increment;
    chosen = &*first_increment;
  } else if (first_diagonal) {
    res.outcome = DiagonalCase::diagonal;
    chosen = &*first_diagonal;
  } else if (best) {
    chosen = &*best;
  }
  if (chosen) {
    res.embedding = chosen->spec;
    res.density = chosen->density;
    res.density_prime = chosen->density_prime;
  }
  return res;
}

ForbiddenSets forbidden_sets(const CubeSet& a) {
  const CubeShape& shape = a.shape();
  const int k = shape.k();
  if (k < 2) throw InvalidArgument("forbidden_sets needs k >= 2");
  if (auto line = find_line_in_set(a, SearchOptions{}))
    throw InvalidArgument("forbidden_sets needs a line-free set, found " + line->str());

  const CubeSet sub = sub_alphabet_cube(shape, k - 1);
  ForbiddenSets out(shape);
  out.b = a & sub;
  out.c_all = CubeSet::full(shape);
  for (int j = 1; j < k; ++j) {
    CubeSet cj(shape);
    for (Index x = 0; x < shape.size(); ++x)
      if (out.b.contains(substitute_index(shape, x, k, j))) cj.insert(x);
    out.c_all &= cj;
    out.c.push_back(std::move(cj));
  }
  auto probs = equal_slices_distribution(shape);
  out.nu_c = probs.measure(out.c_all);
  out.nu_c_outside = probs.measure(out.c_all - sub);
  out.nu_a_c = probs.measure(a & out.c_all);
  out.disjoint_outside = (a & out.c_all).subset_of(sub);
  return out;
}

CorrelationResult correlating_d(const CubeSet& a, const ForbiddenSets& forbidden, const IncrementParams& params) {
  const CubeShape& shape = a.shape();
  const int k = shape.k();
  if (static_cast<int>(forbidden.c.size()) != k - 1) throw InvalidArgument("expected k-1 sets C_j");
  auto probs = equal_slices_distribution(shape);

  CorrelationResult out(shape);
  for (int i = 1; i <= k; ++i) {
    CubeSet cell = CubeSet::full(shape);
    for (int j = 1; j < k; ++j) {
      const CubeSet& cj = forbidden.c[static_cast<std::size_t>(j - 1)];
      if (j < i)
        cell &= cj;
      else if (j == i)
        cell -= cj;
    }
    out.cells.push_back(std::move(cell));
  }

  const Rational base = params.delta - params.gamma;
  std::optional<Rational> best_excess;
  std::optional<Rational> best_ratio;
  for (int i = 1; i < k; ++i) {
    const CubeSet& cell = out.cells[static_cast<std::size_t>(i - 1)];
    if (cell.empty()) continue;
    Rational nu = probs.measure(cell);
    Rational nu_a = probs.measure(a & cell);
    Rational excess = nu_a - base * nu;
    Rational ratio = nu_a / nu;
    if (!best_excess || excess > *best_excess) {
      best_excess = excess;
      out.chosen = i;
    }
    if (!best_ratio || ratio > *best_ratio) {
      best_ratio = ratio;
      out.best_ratio = i;
    }
  }
  if (out.chosen == 0) throw InvalidArgument("every cell D^(i) with i < k is empty");

  for (int j = 1; j < k; ++j) {
    const CubeSet& cj = forbidden.c[static_cast<std::size_t>(j - 1)];
    out.factors.push_back(j < out.chosen ? cj : j == out.chosen ? cj.complement() : CubeSet::full(shape));
  }
  out.d = out.cells[static_cast<std::size_t>(out.chosen - 1)];
  out.nu_a = probs.measure(a);
  out.nu_c = probs.measure(forbidden.c_all);
  out.nu_a_c = probs.measure(a & forbidden.c_all);
  out.nu_d = probs.measure(out.d);
  out.nu_a_d = probs.measure(a & out.d);
  out.bound = base * out.nu_d + params.delta * params.theta / (4 * k);
  out.precondition_met = params.gamma > 0 && params.gamma <= params.delta / 4 && out.nu_a >= base &&
                         out.nu_a_c <= params.delta / 2 * out.nu_c && out.nu_c >= params.theta;
  return out;
}

RestrictResult restrict_to_uniform(const CubeSet& a, const CubeSet& d, int r, const IncrementParams& params,
                                   const RestrictOptions& options) {
  const CubeShape& shape = a.shape();
  if (!(d.shape() == shape)) throw InvalidArgument("restrict_to_uniform: A and D live in different cubes");
  const int k = shape.k();
  const int m = shape.n();
  if (r < 1 || r > m) throw InvalidArgument("restrict_to_uniform needs 1 <= r <= m");

  const CubeSet ad = a & d;
  auto probs = equal_slices_distribution(shape);
  RestrictResult res;
  res.nu_d = probs.measure(d);
  res.nu_a_d = probs.measure(ad);
  const Rational base = params.delta - params.gamma;
  res.precondition_met = res.nu_a_d >= base * res.nu_d + 3 * params.beta &&
                         Rational(r) <= params.beta * m / (8 * k) && Rational(r) <= params.beta * m / (2 * k * k);

  struct Candidate {
    EmbeddingSpec spec;
    Subspace v;
    Rational mu_d;
    Rational mu_a_d;
    Rational excess;
  };
  std::optional<Candidate> best;
  auto evaluate = [&](EmbeddingSpec spec) {
    ++res.candidates;
    Subspace v = spec.subspace(shape);
    Rational mu_d = pull_back(d, v).density();
    Rational mu_a_d = pull_back(ad, v).density();
    Rational excess = mu_a_d - base * mu_d;
    return Candidate{std::move(spec), std::move(v), mu_d, mu_a_d, excess};
  };
  auto meets = [&](const Candidate& c) { return c.mu_d >= params.gamma && c.excess >= params.beta; };

  const Index tail = ipow(k, m - r);
  if (options.exhaustive) {
    Integer work = binomial(static_cast<unsigned long>(m), static_cast<unsigned long>(r)) * Integer(std::to_string(shape.size()));
    if (work > Integer(std::to_string(options.budget)))
      throw BudgetExceeded("restrict_to_uniform exhaustive scan", work.get_ui(), options.budget);
    for_each_combination(m, r, [&](const std::vector<int>& J) {
      for (Index y = 0; y < tail; ++y) {
        Candidate c = evaluate(EmbeddingSpec{J, digits_of(k, m - r, y)});
        if (!best || c.excess > best->excess) best = std::move(c);
      }
      return true;
    });
  } else {
    if (!options.rng) throw InvalidArgument("restrict_to_uniform sampling needs an rng");
    Rng& rng = *options.rng;
    for (int s = 0; s < options.samples; ++s) {
      auto picked = rng.subset(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r));
      std::vector<int> J(picked.begin(), picked.end());
      std::vector<int> y;
      if (m > r) {
        Point p = sample_equal_slices(CubeShape(k, m - r), rng);
        y.assign(p.digits().begin(), p.digits().end());
      }
      Candidate c = evaluate(EmbeddingSpec{std::move(J), std::move(y)});
      bool good = meets(c);
      if (good || !best || c.excess > best->excess) best = std::move(c);
      if (good) break;
    }
  }

  if (best) {
    res.embedding = best->spec;
    res.subspace = best->v;
    res.mu_d = best->mu_d;
    res.mu_a_d = best->mu_a_d;
    res.excess = best->excess;
    res.meets_gamma = best->mu_d >= params.gamma;
    res.meets_eta = best->mu_d >= params.eta;
    res.meets_increment = best->excess >= params.beta;
  }
  return res;
}

namespace {

struct WorkCounter {
  std::uint64_t budget;
  std::uint64_t used = 0;
  bool charge(std::uint64_t units) {
    used += units;
    return used <= budget;
  }
};

struct CoreResult {
  std::vector<Subspace> subspaces;
  CubeSet residual;
  int rounds = 0;
  bool complete = true;
  bool precondition_met = false;
};

bool lemma_precondition(int k, int n, int dim, int m, const Rational& eta) {
  auto mdhj = mdhj_bound(k - 1, dim, eta);
  if (!mdhj || Integer(m) < *mdhj) return false;
  Integer cells;
  mpz_ui_pow_ui(cells.get_mpz_t(), static_cast<unsigned long>(k + dim), static_cast<unsigned long>(m));
  return Rational(n) * eta >= Rational(Integer(m) * cells);
}

// The round structure: block [s, s+m) is searched for a d-dimensional
// subspace U of [k-1]^m inside each fiber (prefix x, tail z), U is widened
// to [k]^m, and U × T is removed for the most common U. Untouched fibers of
// the same round are then served by their own U until none is left.
CoreResult partition_core(const CubeSet& input, int dim, int m, const Rational& eta, WorkCounter& work) {
  const CubeShape& shape = input.shape();
  const int k = shape.k();
  const int n = shape.n();
  if (dim < 1 || dim > m || m > n) throw InvalidArgument("partition needs 1 <= d <= m <= n");

  CoreResult out{.subspaces = {}, .residual = input};
  out.precondition_met = lemma_precondition(k, n, dim, m, eta);
  CubeSet& s_set = out.residual;
  const CubeShape block(k, m);
  const CubeShape small(k - 1, m);
  const std::vector<Index> small_to_big = sub_alphabet_cube(block, k - 1).indices();
  const Index km = block.size();
  const std::uint64_t search_cost = ipow(k + dim, m);

  for (int start = 0; start + m <= n; start += m) {
    const int tail_len = n - start - m;
    const Index kz = ipow(k, tail_len);
    const Index kp = ipow(k, start);
    const Index pairs = kp * kz;
    if (!work.charge(pairs * search_cost)) {
      out.complete = false;
      return out;
    }
    ++out.rounds;
    auto point_of = [&](Index pair, Index y) {
      Index x = pair / kz;
      Index z = pair % kz;
      return (x * km + y) * kz + z;
    };

    std::vector<std::optional<std::vector<int>>> found(pairs);
    for (Index p = 0; p < pairs; ++p) {
      CubeSet e(small);
      for (Index y = 0; y < small.size(); ++y)
        if (s_set.contains(point_of(p, small_to_big[y]))) e.insert(y);
      if (e.empty()) continue;
      auto u = find_subspace_in_set(e, dim, SearchOptions{.include_degenerate = false, .budget = work.budget});
      if (!u) continue;
      std::vector<int> tmpl(u->tmpl().begin(), u->tmpl().end());
      for (int& t : tmpl)
        if (t > k - 1) ++t;  // wildcard k-1+r becomes k+r
      found[p] = std::move(tmpl);
    }

    std::vector<bool> used(pairs, false);
    while (true) {
      std::map<std::vector<int>, Index> tally;
      for (Index p = 0; p < pairs; ++p)
        if (!used[p] && found[p]) ++tally[*found[p]];
      if (tally.empty()) break;
      auto pick = tally.begin();
      for (auto it = tally.begin(); it != tally.end(); ++it)
        if (it->second > pick->second) pick = it;
      const std::vector<int> tmpl = pick->first;
      const Subspace u(block, dim, tmpl);
      const auto u_points = u.point_indices();

      for (Index p = 0; p < pairs; ++p) {
        if (used[p]) continue;
        bool inside = std::all_of(u_points.begin(), u_points.end(),
                                  [&](Index y) { return s_set.contains(point_of(p, y)); });
        if (!inside) {
          if (found[p] && *found[p] == tmpl) throw Error("widened subspace left the set: input was not insensitive");
          continue;
        }
        used[p] = true;
        for (Index y : u_points) s_set.erase(point_of(p, y));
        std::vector<int> full;
        full.reserve(static_cast<std::size_t>(n));
        auto x_digits = digits_of(k, start, p / kz);
        auto z_digits = digits_of(k, tail_len, p % kz);
        full.insert(full.end(), x_digits.begin(), x_digits.end());
        full.insert(full.end(), tmpl.begin(), tmpl.end());
        full.insert(full.end(), z_digits.begin(), z_digits.end());
        out.subspaces.emplace_back(shape, dim, std::move(full));
      }
    }
  }
  return out;
}

CoreResult partition_layers(const std::vector<CubeSet>& factors, const PartitionOptions& options, int outer_d,
                            int outer_m, WorkCounter& work) {
  if (factors.size() == 1) return partition_core(factors[0], options.d, options.m, options.eta, work);

  const CubeShape& shape = factors[0].shape();
  CubeSet all = CubeSet::full(shape);
  for (const auto& f : factors) all &= f;

  CoreResult outer = partition_core(factors.back(), outer_d, outer_m, options.eta, work);
  CoreResult out{.subspaces = {}, .residual = all};
  out.rounds = outer.rounds;
  out.complete = outer.complete;
  out.precondition_met = outer.precondition_met;
  std::vector<CubeSet> rest(factors.begin(), factors.end() - 1);
  for (const Subspace& v : outer.subspaces) {
    std::vector<CubeSet> pulled;
    pulled.reserve(rest.size());
    for (const auto& f : rest) pulled.push_back(pull_back(f, v));
    CoreResult inner = partition_layers(pulled, options, outer_d, outer_m, work);
    out.complete = out.complete && inner.complete;
    out.precondition_met = out.precondition_met && inner.precondition_met;
    for (const Subspace& u : inner.subspaces) {
      Subspace w = v.compose(u);
      for (Index i : w.point_indices()) out.residual.erase(i);
      out.subspaces.push_back(std::move(w));
    }
    if (!out.complete) break;
  }
  return out;
}

PartitionResult finish(const CubeSet& input, CoreResult core, const Rational& eta, int factors) {
  PartitionResult res(input.shape());
  res.subspaces = std::move(core.subspaces);
  res.residual = std::move(core.residual);
  const Rational total(Integer(std::to_string(input.shape().size())));
  Index covered = 0;
  for (const auto& v : res.subspaces) covered += v.param_shape().size();
  res.covered_density = Rational(Integer(std::to_string(covered))) / total;
  res.covered_density.canonicalize();
  res.input_density = input.density();
  res.bound = res.input_density - 3 * factors * eta;
  res.precondition_met = core.precondition_met;
  res.complete = core.complete;
  res.rounds = core.rounds;
  return res;
}

}  // namespace

PartitionResult partition_insensitive(const CubeSet& d, int j, const PartitionOptions& options) {
  require_insensitive(d, j);
  WorkCounter work{options.budget};
  return finish(d, partition_core(d, options.d, options.m, options.eta, work), options.eta, 1);
}

PartitionResult partition_intersection(const std::vector<CubeSet>& factors, const PartitionOptions& options) {
  if (factors.empty()) throw InvalidArgument("partition_intersection needs at least one factor");
  const CubeShape& shape = factors[0].shape();
  if (static_cast<int>(factors.size()) != shape.k() - 1)
    throw InvalidArgument("partition_intersection needs exactly k-1 factors");
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (!(factors[j].shape() == shape)) throw InvalidArgument("factors live in different cubes");
    require_insensitive(factors[j], static_cast<int>(j) + 1);
  }
  const int outer_d = options.outer_d > 0 ? options.outer_d : options.m;
  const int outer_m = options.outer_m > 0 ? options.outer_m : outer_d;
  if (factors.size() > 1 && options.m > outer_d)
    throw InvalidArgument("the outer dimension must be at least the inner block length");

  CubeSet all = CubeSet::full(shape);
  for (const auto& f : factors) all &= f;
  WorkCounter work{options.budget};
  CoreResult core = partition_layers(factors, options, outer_d, outer_m, work);
  return finish(all, std::move(core), options.eta, static_cast<int>(factors.size()));
}

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::diagonal_increment: return "diagonal-increment";
    case Mechanism::correlation_increment: return "correlation-increment";
    case Mechanism::line_found: return "line-found";
    case Mechanism::exhausted: return "exhausted";
  }
  return "?";
}

DriverResult dhj_driver(const CubeSet& a, const DriverConfig& config) {
  const CubeShape& shape = a.shape();
  const int k = shape.k();
  if (k != 2 && k != 3) throw InvalidArgument("dhj_driver supports k = 2 and k = 3");

  DriverResult result;
  Rng rng(derive_seed(config.seed, "dhj_driver"));
  Subspace current = Subspace::identity(shape);
  CubeSet local = a;
  Rational density = a.density();

  auto record = [&](int iter, Mechanism mech, const Rational& before) {
    result.trace.iterations.push_back(IterationRecord{iter, mech, current, before, density});
  };

  for (int iter = 0;; ++iter) {
    if (auto line = find_line_in_set(local, SearchOptions{.include_degenerate = false, .budget = config.budget})) {
      Subspace mapped = current.compose(Subspace::from_line(*line));
      LinePattern original = LinePattern::from_point(mapped.encoding());
      for (Index i : original.point_indices())
        if (!a.contains(i)) throw Error("driver line does not replay inside the set");
      result.line = original;
      record(iter, Mechanism::line_found, density);
      break;
    }
    const int dim = current.dim();
    if (iter >= config.max_iterations || dim < 2 || density == 0) {
      record(iter, Mechanism::exhausted, density);
      break;
    }

    IncrementParams params = IncrementParams::for_chain(k, density, dim);
    params.m = config.m > 0 ? std::min(config.m, dim) : dim - 1;
    params.r = config.r > 0 ? std::min(config.r, params.m) : std::max(1, params.m - 1);
    params.d = std::max(1, std::min(config.d, params.r));
    params.m_within_bound = static_cast<long long>(params.m) * params.m * params.m * params.m <= dim;
    const int block = std::clamp(config.partition_m > 0 ? config.partition_m : params.d, params.d, params.r);

    auto diag = dense_diagonal(local, params.m,
                               DiagonalOptions{.eta = params.eta, .budget = config.budget, .rng = &rng, .samples = 4096});
    if (!diag.embedding) {
      record(iter, Mechanism::exhausted, density);
      break;
    }
    const Subspace v = diag.embedding->subspace(local.shape());
    CubeSet a_v = pull_back(local, v);
    const Rational before = density;
    if (diag.outcome == DiagonalCase::increment && a_v.density() > density) {
      current = current.compose(v);
      local = std::move(a_v);
      density = local.density();
      record(iter, Mechanism::diagonal_increment, before);
      continue;
    }

    std::optional<Subspace> next;
    Rational next_density;
    try {
      auto fs = forbidden_sets(a_v);
      auto corr = correlating_d(a_v, fs, params);
      auto restricted = restrict_to_uniform(
          a_v, corr.d, params.r, params,
          RestrictOptions{.exhaustive = false, .rng = &rng, .samples = 256, .budget = config.budget});
      const Subspace& w = *restricted.subspace;
      std::vector<CubeSet> pulled;
      for (const auto& f : corr.factors) pulled.push_back(pull_back(f, w));
      auto parts = partition_intersection(pulled, PartitionOptions{.d = params.d,
                                                                    .m = block,
                                                                    .outer_d = block,
                                                                    .outer_m = block,
                                                                    .eta = params.gamma * params.gamma / (6 * (k - 1)),
                                                                    .budget = config.budget});
      const CubeSet a_w = pull_back(a_v, w);
      std::optional<Subspace> best;
      Rational best_density;
      for (const auto& u : parts.subspaces) {
        Rational dens = pull_back(a_w, u).density();
        if (!best || dens > best_density || (dens == best_density && std::ranges::lexicographical_compare(u.tmpl(), best->tmpl()))) {
          best = u;
          best_density = dens;
        }
      }
      if (best && best_density > density) {
        next = v.compose(w).compose(*best);
        next_density = best_density;
      }
    } catch (const InvalidArgument&) {
      // A step whose input degenerates (for instance every cell empty) ends the run.
    }
    if (!next) {
      record(iter, Mechanism::exhausted, density);
      break;
    }
    current = current.compose(*next);
    local = pull_back(a, current);
    density = local.density();
    if (density != next_density) throw Error("driver density bookkeeping mismatch");
    record(iter, Mechanism::correlation_increment, before);
  }
  return result;
}

Json record_to_json(const IterationRecord& r) {
  return Json{{"iter", r.iter},
              {"mechanism", to_string(r.mechanism)},
              {"subspace", subspace_to_json(r.subspace)},
              {"density_before", to_string(r.density_before)},
              {"density_after", to_string(r.density_after)}};
}

Integer BoundsReport::r_of_n(const Integer& n) const {
  if (n < 0) throw InvalidArgument("n must be non-negative");
  Integer root;
  mpz_root(root.get_mpz_t(), n.get_mpz_t(), 4);
  return floor_of(delta * delta * delta * Rational(root) / Rational(r_divisor));
}

BoundsReport bounds_calculator(int k, const Rational& delta) {
  if (k != 3) throw InvalidArgument("explicit bounds are available for k = 3 only");
  if (delta <= 0 || delta > 1) throw InvalidArgument("delta must lie in (0, 1]");
  BoundsReport b;
  b.k = k;
  b.delta = delta;
  const Rational d2 = delta * delta;
  const Rational d3 = d2 * delta;
  b.theta = d2 / 32;
  b.gamma = d3 / 2304;
  b.beta = d3 / 1152;
  b.eta_diagonal = d2 * b.theta / (96 * k);
  b.eta_partition = b.gamma * b.gamma / (6 * (k - 1));
  b.pdhj2 = d2 / 2;
  b.iteration_bound = 3072 / d2;
  b.iteration_bound_gamma = 2 / b.gamma;
  b.tower_height = ceil_of(20000 / d2);
  b.r_formula = "floor(delta^3 * floor(n^(1/4)) / 41472)";
  b.d_formula = "(delta/2) * log^(6)(n)";
  b.mdhj2_formula = "25 * delta^(-2^d)";
  return b;
}

Json bounds_to_json(const BoundsReport& b) {
  return Json{{"k", b.k},
              {"delta", to_string(b.delta)},
              {"theta", to_string(b.theta)},
              {"gamma", to_string(b.gamma)},
              {"beta", to_string(b.beta)},
              {"eta_diagonal", to_string(b.eta_diagonal)},
              {"eta_partition", to_string(b.eta_partition)},
              {"pdhj2", to_string(b.pdhj2)},
              {"iteration_bound", to_string(b.iteration_bound)},
              {"iteration_bound_gamma", to_string(b.iteration_bound_gamma)},
              {"tower_height", b.tower_height.fits_slong_p() ? Json(b.tower_height.get_si()) : Json(b.tower_height.get_str())},
              {"r_divisor", b.r_divisor.get_str()},
              {"r_divisor_from_chain", b.r_divisor_from_chain.get_str()},
              {"r", b.r_formula},
              {"d", b.d_formula},
              {"mdhj2", b.mdhj2_formula}};
}

}  // namespace dhj
