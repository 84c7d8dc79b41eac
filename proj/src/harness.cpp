#include "dhj/harness.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "dhj/cube.hpp"
#include "dhj/extremal.hpp"
#include "dhj/rng.hpp"
#include "dhj/sperner.hpp"

namespace dhj {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::report_only: return "report-only";
    case Verdict::fail: return "fail";
  }
  return "?";
}

Json report_to_json(const VerificationReport& r) {
  return Json{{"lemma_id", r.lemma_id},
              {"params", r.params},
              {"computed", r.computed},
              {"paper_bound", r.paper_bound},
              {"precondition_met", r.precondition_met},
              {"verdict", to_string(r.verdict)},
              {"detail", r.detail}};
}

namespace {

struct Ctx {
  const Json& params;
  Rng& rng;
  const HarnessHooks& hooks;
  VerificationReport& report;

  int integer(const char* key) const { return params.at(key).get<int>(); }
  Rational rational(const char* key) const {
    const Json& v = params.at(key);
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw InvalidArgument(std::string("parameter ") + key + " must be an integer or a \"p/q\" string");
  }
  std::string text(const char* key) const { return params.at(key).get<std::string>(); }
  void put(const std::string& key, const Rational& r) { report.computed[key] = to_string(r); }
  template <typename T>
  void put(const std::string& key, const T& v) {
    report.computed[key] = v;
  }
  void verdict_from(bool holds) {
    report.verdict = report.precondition_met ? (holds ? Verdict::pass : Verdict::fail) : Verdict::report_only;
  }
};

using CheckFn = std::function<void(Ctx&)>;

Rational ratio(std::uint64_t num, std::uint64_t den) {
  Rational r(Integer(std::to_string(num)), Integer(std::to_string(den)));
  r.canonicalize();
  return r;
}

struct Entry {
  std::string id;
  Json defaults;
  CheckFn run;
};

// Slice bookkeeping computed directly from digit counts, independent of the
// measures module.
struct SliceIndex {
  CubeShape shape;
  std::vector<int> slice_of;
  std::vector<std::vector<int>> counts;
  std::vector<Index> sizes;

  explicit SliceIndex(const CubeShape& s) : shape(s), slice_of(s.size()) {
    std::map<std::vector<int>, int> ids;
    for (Index i = 0; i < s.size(); ++i) {
      auto c = Point::from_index(s, i).value_counts();
      auto [it, inserted] = ids.emplace(c, static_cast<int>(counts.size()));
      if (inserted) {
        counts.push_back(c);
        sizes.push_back(0);
      }
      slice_of[i] = it->second;
      ++sizes[static_cast<std::size_t>(it->second)];
    }
  }

  // Slices occupied by points: all C(n+k-1, k-1) of them.
  std::size_t slices() const { return counts.size(); }

  bool nondegenerate(std::size_t s) const {
    for (int c : counts[s])
      if (c == 0) return false;
    return true;
  }

  std::vector<Index> hits(const CubeSet& a) const {
    std::vector<Index> h(slices(), 0);
    a.for_each([&](Index i) { ++h[static_cast<std::size_t>(slice_of[i])]; });
    return h;
  }

  Rational nu(const CubeSet& a) const {
    auto h = hits(a);
    Rational sum = 0;
    for (std::size_t s = 0; s < slices(); ++s)
      if (h[s] != 0) sum += ratio(h[s], sizes[s]);
    sum /= static_cast<unsigned long>(slices());
    return sum;
  }

  Rational nu_tilde(const CubeSet& a) const {
    auto h = hits(a);
    Rational sum = 0;
    unsigned long live = 0;
    for (std::size_t s = 0; s < slices(); ++s) {
      if (!nondegenerate(s)) continue;
      ++live;
      if (h[s] != 0) sum += ratio(h[s], sizes[s]);
    }
    if (live == 0) throw InvalidArgument("no non-degenerate slice");
    return sum / live;
  }
};

CubeSet random_set(const CubeShape& shape, Rng& rng, unsigned percent = 50) {
  CubeSet a(shape);
  for (Index i = 0; i < shape.size(); ++i)
    if (rng.below(100) < percent) a.insert(i);
  return a;
}

Distribution random_distribution(const CubeShape& shape, Rng& rng) {
  std::vector<Rational> p(shape.size());
  unsigned long total = 0;
  for (auto& v : p) {
    unsigned long w = rng.below(10);
    v = Rational(static_cast<long>(w));
    total += w;
  }
  if (total == 0) {
    p[0] = 1;
    total = 1;
  }
  for (auto& v : p) v /= total;
  return Distribution(shape, std::move(p));
}

void require_small(const CubeShape& shape, Index limit, const char* what) {
  if (shape.size() > limit) throw BudgetExceeded(what, shape.size(), limit);
}

// --- L1.6: MDHJ from DHJ -----------------------------------------------------

// Canonical templates of e-dimensional subspaces of [k]^m: every wildcard
// used, first occurrences in increasing order.
Integer count_subspace_templates(int k, int e, int m) {
  CubeShape enc(k + e, m);
  Integer count = 0;
  for (Index t = 0; t < enc.size(); ++t) {
    Point p = Point::from_index(enc, t);
    int next = 1;
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      int v = p[i];
      if (v <= k) continue;
      if (v - k > next) ok = false;
      if (v - k == next) ++next;
    }
    if (ok && next == e + 1) ++count;
  }
  return count;
}

Integer stirling2(int n, int r) {
  std::vector<std::vector<Integer>> s(static_cast<std::size_t>(n + 1), std::vector<Integer>(static_cast<std::size_t>(r + 1), 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= std::min(i, r); ++j)
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          j * s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] +
          s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  return s[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)];
}

void check_l16(Ctx& c) {
  const int k = c.integer("k");
  const int d = c.integer("d");
  const int m = c.integer("m");
  const int n = c.integer("n");
  const Rational delta = c.rational("delta");
  if (d < 2 || m < d - 1 || n <= m || k < 1) throw InvalidArgument("L1.6 needs d >= 2, m >= d-1 and n > m");
  const int e = d - 1;
  require_small(CubeShape(k + e, m), 10'000'000, "L1.6 template enumeration");
  require_small(CubeShape(k, n), 1u << 16, "L1.6 toy reduction");

  Integer enumerated = count_subspace_templates(k, e, m);
  Integer formula = 0;
  for (int j = e; j <= m; ++j) {
    Integer pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(m - j));
    formula += binomial(static_cast<unsigned long>(m), static_cast<unsigned long>(j)) * pk * stirling2(j, e);
  }
  Integer big_m;
  mpz_ui_pow_ui(big_m.get_mpz_t(), static_cast<unsigned long>(k + d - 1), static_cast<unsigned long>(m));
  c.put("subspace_count", enumerated.get_str());
  c.put("subspace_count_formula", formula.get_str());
  c.put("M", big_m.get_str());
  const bool counting = enumerated == formula && enumerated <= big_m;

  // Toy run of the reduction on a random set of density about delta.
  const CubeShape shape(k, n);
  const CubeShape head(k, m);
  const CubeShape tail(k, n - m);
  CubeSet a(shape);
  const unsigned percent = static_cast<unsigned>(std::lround(100 * to_double(delta)));
  for (Index i = 0; i < shape.size(); ++i)
    if (c.rng.below(100) < percent) a.insert(i);
  const Rational dens = a.density();
  std::map<std::vector<int>, CubeSet> g_sigma;
  Index good = 0;
  for (Index y = 0; y < tail.size(); ++y) {
    CubeSet ay(head);
    for (Index x = 0; x < head.size(); ++x)
      if (a.contains(x * tail.size() + y)) ay.insert(x);
    if (ay.density() < dens / 2) continue;
    ++good;
    if (auto sigma = find_subspace_in_set(ay, e)) {
      std::vector<int> key(sigma->tmpl().begin(), sigma->tmpl().end());
      g_sigma.try_emplace(key, tail);
    }
  }
  // Every y whose fibre contains sigma, not only those where sigma was the first find.
  for (auto& [key, g] : g_sigma) {
    Subspace sigma(head, e, key);
    auto pts = sigma.point_indices();
    for (Index y = 0; y < tail.size(); ++y) {
      bool inside = true;
      for (Index x : pts) inside = inside && a.contains(x * tail.size() + y);
      if (inside) g.insert(y);
    }
  }
  const bool good_dense = ratio(good, tail.size()) >= dens / 2;
  c.put("density", dens);
  c.put("good_fraction", ratio(good, tail.size()));

  bool replay = true;
  bool found = false;
  for (auto& [key, g] : g_sigma) {
    auto line = find_line_in_set(g);
    if (!line) continue;
    // sigma on the head coordinates, the line on the tail with wildcard set W_d.
    std::vector<int> tmpl(key);
    for (int i = 0; i < n - m; ++i) {
      int s = (*line)[i];
      tmpl.push_back(s == kWildcard ? k + d : s);
    }
    Subspace v(shape, d, std::move(tmpl));
    for (Index i : v.point_indices()) replay = replay && a.contains(i);
    found = true;
    c.put("subspace", v.str());
    break;
  }
  c.put("reduction_found", found);
  c.report.paper_bound = "(k+d-1)^m = " + big_m.get_str();
  c.report.precondition_met = true;
  c.report.verdict = counting && good_dense && replay ? Verdict::pass : Verdict::fail;
  c.report.detail = "subspace count against (k+d-1)^m; good fibres have density >= delta/2; sigma x line lies in A";
}

// --- L2.2: E mu(X ∩ X') >= delta^2 -------------------------------------------

void check_l22(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int family = c.integer("family");
  require_small(shape, 1u << 20, "L2.2");
  if (family < 1) throw InvalidArgument("family must be positive");
  std::vector<CubeSet> xs;
  for (int g = 0; g < family; ++g) xs.push_back(random_set(shape, c.rng, static_cast<unsigned>(c.rng.below(101))));
  Rational delta = 0;
  for (const auto& x : xs) delta += x.density();
  delta /= family;
  Rational pair = 0;
  for (const auto& x : xs)
    for (const auto& y : xs) pair += (x & y).density();
  pair /= static_cast<long>(family) * family;
  c.put("delta", delta);
  c.put("pair_intersection", pair);
  c.report.paper_bound = to_string(delta * delta);
  c.report.precondition_met = true;
  c.verdict_from(pair >= delta * delta);
}

// --- L3.1: line density >= delta^2 (n+1)/(n+2) ----------------------------------

void check_l31(Ctx& c) {
  const int n = c.integer("n");
  const bool exhaustive = c.params.at("exhaustive").get<bool>();
  const int samples = c.integer("samples");
  LineDensityTable table(n);
  const CubeShape shape(2, n);
  Index checked = 0;
  Index violations = 0;
  std::optional<Rational> margin;
  auto score = [&](const CubeSet& a) {
    auto s = table.evaluate(a);
    ++checked;
    if (!s.holds()) ++violations;
    Rational gap = s.line_density - s.bound;
    if (!margin || gap < *margin) margin = gap;
  };
  if (exhaustive) {
    if (n > 4) throw BudgetExceeded("L3.1 exhaustive", Index{1} << std::min<Index>(shape.size(), 63), Index{1} << 16);
    const Index subsets = Index{1} << shape.size();
    for (Index mask = 0; mask < subsets; ++mask) {
      CubeSet a(shape);
      a.words()[0] = mask;
      score(a);
    }
  } else {
    for (int s = 0; s < samples; ++s) score(random_set(shape, c.rng, static_cast<unsigned>(c.rng.below(101))));
  }
  c.put("sets_checked", checked);
  c.put("violations", violations);
  if (margin) c.put("min_margin", *margin);
  c.report.paper_bound = "delta^2 (n+1)/(n+2)";
  c.report.precondition_met = true;
  c.verdict_from(violations == 0);
}

// --- L3.2 .. L3.5: slice probabilities -----------------------------------------

void check_l32(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  require_small(shape, 1u << 22, "L3.2");
  SliceIndex idx(shape);
  CubeSet no_k = CubeSet::from_predicate(shape, [&](const Point& p) { return p.value_counts().back() == 0; });
  Rational exact = idx.nu(no_k);
  Rational formula = degenerate_prob(shape);
  c.put("enumerated", exact);
  c.put("formula", formula);
  const Rational stated = ratio(static_cast<std::uint64_t>(shape.k() - 1), static_cast<std::uint64_t>(shape.n() + shape.k() - 1));
  c.report.paper_bound = to_string(stated);
  c.report.precondition_met = true;
  c.verdict_from(exact == formula && formula == stated);
}

void check_l33(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int samples = c.integer("samples");
  require_small(shape, 1u << 22, "L3.3");
  SliceIndex idx(shape);
  const Rational bound = ratio(static_cast<std::uint64_t>(shape.k() * shape.k()), static_cast<std::uint64_t>(shape.n()));
  Rational worst = 0;
  Index violations = 0;
  c.report.precondition_met = shape.n() >= shape.k();
  if (c.report.precondition_met) {
    for (int s = 0; s < samples; ++s) {
      CubeSet a = random_set(shape, c.rng, static_cast<unsigned>(c.rng.below(101)));
      Rational gap = abs(idx.nu(a) - idx.nu_tilde(a));
      if (gap > worst) worst = gap;
      if (gap > bound) ++violations;
    }
  }
  c.put("max_difference", worst);
  c.put("violations", violations);
  c.report.paper_bound = to_string(bound);
  c.verdict_from(violations == 0);
}

// Slice-level probability that the count predicate holds.
Rational slice_probability(const CubeShape& shape, const std::function<bool(std::span<const int>)>& pred) {
  Index hit = 0;
  Index all = 0;
  for_each_slice(shape, [&](std::span<const int> counts) {
    ++all;
    if (pred(counts)) ++hit;
  });
  return ratio(hit, all);
}

void check_l34(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int m = c.integer("m");
  if (m < 1 || m > shape.n()) throw InvalidArgument("L3.4 needs 1 <= m <= n");
  auto lib = few_k_prob_bound(shape, m);
  Rational direct = slice_probability(shape, [&](std::span<const int> a) { return a.back() < m; });
  c.put("exact", direct);
  c.put("library", lib.exact);
  c.report.paper_bound = to_string(lib.bound);
  c.report.precondition_met = shape.n() >= m * shape.k();
  if (direct != lib.exact)
    c.report.verdict = Verdict::fail;
  else
    c.verdict_from(direct <= lib.bound);
}

void check_l35(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int m = c.integer("m");
  if (m < 1 || m > shape.n()) throw InvalidArgument("L3.5 needs 1 <= m <= n");
  auto lib = few_any_prob_bound(shape, m);
  Rational direct = slice_probability(shape, [&](std::span<const int> a) {
    for (int v : a)
      if (v < m) return true;
    return false;
  });
  c.put("exact", direct);
  c.put("library", lib.exact);
  c.report.paper_bound = to_string(lib.bound);
  c.report.precondition_met = shape.n() >= m * shape.k();
  if (direct != lib.exact)
    c.report.verdict = Verdict::fail;
  else
    c.verdict_from(direct <= lib.bound);
}

// --- L3.6: special subspace then point is non-degenerate equal-slices ----------

void check_l36(Ctx& c) {
  const int k = c.integer("k");
  const int d = c.integer("d");
  const CubeShape shape(k, c.integer("n"));
  c.report.paper_bound = "composed law equals the non-degenerate equal-slices measure";
  c.report.precondition_met = d >= k && shape.n() >= k + d;
  if (d < k) {
    c.report.verdict = Verdict::report_only;
    c.report.detail = "undefined: a non-degenerate equal-slices point of [k]^d needs d >= k";
    return;
  }
  Distribution composed = special_subspace_composed_law(shape, d, c.hooks.point_prob);
  Distribution target = nondegenerate_distribution(shape);
  Rational tv = tv_distance(composed, target);
  c.put("tv", tv);
  c.put("total", composed.total());
  c.verdict_from(composed == target);
}

// --- L3.8: explicit PDHJ constant ---------------------------------------------

void check_l38(Ctx& c) {
  const int k = c.integer("k");
  const int n = c.integer("n");
  const Rational delta = c.rational("delta");
  const int samples = c.integer("samples");
  if (k != 2) throw InvalidArgument("L3.8 is checked for k = 2");
  if (delta <= 0 || delta > 1) throw InvalidArgument("delta must lie in (0, 1]");
  // By LYM an antichain of [2]^m has equal-slices mass at most 1/(m+1) and a
  // full layer attains it, so EDHJ(2, x) = floor(1/x).
  const Rational inv = 4 / delta;
  Integer m_edhj;
  mpz_fdiv_q(m_edhj.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
  Integer kp;
  mpz_ui_pow_ui(kp.get_mpz_t(), static_cast<unsigned long>(k + 1), m_edhj.get_ui());
  const Rational theta = delta / 9 / Rational(kp);
  LineDensityTable table(n);
  const CubeShape shape(2, n);
  SliceIndex idx(shape);
  std::optional<Rational> worst;
  Index violations = 0;
  for (int s = 0; s < samples; ++s) {
    CubeSet a(shape);
    auto order = c.rng.permutation(static_cast<int>(shape.size()));
    for (int i : order) {
      if (idx.nu(a) >= delta) break;
      a.insert(static_cast<Index>(i));
    }
    Rational lines = table.evaluate(a).nondegenerate_line_density;
    if (!worst || lines < *worst) worst = lines;
    if (lines < theta) ++violations;
  }
  c.put("edhj_m", m_edhj.get_str());
  c.put("theta", theta);
  if (worst) c.put("min_line_density", *worst);
  c.put("violations", violations);
  c.report.paper_bound = to_string(theta);
  c.report.precondition_met = Integer(n) >= m_edhj && Rational(n) >= Rational(4 * k * k) / delta;
  c.verdict_from(violations == 0);
}

// --- L6.2: averaging --------------------------------------------------------------

void check_l62(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int count = c.integer("measures");
  const int sets = c.integer("sets");
  require_small(shape, 4096, "L6.2");
  Distribution mu = random_distribution(shape, c.rng);
  std::vector<Distribution> nus;
  std::vector<Rational> weights;
  Rational wsum = 0;
  for (int i = 0; i < count; ++i) {
    nus.push_back(random_distribution(shape, c.rng));
    weights.emplace_back(static_cast<long>(c.rng.below(9) + 1));
    wsum += weights.back();
  }
  Distribution mix(shape);
  for (int i = 0; i < count; ++i)
    for (Index x = 0; x < shape.size(); ++x)
      mix[x] += weights[static_cast<std::size_t>(i)] / wsum * nus[static_cast<std::size_t>(i)][x];
  const Rational eta = tv_distance(mu, mix);
  Index violations = 0;
  for (int s = 0; s < sets; ++s) {
    CubeSet a = random_set(shape, c.rng);
    Rational alpha = mu.measure(a);
    bool ok = false;
    for (const auto& nu : nus) ok = ok || nu.measure(a) >= alpha - eta;
    if (!ok) ++violations;
  }
  c.put("eta", eta);
  c.put("violations", violations);
  c.report.paper_bound = "max_i nu_i(A) >= mu(A) - eta";
  c.report.precondition_met = true;
  c.verdict_from(violations == 0);
}

// --- L6.3: balanced coordinates (Monte Carlo) -------------------------------------

void check_l63(Ctx& c) {
  const int n = c.integer("n");
  const int k = c.integer("k");
  const int samples = c.integer("samples");
  if (n < 1 || k < 1 || samples < 1) throw InvalidArgument("L6.3 needs positive n, k and samples");
  const double spread = std::pow(static_cast<double>(n), 2.0 / 3.0);
  const double centre = static_cast<double>(n) / k;
  Index bad = 0;
  std::vector<int> counts(static_cast<std::size_t>(k));
  for (int s = 0; s < samples; ++s) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) ++counts[c.rng.below(static_cast<std::uint64_t>(k))];
    for (int v : counts)
      if (std::abs(v - centre) > spread) {
        ++bad;
        break;
      }
  }
  const double bound = 2.0 * k * std::exp(-2.0 * std::cbrt(static_cast<double>(n)));
  c.put("violations", bad);
  c.put("samples", samples);
  c.put("rate", static_cast<double>(bad) / samples);
  c.put("bound", bound);
  c.report.paper_bound = "2k exp(-2 n^(1/3))";
  c.report.precondition_met = false;
  c.report.verdict = Verdict::report_only;
  c.report.detail = "Monte Carlo estimate; printed next to the bound, not asserted";
}

// --- L6.4 .. L6.9: restriction distributions ------------------------------------

Distribution inner_law(const std::string& name, const CubeShape& inner) {
  if (name == "uniform") return uniform_distribution(inner);
  if (name == "equal_slices") return equal_slices_distribution(inner);
  throw InvalidArgument("inner law must be uniform or equal_slices");
}

bool large_n(int n, int k, const Rational& eta) {
  Rational base = Rational(16 * k) / eta;
  Rational p = 1;
  for (int i = 0; i < 12; ++i) p *= base;
  return Rational(n) >= p;
}

void check_l64(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int m = c.integer("m");
  const std::string inner = c.text("inner");
  const Rational eta = c.rational("eta");
  Distribution composed =
      composed_restriction_distribution(shape, m, inner_law(inner, CubeShape(shape.k(), m)), YLaw::uniform);
  Rational tv = tv_distance(composed, uniform_distribution(shape));
  c.put("tv", tv);
  c.report.paper_bound = to_string(eta);
  if (inner == "uniform") {
    c.report.precondition_met = true;
    c.report.detail = "uniform inner law: the average is exactly uniform";
    c.verdict_from(tv == 0);
    return;
  }
  c.report.precondition_met = static_cast<long long>(m) * m * m * m <= shape.n() && large_n(shape.n(), shape.k(), eta);
  c.verdict_from(tv <= eta);
}

void check_l65_66(Ctx& c, bool smaller_alphabet) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int m = c.integer("m");
  const Rational eta = c.rational("eta");
  if (smaller_alphabet && shape.k() < 2) throw InvalidArgument("needs k >= 2");
  const CubeShape inner(smaller_alphabet ? shape.k() - 1 : shape.k(), m);
  Distribution composed = composed_restriction_distribution(shape, m, equal_slices_distribution(inner), YLaw::uniform);
  Rational tv = tv_distance(composed, uniform_distribution(shape));
  CubeSet a = random_set(shape, c.rng);
  Rational delta = a.density();
  Rational expected = composed.measure(a);
  c.put("delta", delta);
  c.put("expected_density", expected);
  c.put("tv", tv);
  c.report.paper_bound = to_string(delta - eta);
  // |E - delta| <= tv holds for every set; delta - eta is only claimed for large n.
  const bool tv_consistent = abs(expected - delta) <= tv;
  if (!tv_consistent) {
    c.report.precondition_met = true;
    c.report.verdict = Verdict::fail;
    c.report.detail = "expected density differs from delta by more than the total variation distance";
    return;
  }
  c.report.precondition_met = static_cast<long long>(m) * m * m * m <= shape.n() && large_n(shape.n(), shape.k(), eta);
  c.verdict_from(expected >= delta - eta);
  if (!c.report.precondition_met) c.report.detail = "|E - delta| <= tv verified exactly";
}

void check_l67(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int m = c.integer("m");
  const Rational beta = c.rational("beta");
  if (m >= shape.n()) throw InvalidArgument("L6.7 needs m < n");
  Distribution composed =
      composed_restriction_distribution(shape, m, uniform_distribution(CubeShape(shape.k(), m)), YLaw::equal_slices);
  const Rational r = transfer_ratio(shape.n(), shape.k(), m);
  Index balanced = 0;
  Index mismatches = 0;
  for (Index z = 0; z < shape.size(); ++z) {
    Point p = Point::from_index(shape, z);
    auto counts = p.value_counts();
    bool full = true;
    for (int v : counts) full = full && v >= m;
    if (!full) continue;
    ++balanced;
    if (composed[z] != r * equal_slices_prob(shape, counts)) ++mismatches;
  }
  CubeSet a = random_set(shape, c.rng);
  Rational delta = equal_slices_measure(a);
  Rational prob = composed.measure(a);
  c.put("ratio", r);
  c.put("balanced_points", balanced);
  c.put("mismatches", mismatches);
  c.put("delta", delta);
  c.put("probability_in_A", prob);
  c.put("within_beta", abs(prob - delta) <= beta);
  c.report.paper_bound = "prob(z) = r_{n,k,m} nu(z) on balanced z";
  c.report.precondition_met = true;
  c.verdict_from(mismatches == 0 && balanced > 0);
  const bool window = Rational(m) <= beta * shape.n() / (8 * shape.k()) &&
                      Rational(m) <= beta * shape.n() / (2 * shape.k() * shape.k());
  c.put("beta_window_precondition", window);
  if (window && abs(prob - delta) > beta) c.report.verdict = Verdict::fail;
}

void check_l69(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  const int m = c.integer("m");
  const Rational eta = c.rational("eta");
  if (shape.k() < 2) throw InvalidArgument("L6.9 needs k >= 2");
  Distribution composed =
      composed_restriction_distribution(shape, m, uniform_distribution(CubeShape(shape.k() - 1, m)), YLaw::uniform);
  Rational tv = tv_distance(composed, uniform_distribution(shape));
  c.put("tv", tv);
  c.report.paper_bound = to_string(eta);
  Rational base = Rational(12) / eta;
  Rational p = 1;
  for (int i = 0; i < 12; ++i) p *= base;
  c.report.precondition_met = static_cast<long long>(m) * m * m * m <= shape.n() && Rational(shape.n()) >= p;
  c.verdict_from(tv <= eta);
}


// --- T3.7: equal-slices DHJ against uniform DHJ on extremal witnesses ----------

void check_t37(Ctx& c) {
  const CubeShape shape(c.integer("k"), c.integer("n"));
  if (shape.k() > 3 || shape.size() > 81) throw BudgetExceeded("T3.7 exhaustive search", shape.size(), 81);
  ExtremalOptions opts;
  opts.workers = 1;
  SearchResult best = max_linefree(shape, opts);
  const CubeSet& w = best.witness;
  const bool witness_ok = best.optimal && !find_line_in_set(w) && w.count() == static_cast<Index>(best.best_size);
  const Rational mu = w.density();
  const Rational nu = equal_slices_measure(w);
  c.put("max_linefree", best.best_size);
  c.put("uniform_density", mu);
  c.put("equal_slices_density", nu);
  c.put("witness_valid", witness_ok);
  c.report.precondition_met = true;
  if (shape.k() == 2) {
    // LYM: an antichain has equal-slices mass at most 1/(n+1).
    const Rational lym = ratio(1, static_cast<std::uint64_t>(shape.n() + 1));
    c.report.paper_bound = to_string(lym);
    c.verdict_from(witness_ok && nu <= lym);
  } else {
    c.report.paper_bound = "uniform threshold c_{n,k}/k^n";
    c.report.verdict = witness_ok ? Verdict::report_only : Verdict::fail;
    c.report.detail = "both densities of an optimal line-free set; no transfer inequality is asserted at this scale";
  }
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"L1.6", {{"k", 2}, {"d", 2}, {"m", 3}, {"n", 6}, {"delta", "3/4"}}, check_l16},
      {"L2.2", {{"k", 2}, {"n", 4}, {"family", 8}}, check_l22},
      {"L3.1", {{"n", 3}, {"exhaustive", true}, {"samples", 200}}, check_l31},
      {"L3.2", {{"n", 4}, {"k", 3}}, check_l32},
      {"L3.3", {{"n", 12}, {"k", 3}, {"samples", 100}}, check_l33},
      {"L3.4", {{"n", 10}, {"k", 2}, {"m", 2}}, check_l34},
      {"L3.5", {{"n", 20}, {"k", 3}, {"m", 2}}, check_l35},
      {"L3.6", {{"k", 2}, {"d", 2}, {"n", 5}}, check_l36},
      {"T3.7", {{"k", 2}, {"n", 4}}, check_t37},
      {"L3.8", {{"k", 2}, {"n", 8}, {"delta", "1/2"}, {"samples", 50}}, check_l38},
      {"L6.2", {{"k", 2}, {"n", 3}, {"measures", 3}, {"sets", 50}}, check_l62},
      {"L6.3", {{"n", 10000}, {"k", 3}, {"samples", 2000}}, check_l63},
      {"L6.4", {{"n", 4}, {"k", 2}, {"m", 1}, {"inner", "equal_slices"}, {"eta", "1/10"}}, check_l64},
      {"L6.5", {{"n", 4}, {"k", 2}, {"m", 1}, {"eta", "1/10"}}, [](Ctx& c) { check_l65_66(c, false); }},
      {"L6.6", {{"n", 4}, {"k", 3}, {"m", 1}, {"eta", "1/10"}}, [](Ctx& c) { check_l65_66(c, true); }},
      {"L6.7", {{"n", 3}, {"k", 2}, {"m", 1}, {"beta", "1/2"}}, check_l67},
      {"L6.9", {{"n", 4}, {"k", 3}, {"m", 1}, {"eta", "1/10"}}, check_l69},
  };
  return entries;
}

const Entry& find_entry(const std::string& id) {
  for (const auto& e : registry())
    if (e.id == id) return e;
  throw InvalidArgument("unknown lemma id: " + id);
}

}  // namespace

std::vector<std::string> registered_lemmas() {
  std::vector<std::string> ids;
  for (const auto& e : registry()) ids.push_back(e.id);
  return ids;
}

VerificationReport verify(const std::string& lemma_id, const Json& params, std::uint64_t seed,
                          const HarnessHooks& hooks) {
  const Entry& entry = find_entry(lemma_id);
  if (!params.is_object()) throw InvalidArgument("lemma parameters must be a JSON object");
  Json resolved = entry.defaults;
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!resolved.contains(it.key())) throw InvalidArgument(lemma_id + " has no parameter " + it.key());
    resolved[it.key()] = it.value();
  }
  VerificationReport report;
  report.lemma_id = lemma_id;
  report.params = resolved;
  report.computed = Json::object();
  Rng rng(derive_seed(seed, lemma_id + resolved.dump()));
  Ctx ctx{resolved, rng, hooks, report};
  try {
    entry.run(ctx);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(lemma_id + ": bad parameter: " + e.what());
  }
  return report;
}

std::vector<VerificationReport> verify_all(Suite suite, std::uint64_t seed, const HarnessHooks& hooks) {
  std::vector<std::pair<std::string, Json>> plan = {
      {"L1.6", Json::object()},
      {"L1.6", {{"k", 3}, {"d", 2}, {"m", 2}, {"n", 5}}},
      {"L2.2", Json::object()},
      {"L2.2", {{"k", 3}, {"n", 3}, {"family", 12}}},
      {"L3.1", Json::object()},
      {"L3.1", {{"n", 4}}},
      {"L3.1", {{"n", 8}, {"exhaustive", false}}},
      {"L3.2", Json::object()},
      {"L3.2", {{"n", 10}, {"k", 4}}},
      {"L3.3", {{"n", 8}, {"k", 3}, {"samples", 30}}},
      {"L3.4", Json::object()},
      {"L3.4", {{"n", 12}, {"k", 3}, {"m", 3}}},
      {"L3.5", Json::object()},
      {"L3.6", Json::object()},
      {"L3.6", {{"k", 3}, {"d", 3}, {"n", 6}}},
      {"L3.6", {{"k", 2}, {"d", 3}, {"n", 6}}},
      {"T3.7", Json::object()},
      {"T3.7", {{"k", 3}, {"n", 3}}},
      {"L3.8", Json::object()},
      {"L6.2", Json::object()},
      {"L6.3", Json::object()},
      {"L6.4", Json::object()},
      {"L6.4", {{"inner", "uniform"}}},
      {"L6.4", {{"inner", "uniform"}, {"k", 3}, {"n", 4}, {"m", 2}}},
      {"L6.5", Json::object()},
      {"L6.6", Json::object()},
      {"L6.7", Json::object()},
      {"L6.7", {{"n", 4}, {"k", 2}, {"m", 1}}},
      {"L6.7", {{"n", 5}, {"k", 3}, {"m", 1}}},
      {"L6.7", {{"n", 5}, {"k", 2}, {"m", 2}}},
      {"L6.9", Json::object()},
  };
  if (suite == Suite::full) {
    plan.insert(plan.end(), {
                                {"L3.1", {{"n", 12}, {"exhaustive", false}, {"samples", 500}}},
                                {"L3.3", Json::object()},
                                {"L3.5", {{"n", 30}, {"k", 4}, {"m", 3}}},
                                {"L3.6", {{"k", 3}, {"d", 4}, {"n", 7}}},
                                {"T3.7", {{"k", 2}, {"n", 6}}},
                                {"L3.8", {{"n", 12}, {"samples", 100}}},
                                {"L6.3", {{"samples", 100000}}},
                                {"L6.4", {{"n", 6}, {"k", 3}, {"m", 2}}},
                                {"L6.7", {{"n", 6}, {"k", 3}, {"m", 2}}},
                                {"L6.9", {{"n", 6}, {"k", 3}, {"m", 2}}},
                            });
  }
  std::vector<VerificationReport> out;
  out.reserve(plan.size());
  for (const auto& [id, params] : plan) out.push_back(verify(id, params, seed, hooks));
  return out;
}

bool all_passed(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (r.verdict == Verdict::fail) return false;
  return true;
}

}  // namespace dhj
