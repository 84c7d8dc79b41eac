#include "dhj/cube.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace dhj {

std::optional<Index> checked_pow(Index base, int exponent) {
  constexpr Index kLimit = Index{1} << 63;
  Index result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && result > kLimit / base) return std::nullopt;
    result *= base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// CubeShape

CubeShape::CubeShape(int k, int n) : k_(k), n_(n) {
  if (k < 1) throw InvalidArgument("alphabet size k must be >= 1, got " + std::to_string(k));
  if (n < 1) throw InvalidArgument("dimension n must be >= 1, got " + std::to_string(n));
  auto size = checked_pow(static_cast<Index>(k), n);
  if (!size) throw InvalidArgument("k^n does not fit the index width for " + str());
  size_ = *size;
  weights_.resize(static_cast<std::size_t>(n));
  Index w = 1;
  for (int i = n - 1; i >= 0; --i) {
    weights_[static_cast<std::size_t>(i)] = w;
    w *= static_cast<Index>(k);
  }
}

std::string CubeShape::str() const {
  return "[" + std::to_string(k_) + "]^" + std::to_string(n_);
}

// ---------------------------------------------------------------------------
// Point

namespace {

int digit_from_char(char c) {
  if (c >= '1' && c <= '9') return c - '0';
  return -1;
}

char char_from_digit(int d) { return static_cast<char>('0' + d); }

}  // namespace

Point::Point(CubeShape shape, std::vector<int> digits) : shape_(std::move(shape)), digits_(std::move(digits)) {
  if (static_cast<int>(digits_.size()) != shape_.n())
    throw InvalidArgument("point has " + std::to_string(digits_.size()) + " digits, expected " +
                          std::to_string(shape_.n()));
  for (int d : digits_)
    if (d < 1 || d > shape_.k())
      throw InvalidArgument("digit " + std::to_string(d) + " outside [1, " + std::to_string(shape_.k()) + "]");
}

Point Point::from_index(const CubeShape& shape, Index index) {
  if (index >= shape.size())
    throw InvalidArgument("point index " + std::to_string(index) + " out of range for " + shape.str());
  std::vector<int> digits(static_cast<std::size_t>(shape.n()));
  auto k = static_cast<Index>(shape.k());
  for (int i = shape.n() - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<int>(index % k) + 1;
    index /= k;
  }
  return Point(shape, std::move(digits));
}

Point Point::parse(const CubeShape& shape, std::string_view text) {
  std::vector<int> digits;
  digits.reserve(text.size());
  for (char c : text) {
    int d = digit_from_char(c);
    if (d < 0) throw InvalidArgument("bad digit '" + std::string(1, c) + "' in point '" + std::string(text) + "'");
    digits.push_back(d);
  }
  return Point(shape, std::move(digits));
}

Index Point::index() const {
  Index index = 0;
  for (int i = 0; i < shape_.n(); ++i)
    index += static_cast<Index>(digits_[static_cast<std::size_t>(i)] - 1) * shape_.weight(i);
  return index;
}

std::vector<int> Point::value_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(shape_.k()), 0);
  for (int d : digits_) ++counts[static_cast<std::size_t>(d - 1)];
  return counts;
}

bool Point::has_all_values() const {
  auto counts = value_counts();
  return std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; });
}

std::string Point::str() const {
  std::string out;
  if (shape_.k() <= 9) {
    for (int d : digits_) out.push_back(char_from_digit(d));
    return out;
  }
  out = "(";
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(digits_[i]);
  }
  return out + ")";
}

Point value_substitute(const Point& x, int from, int to) {
  int k = x.shape().k();
  if (from < 1 || from > k || to < 1 || to > k) throw InvalidArgument("value_substitute: values must lie in [k]");
  std::vector<int> digits(x.digits().begin(), x.digits().end());
  for (int& d : digits)
    if (d == from) d = to;
  return Point(x.shape(), std::move(digits));
}

// ---------------------------------------------------------------------------
// LinePattern

LinePattern::LinePattern(CubeShape shape, std::vector<int> symbols)
    : shape_(std::move(shape)), symbols_(std::move(symbols)) {
  if (static_cast<int>(symbols_.size()) != shape_.n())
    throw InvalidArgument("line pattern has wrong length");
  for (int s : symbols_)
    if (s != kWildcard && (s < 1 || s > shape_.k())) throw InvalidArgument("line pattern symbol outside [k] ∪ {*}");
}

LinePattern LinePattern::parse(const CubeShape& shape, std::string_view text) {
  std::vector<int> symbols;
  for (char c : text) {
    if (c == '*') {
      symbols.push_back(kWildcard);
    } else if (int d = digit_from_char(c); d > 0) {
      symbols.push_back(d);
    } else {
      throw InvalidArgument("bad symbol '" + std::string(1, c) + "' in line pattern");
    }
  }
  return LinePattern(shape, std::move(symbols));
}

LinePattern LinePattern::from_point(const Point& y) {
  int k = y.shape().k() - 1;
  if (k < 1) throw InvalidArgument("line encoding needs an alphabet of size >= 2");
  std::vector<int> symbols(y.digits().begin(), y.digits().end());
  for (int& s : symbols)
    if (s == k + 1) s = kWildcard;
  return LinePattern(CubeShape(k, y.n()), std::move(symbols));
}

bool LinePattern::degenerate() const {
  return std::none_of(symbols_.begin(), symbols_.end(), [](int s) { return s == kWildcard; });
}

std::vector<int> LinePattern::wildcards() const {
  std::vector<int> out;
  for (int i = 0; i < shape_.n(); ++i)
    if (symbols_[static_cast<std::size_t>(i)] == kWildcard) out.push_back(i);
  return out;
}

std::vector<Point> LinePattern::points() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(shape_.k()));
  for (int j = 1; j <= shape_.k(); ++j) {
    std::vector<int> digits(symbols_);
    for (int& d : digits)
      if (d == kWildcard) d = j;
    out.emplace_back(shape_, std::move(digits));
  }
  return out;
}

std::vector<Index> LinePattern::point_indices() const {
  Index base = 0;
  Index step = 0;
  for (int i = 0; i < shape_.n(); ++i) {
    int s = symbols_[static_cast<std::size_t>(i)];
    if (s == kWildcard)
      step += shape_.weight(i);
    else
      base += static_cast<Index>(s - 1) * shape_.weight(i);
  }
  std::vector<Index> out(static_cast<std::size_t>(shape_.k()));
  for (int j = 0; j < shape_.k(); ++j) out[static_cast<std::size_t>(j)] = base + static_cast<Index>(j) * step;
  return out;
}

Point LinePattern::to_point() const {
  std::vector<int> digits(symbols_);
  for (int& d : digits)
    if (d == kWildcard) d = shape_.k() + 1;
  return Point(CubeShape(shape_.k() + 1, shape_.n()), std::move(digits));
}

std::string LinePattern::str() const {
  std::string out;
  for (int s : symbols_) {
    if (s == kWildcard)
      out.push_back('*');
    else if (s <= 9)
      out.push_back(char_from_digit(s));
    else
      out += "(" + std::to_string(s) + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subspace

Subspace::Subspace(CubeShape shape, int dim, std::vector<int> tmpl)
    : shape_(std::move(shape)), dim_(dim), tmpl_(std::move(tmpl)) {
  if (dim_ < 1) throw InvalidArgument("subspace dimension must be >= 1");
  if (static_cast<int>(tmpl_.size()) != shape_.n()) throw InvalidArgument("subspace template has wrong length");
  const int k = shape_.k();
  std::vector<bool> used(static_cast<std::size_t>(dim_), false);
  wildcard_weights_.assign(static_cast<std::size_t>(dim_), 0);
  for (int i = 0; i < shape_.n(); ++i) {
    int t = tmpl_[static_cast<std::size_t>(i)];
    if (t < 1 || t > k + dim_) throw InvalidArgument("subspace template value out of range");
    if (t <= k) {
      base_ += static_cast<Index>(t - 1) * shape_.weight(i);
    } else {
      used[static_cast<std::size_t>(t - k - 1)] = true;
      wildcard_weights_[static_cast<std::size_t>(t - k - 1)] += shape_.weight(i);
    }
  }
  for (int r = 0; r < dim_; ++r)
    if (!used[static_cast<std::size_t>(r)])
      throw InvalidArgument("wildcard set W_" + std::to_string(r + 1) + " is empty");
}

Subspace Subspace::from_parts(const CubeShape& shape, const std::vector<std::pair<int, int>>& fixed,
                              const std::vector<std::vector<int>>& wildcards) {
  std::vector<int> tmpl(static_cast<std::size_t>(shape.n()), 0);
  auto place = [&](int coord, int value) {
    if (coord < 0 || coord >= shape.n()) throw InvalidArgument("subspace coordinate out of range");
    if (tmpl[static_cast<std::size_t>(coord)] != 0) throw InvalidArgument("subspace parts overlap");
    tmpl[static_cast<std::size_t>(coord)] = value;
  };
  for (auto [coord, value] : fixed) {
    if (value < 1 || value > shape.k()) throw InvalidArgument("fixed value outside [k]");
    place(coord, value);
  }
  for (std::size_t r = 0; r < wildcards.size(); ++r)
    for (int coord : wildcards[r]) place(coord, shape.k() + static_cast<int>(r) + 1);
  if (std::find(tmpl.begin(), tmpl.end(), 0) != tmpl.end())
    throw InvalidArgument("subspace parts do not cover every coordinate");
  return Subspace(shape, static_cast<int>(wildcards.size()), std::move(tmpl));
}

Subspace Subspace::identity(const CubeShape& shape) {
  std::vector<int> tmpl(static_cast<std::size_t>(shape.n()));
  for (int i = 0; i < shape.n(); ++i) tmpl[static_cast<std::size_t>(i)] = shape.k() + i + 1;
  return Subspace(shape, shape.n(), std::move(tmpl));
}

Subspace Subspace::from_line(const LinePattern& line) {
  if (line.degenerate()) throw InvalidArgument("a degenerate line is not a subspace");
  std::vector<int> tmpl(line.symbols().begin(), line.symbols().end());
  for (int& t : tmpl)
    if (t == kWildcard) t = line.shape().k() + 1;
  return Subspace(line.shape(), 1, std::move(tmpl));
}

Subspace Subspace::parse(const CubeShape& shape, std::string_view text) {
  std::vector<int> tmpl;
  int dim = 0;
  for (char c : text) {
    if (c == '*') {
      tmpl.push_back(shape.k() + 1);
      dim = std::max(dim, 1);
    } else if (c >= 'a' && c <= 'z') {
      int r = c - 'a' + 1;
      tmpl.push_back(shape.k() + r);
      dim = std::max(dim, r);
    } else if (int d = digit_from_char(c); d > 0) {
      tmpl.push_back(d);
    } else {
      throw InvalidArgument("bad symbol '" + std::string(1, c) + "' in subspace template");
    }
  }
  return Subspace(shape, dim, std::move(tmpl));
}

std::vector<std::vector<int>> Subspace::wildcard_sets() const {
  std::vector<std::vector<int>> sets(static_cast<std::size_t>(dim_));
  for (int i = 0; i < shape_.n(); ++i) {
    int t = tmpl_[static_cast<std::size_t>(i)];
    if (t > shape_.k()) sets[static_cast<std::size_t>(t - shape_.k() - 1)].push_back(i);
  }
  return sets;
}

std::vector<std::pair<int, int>> Subspace::fixed() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < shape_.n(); ++i) {
    int t = tmpl_[static_cast<std::size_t>(i)];
    if (t <= shape_.k()) out.emplace_back(i, t);
  }
  return out;
}

Point Subspace::embed(const Point& z) const {
  if (z.n() != dim_ || z.shape().k() != shape_.k())
    throw InvalidArgument("subspace_embed: expected a point of " + param_shape().str() + ", got " + z.shape().str());
  std::vector<int> digits(tmpl_);
  for (int& d : digits)
    if (d > shape_.k()) d = z[d - shape_.k() - 1];
  return Point(shape_, std::move(digits));
}

Index Subspace::embed_index(Index z_index) const {
  const auto k = static_cast<Index>(shape_.k());
  Index out = base_;
  for (int r = dim_ - 1; r >= 0; --r) {
    out += (z_index % k) * wildcard_weights_[static_cast<std::size_t>(r)];
    z_index /= k;
  }
  return out;
}

std::vector<Index> Subspace::point_indices() const {
  Index count = param_shape().size();
  std::vector<Index> out(count);
  for (Index z = 0; z < count; ++z) out[z] = embed_index(z);
  return out;
}

Point Subspace::encoding() const { return Point(CubeShape(shape_.k() + dim_, shape_.n()), tmpl_); }

Subspace Subspace::compose(const Subspace& inner) const {
  if (inner.shape() != param_shape())
    throw InvalidArgument("compose: inner subspace lives in " + inner.shape().str() + ", expected " +
                          param_shape().str());
  const int k = shape_.k();
  std::vector<int> tmpl(tmpl_);
  for (int& t : tmpl)
    if (t > k) t = inner.tmpl()[static_cast<std::size_t>(t - k - 1)];
  // Inner wildcard r was encoded as k + r, which is what the outer template needs.
  return Subspace(shape_, inner.dim(), std::move(tmpl));
}

std::string Subspace::str() const {
  std::string out;
  for (int t : tmpl_) {
    if (t > shape_.k()) {
      int r = t - shape_.k();
      out.push_back(dim_ == 1 ? '*' : static_cast<char>('a' + r - 1));
    } else if (t <= 9) {
      out.push_back(char_from_digit(t));
    } else {
      out += "(" + std::to_string(t) + ")";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CubeSet

CubeSet::CubeSet(CubeShape shape) : shape_(std::move(shape)) {
  words_.assign(static_cast<std::size_t>((shape_.size() + 63) / 64), 0);
}

CubeSet CubeSet::full(const CubeShape& shape) {
  CubeSet s(shape);
  std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  s.clear_tail();
  return s;
}

CubeSet CubeSet::from_indices(const CubeShape& shape, std::span<const Index> indices) {
  CubeSet s(shape);
  for (Index i : indices) {
    if (i >= shape.size()) throw InvalidArgument("point index out of range");
    s.insert(i);
  }
  return s;
}

CubeSet CubeSet::from_points(const CubeShape& shape, std::span<const Point> points) {
  CubeSet s(shape);
  for (const Point& p : points) {
    if (p.shape() != shape) throw InvalidArgument("point shape does not match set shape");
    s.insert(p.index());
  }
  return s;
}

CubeSet CubeSet::from_predicate(const CubeShape& shape, const std::function<bool(const Point&)>& pred) {
  CubeSet s(shape);
  for (Index i = 0; i < shape.size(); ++i)
    if (pred(Point::from_index(shape, i))) s.insert(i);
  return s;
}

Index CubeSet::count() const {
  Index total = 0;
  for (auto w : words_) total += static_cast<Index>(std::popcount(w));
  return total;
}

bool CubeSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

Rational CubeSet::density() const {
  Rational r(Integer(std::to_string(count())), Integer(std::to_string(shape_.size())));
  r.canonicalize();
  return r;
}

std::vector<Index> CubeSet::indices() const {
  std::vector<Index> out;
  for_each([&](Index i) { out.push_back(i); });
  return out;
}

void CubeSet::check_same_shape(const CubeSet& other) const {
  if (!(shape_ == other.shape_)) throw InvalidArgument("set shapes differ: " + shape_.str() + " vs " + other.shape_.str());
}

void CubeSet::clear_tail() {
  Index rem = shape_.size() % 64;
  if (rem != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

CubeSet& CubeSet::operator&=(const CubeSet& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

CubeSet& CubeSet::operator|=(const CubeSet& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

CubeSet& CubeSet::operator-=(const CubeSet& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

CubeSet CubeSet::complement() const {
  CubeSet out(shape_);
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
  out.clear_tail();
  return out;
}

bool CubeSet::subset_of(const CubeSet& other) const {
  check_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~other.words_[i]) return false;
  return true;
}

bool CubeSet::disjoint_from(const CubeSet& other) const {
  check_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & other.words_[i]) return false;
  return true;
}

CubeSet operator&(CubeSet a, const CubeSet& b) { return a &= b; }
CubeSet operator|(CubeSet a, const CubeSet& b) { return a |= b; }
CubeSet operator-(CubeSet a, const CubeSet& b) { return a -= b; }

CubeSet subspace_points(const Subspace& v) {
  CubeSet s(v.shape());
  for (Index i : v.point_indices()) s.insert(i);
  return s;
}

CubeSet pull_back(const CubeSet& a, const Subspace& v) {
  if (!(a.shape() == v.shape())) throw InvalidArgument("pull_back: subspace and set live in different cubes");
  CubeSet out(v.param_shape());
  const Index count = v.param_shape().size();
  for (Index z = 0; z < count; ++z)
    if (a.contains(v.embed_index(z))) out.insert(z);
  return out;
}

namespace {

// Index map from [k_sub]^n into [k]^n, in increasing order.
template <typename Fn>
void for_each_sub_alphabet_point(const CubeShape& shape, int k_sub, Fn&& fn) {
  CubeShape sub(k_sub, shape.n());
  std::vector<int> digits(static_cast<std::size_t>(shape.n()), 1);
  Index big = 0;
  for (Index small = 0; small < sub.size(); ++small) {
    fn(small, big);
    for (int i = shape.n() - 1; i >= 0; --i) {
      auto& d = digits[static_cast<std::size_t>(i)];
      if (d < k_sub) {
        ++d;
        big += shape.weight(i);
        break;
      }
      big -= static_cast<Index>(d - 1) * shape.weight(i);
      d = 1;
    }
  }
}

}  // namespace

CubeSet sub_alphabet_cube(const CubeShape& shape, int k_sub) {
  if (k_sub < 1 || k_sub > shape.k()) throw InvalidArgument("sub-alphabet size out of range");
  CubeSet out(shape);
  for_each_sub_alphabet_point(shape, k_sub, [&](Index, Index big) { out.insert(big); });
  return out;
}

CubeSet restrict_alphabet(const CubeSet& a, int k_sub) {
  if (k_sub < 1 || k_sub > a.shape().k()) throw InvalidArgument("sub-alphabet size out of range");
  CubeSet out(a.shape().with_k(k_sub));
  for_each_sub_alphabet_point(a.shape(), k_sub, [&](Index small, Index big) {
    if (a.contains(big)) out.insert(small);
  });
  return out;
}

CubeSet extend_alphabet(const CubeSet& a, int k) {
  if (k < a.shape().k()) throw InvalidArgument("extend_alphabet: target alphabet is smaller");
  CubeShape big_shape = a.shape().with_k(k);
  CubeSet out(big_shape);
  for_each_sub_alphabet_point(big_shape, a.shape().k(), [&](Index small, Index big) {
    if (a.contains(small)) out.insert(big);
  });
  return out;
}

bool is_ij_insensitive(const CubeSet& a, int i, int j) {
  const CubeShape& shape = a.shape();
  const int k = shape.k();
  if (i < 1 || i > k || j < 1 || j > k) throw InvalidArgument("insensitivity values must lie in [k]");
  if (i == j) throw InvalidArgument("insensitivity needs two distinct values");
  // Membership must agree with the canonical representative x^{j->i}.
  const auto delta = static_cast<Index>(j - i);
  const bool up = j > i;
  std::vector<int> digits(static_cast<std::size_t>(shape.n()), 1);
  for (Index x = 0; x < shape.size(); ++x) {
    Index canon = x;
    for (int c = 0; c < shape.n(); ++c)
      if (digits[static_cast<std::size_t>(c)] == j)
        canon = up ? canon - delta * shape.weight(c) : canon + (static_cast<Index>(i - j)) * shape.weight(c);
    if (a.contains(x) != a.contains(canon)) return false;
    for (int c = shape.n() - 1; c >= 0; --c) {
      auto& d = digits[static_cast<std::size_t>(c)];
      if (d < k) {
        ++d;
        break;
      }
      d = 1;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive searches

namespace {

// Depth-first walk over templates in [k+d]^n in lexicographic order, tracking
// the base index and per-wildcard weights incrementally.
class TemplateWalker {
 public:
  TemplateWalker(const CubeSet& set, int d, bool allow_unused)
      : set_(set), shape_(set.shape()), k_(shape_.k()), d_(d), allow_unused_(allow_unused) {
    tmpl_.assign(static_cast<std::size_t>(shape_.n()), 0);
    weights_.assign(static_cast<std::size_t>(d), 0);
    used_.assign(static_cast<std::size_t>(d), 0);
    // Number of parameter points per template.
    params_ = *checked_pow(static_cast<Index>(k_), d);
  }

  std::optional<std::vector<int>> run() {
    if (walk(0, 0)) return tmpl_;
    return std::nullopt;
  }

 private:
  bool all_points_inside(Index base) const {
    // Enumerate z ∈ [k]^d with an odometer over wildcard offsets.
    std::vector<int> z(static_cast<std::size_t>(d_), 0);
    Index idx = base;
    for (Index count = 0; count < params_; ++count) {
      if (!set_.contains(idx)) return false;
      for (int r = d_ - 1; r >= 0; --r) {
        auto& zr = z[static_cast<std::size_t>(r)];
        if (zr + 1 < k_) {
          ++zr;
          idx += weights_[static_cast<std::size_t>(r)];
          break;
        }
        idx -= static_cast<Index>(zr) * weights_[static_cast<std::size_t>(r)];
        zr = 0;
      }
    }
    return true;
  }

  bool walk(int coord, Index base) {
    if (coord == shape_.n()) {
      if (!allow_unused_) {
        for (int u : used_)
          if (u == 0) return false;
      }
      return all_points_inside(base);
    }
    int unused = 0;
    for (int u : used_) unused += (u == 0);
    if (!allow_unused_ && unused > shape_.n() - coord) return false;

    const Index w = shape_.weight(coord);
    for (int v = 1; v <= k_ + d_; ++v) {
      tmpl_[static_cast<std::size_t>(coord)] = v;
      if (v <= k_) {
        if (walk(coord + 1, base + static_cast<Index>(v - 1) * w)) return true;
      } else {
        auto r = static_cast<std::size_t>(v - k_ - 1);
        weights_[r] += w;
        ++used_[r];
        bool found = walk(coord + 1, base);
        weights_[r] -= w;
        --used_[r];
        if (found) return true;
      }
    }
    return false;
  }

  const CubeSet& set_;
  const CubeShape& shape_;
  int k_;
  int d_;
  bool allow_unused_;
  Index params_;
  std::vector<int> tmpl_;
  std::vector<Index> weights_;
  std::vector<int> used_;
};

}  // namespace

std::optional<LinePattern> find_line_in_set(const CubeSet& a, const SearchOptions& options) {
  const CubeShape& shape = a.shape();
  auto patterns = checked_pow(static_cast<Index>(shape.k() + 1), shape.n());
  check_budget("find_line_in_set", patterns.value_or(~Index{0}), options.budget);
  if (a.empty()) return std::nullopt;
  TemplateWalker walker(a, 1, options.include_degenerate);
  auto tmpl = walker.run();
  if (!tmpl) return std::nullopt;
  for (int& t : *tmpl)
    if (t == shape.k() + 1) t = kWildcard;
  return LinePattern(shape, std::move(*tmpl));
}

std::optional<Subspace> find_subspace_in_set(const CubeSet& a, int d, const SearchOptions& options) {
  const CubeShape& shape = a.shape();
  if (d < 1) throw InvalidArgument("subspace dimension must be >= 1");
  if (d > shape.n()) throw InvalidArgument("subspace dimension exceeds n");
  auto patterns = checked_pow(static_cast<Index>(shape.k() + d), shape.n());
  check_budget("find_subspace_in_set", patterns.value_or(~Index{0}), options.budget);
  if (a.empty()) return std::nullopt;
  TemplateWalker walker(a, d, false);
  auto tmpl = walker.run();
  if (!tmpl) return std::nullopt;
  return Subspace(shape, d, std::move(*tmpl));
}

std::vector<std::vector<Index>> all_lines(const CubeShape& shape, std::uint64_t budget) {
  auto patterns = checked_pow(static_cast<Index>(shape.k() + 1), shape.n());
  check_budget("all_lines", patterns.value_or(~Index{0}), budget);
  CubeShape encoded(shape.k() + 1, shape.n());
  std::vector<std::vector<Index>> lines;
  for (Index y = 0; y < encoded.size(); ++y) {
    LinePattern line = LinePattern::from_point(Point::from_index(encoded, y));
    if (!line.degenerate()) lines.push_back(line.point_indices());
  }
  return lines;
}

}  // namespace dhj
