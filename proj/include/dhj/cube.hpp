#pragma once

// Points, combinatorial lines and combinatorial subspaces of [k]^n.
//
// Digits are 1-based values in [k]. Points are indexed big-endian in base k,
// digit value v contributing (v-1), so index order is lexicographic order.
// Coordinates are 0-based in the C++ API and 1-based in text/JSON formats.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dhj/error.hpp"
#include "dhj/rational.hpp"

namespace dhj {

using Index = std::uint64_t;

/// k^e, or nullopt when it does not fit in 63 bits.
std::optional<Index> checked_pow(Index base, int exponent);

/// The ambient parameters (k, n) of [k]^n.
class CubeShape {
 public:
  CubeShape(int k, int n);

  int k() const { return k_; }
  int n() const { return n_; }
  /// k^n.
  Index size() const { return size_; }
  /// k^(n-1-coord): the index weight of a coordinate.
  Index weight(int coord) const { return weights_[static_cast<std::size_t>(coord)]; }

  /// Same n, different alphabet size.
  CubeShape with_k(int k) const { return CubeShape(k, n_); }

  bool operator==(const CubeShape& other) const { return k_ == other.k_ && n_ == other.n_; }

  std::string str() const;

 private:
  int k_;
  int n_;
  Index size_;
  std::vector<Index> weights_;
};

class Point {
 public:
  Point(CubeShape shape, std::vector<int> digits);

  static Point from_index(const CubeShape& shape, Index index);
  /// Parses a digit string such as "1231" (characters '1'..'9').
  static Point parse(const CubeShape& shape, std::string_view text);

  const CubeShape& shape() const { return shape_; }
  int n() const { return shape_.n(); }
  int operator[](int coord) const { return digits_[static_cast<std::size_t>(coord)]; }
  std::span<const int> digits() const { return digits_; }

  Index index() const;
  /// a_1..a_k: how many coordinates take each value.
  std::vector<int> value_counts() const;
  /// True iff every value 1..k occurs.
  bool has_all_values() const;

  std::string str() const;

  bool operator==(const Point& other) const {
    return shape_ == other.shape_ && digits_ == other.digits_;
  }

 private:
  CubeShape shape_;
  std::vector<int> digits_;
};

/// x^{from->to}: every digit equal to `from` becomes `to`.
Point value_substitute(const Point& x, int from, int to);

inline constexpr int kWildcard = 0;

/// An element of ([k] ∪ {*})^n; degenerate when there is no wildcard.
class LinePattern {
 public:
  /// Symbols are values in [k] or kWildcard.
  LinePattern(CubeShape shape, std::vector<int> symbols);

  /// Parses e.g. "*3*2" ('*' is the wildcard).
  static LinePattern parse(const CubeShape& shape, std::string_view text);

  /// The pattern encoded by y ∈ [k+1]^n: coordinates equal to k+1 are wildcards.
  static LinePattern from_point(const Point& y);

  const CubeShape& shape() const { return shape_; }
  int operator[](int coord) const { return symbols_[static_cast<std::size_t>(coord)]; }
  std::span<const int> symbols() const { return symbols_; }

  bool degenerate() const;
  std::vector<int> wildcards() const;

  /// The k points obtained by setting all wildcards to 1, ..., k.
  std::vector<Point> points() const;
  std::vector<Index> point_indices() const;

  /// Inverse of from_point: a point of [k+1]^n.
  Point to_point() const;

  std::string str() const;

  bool operator==(const LinePattern& other) const {
    return shape_ == other.shape_ && symbols_ == other.symbols_;
  }

 private:
  CubeShape shape_;
  std::vector<int> symbols_;
};

/// A d-dimensional combinatorial subspace with ordered wildcard sets.
///
/// Stored as its template: coordinate i holds a fixed value in [k], or k+r
/// when it belongs to wildcard set W_r (r = 1..d). The template is exactly
/// the subspace's point of [k+d]^n.
class Subspace {
 public:
  Subspace(CubeShape shape, int dim, std::vector<int> tmpl);

  /// fixed: (coordinate, value) pairs; wildcards: W_1..W_d as coordinate lists.
  static Subspace from_parts(const CubeShape& shape, const std::vector<std::pair<int, int>>& fixed,
                             const std::vector<std::vector<int>>& wildcards);
  /// No fixed coordinates, W_r = {r-1}: the whole cube.
  static Subspace identity(const CubeShape& shape);
  static Subspace from_line(const LinePattern& line);
  /// Parses a template string: digits '1'..'9' are fixed values, letters
  /// 'a', 'b', ... mark W_1, W_2, ... ("*" is accepted for W_1).
  static Subspace parse(const CubeShape& shape, std::string_view text);

  const CubeShape& shape() const { return shape_; }
  int dim() const { return dim_; }
  std::span<const int> tmpl() const { return tmpl_; }
  /// Shape of the parameter cube [k]^d.
  CubeShape param_shape() const { return CubeShape(shape_.k(), dim_); }

  std::vector<std::vector<int>> wildcard_sets() const;
  std::vector<std::pair<int, int>> fixed() const;

  /// The point with V.fixed on fixed coordinates and z_r on W_r.
  Point embed(const Point& z) const;
  Index embed_index(Index z_index) const;
  /// Indices of all k^d points, in order of z.
  std::vector<Index> point_indices() const;

  /// The template as a point of [k+d]^n (the lexicographic key).
  Point encoding() const;

  /// Pushes a subspace of the parameter cube [k]^d through this embedding.
  Subspace compose(const Subspace& inner) const;

  std::string str() const;

  bool operator==(const Subspace& other) const {
    return shape_ == other.shape_ && dim_ == other.dim_ && tmpl_ == other.tmpl_;
  }

 private:
  CubeShape shape_;
  int dim_;
  std::vector<int> tmpl_;
  Index base_ = 0;
  std::vector<Index> wildcard_weights_;
};

/// A subset of [k]^n as a dense bitset indexed by point index.
class CubeSet {
 public:
  explicit CubeSet(CubeShape shape);

  static CubeSet full(const CubeShape& shape);
  static CubeSet from_indices(const CubeShape& shape, std::span<const Index> indices);
  static CubeSet from_points(const CubeShape& shape, std::span<const Point> points);
  static CubeSet from_predicate(const CubeShape& shape, const std::function<bool(const Point&)>& pred);

  const CubeShape& shape() const { return shape_; }

  bool contains(Index i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  bool contains(const Point& p) const { return contains(p.index()); }
  void insert(Index i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void erase(Index i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void set(Index i, bool value) { value ? insert(i) : erase(i); }

  Index count() const;
  bool empty() const;
  /// Uniform density |A| / k^n.
  Rational density() const;

  std::vector<Index> indices() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        int b = __builtin_ctzll(bits);
        fn(static_cast<Index>(w * 64 + static_cast<std::size_t>(b)));
        bits &= bits - 1;
      }
    }
  }

  CubeSet& operator&=(const CubeSet& other);
  CubeSet& operator|=(const CubeSet& other);
  CubeSet& operator-=(const CubeSet& other);
  CubeSet complement() const;
  bool subset_of(const CubeSet& other) const;
  bool disjoint_from(const CubeSet& other) const;

  bool operator==(const CubeSet& other) const {
    return shape_ == other.shape_ && words_ == other.words_;
  }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

 private:
  void check_same_shape(const CubeSet& other) const;
  void clear_tail();

  CubeShape shape_;
  std::vector<std::uint64_t> words_;
};

CubeSet operator&(CubeSet a, const CubeSet& b);
CubeSet operator|(CubeSet a, const CubeSet& b);
CubeSet operator-(CubeSet a, const CubeSet& b);

/// The points of a subspace as a set.
CubeSet subspace_points(const Subspace& v);
/// {z ∈ [k]^d : embed(z) ∈ A}: A seen from inside the subspace.
CubeSet pull_back(const CubeSet& a, const Subspace& v);
/// [k']^n ⊂ [k]^n for k' ≤ k: points whose digits are all ≤ k'.
CubeSet sub_alphabet_cube(const CubeShape& shape, int k_sub);
/// A ∩ [k']^n re-indexed as a subset of [k']^n.
CubeSet restrict_alphabet(const CubeSet& a, int k_sub);
/// A ⊂ [k']^n re-indexed as a subset of [k]^n.
CubeSet extend_alphabet(const CubeSet& a, int k);

/// True iff membership is invariant under rewriting digits i and j among
/// themselves, i.e. depends only on the value classes X_h for h ∉ {i, j}.
bool is_ij_insensitive(const CubeSet& a, int i, int j);

struct SearchOptions {
  bool include_degenerate = false;
  std::uint64_t budget = default_work_budget();
};

/// Lexicographically least line (over the [k+1]^n encoding) with all k
/// points in A, or nullopt when A is line-free.
std::optional<LinePattern> find_line_in_set(const CubeSet& a, const SearchOptions& options = {});

/// Lexicographically least d-dimensional subspace (over the [k+d]^n
/// encoding) with all k^d points in A. Throws InvalidArgument when d > n.
std::optional<Subspace> find_subspace_in_set(const CubeSet& a, int d, const SearchOptions& options = {});

/// Every non-degenerate line of [k]^n as k point indices, in encoding order.
std::vector<std::vector<Index>> all_lines(const CubeShape& shape, std::uint64_t budget = default_work_budget());

}  // namespace dhj
