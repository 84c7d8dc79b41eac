#pragma once

// Antichains in [2]^n, read as set families: a point's 2-positions form the set.

#include <optional>
#include <vector>

#include "dhj/cube.hpp"
#include "dhj/rational.hpp"
#include "dhj/rng.hpp"

namespace dhj {

/// True iff no member's 2-set is a proper subset of another's. Requires k = 2.
bool is_antichain(const CubeSet& a);

/// C(n, floor(n/2)).
Integer sperner_bound(int n);

/// Probability that {pi(1..m)} lies in A for a random permutation pi and a
/// uniform m in {0..n}, computed layer by layer.
Rational chain_hit_probability(const CubeSet& a);

struct SpernerDensity {
  Rational delta;
  /// Equal-slices mass over [3]^n of patterns (degenerate included) whose points all lie in A.
  Rational line_density;
  /// The same with degenerate patterns left out.
  Rational nondegenerate_line_density;
  /// delta^2 (n+1)/(n+2).
  Rational bound;
  bool holds() const { return line_density >= bound; }
};

/// Precomputed line weights for [2]^n so many sets can be scored quickly.
class LineDensityTable {
 public:
  explicit LineDensityTable(int n);

  int n() const { return n_; }
  SpernerDensity evaluate(const CubeSet& a) const;

 private:
  struct Entry {
    Index low;
    Index high;
    std::uint64_t weight;  // numerator over denominator_
    bool degenerate;
  };
  int n_;
  std::vector<Entry> entries_;
  std::vector<std::uint64_t> point_weight_;  // numerator over point_denominator_
  Integer denominator_;
  Integer point_denominator_;
};

SpernerDensity probabilistic_sperner_density(const CubeSet& a);

struct RefineStage {
  int block_size = 0;
  int s = 0;
  int t = 0;
  /// Density of the surviving family after the stage.
  Rational density;
  /// delta^(2^r) - 2^(d-r) n^(-1/2), informational.
  double guaranteed = 0;
};

struct RefineResult {
  std::optional<Subspace> subspace;
  std::vector<RefineStage> stages;
  std::vector<int> block_sizes;
  Rational delta;
  /// (25/n)^(1/2^d).
  double density_bound = 0;
  /// n >= 25 / delta^(2^d).
  bool precondition_met = false;
};

struct RefineOptions {
  int d = 1;
  /// Randomized permutation and binomial s, t when set; otherwise each stage
  /// maximizes the surviving density over s < t with the identity permutation.
  Rng* rng = nullptr;
};

/// Iterated pair refinement towards a d-dimensional subspace inside A.
/// Throws InvalidArgument when n < 4^(d-1) (a refinement block would be empty).
RefineResult multidim_sperner_refine(const CubeSet& a, const RefineOptions& options);

}  // namespace dhj
