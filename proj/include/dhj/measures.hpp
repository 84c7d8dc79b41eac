#pragma once

// Exact uniform, equal-slices and non-degenerate equal-slices measures on
// [k]^n, their samplers, and the restriction distributions used to move
// between them.

#include <functional>
#include <span>
#include <vector>

#include "dhj/cube.hpp"
#include "dhj/rational.hpp"
#include "dhj/rng.hpp"

namespace dhj {

/// A probability distribution on [k]^n, stored densely by point index.
class Distribution {
 public:
  explicit Distribution(CubeShape shape);
  Distribution(CubeShape shape, std::vector<Rational> probs);

  const CubeShape& shape() const { return shape_; }
  const Rational& operator[](Index i) const { return probs_[i]; }
  Rational& operator[](Index i) { return probs_[i]; }
  std::span<const Rational> probs() const { return probs_; }

  Rational total() const;
  /// Probability of a set.
  Rational measure(const CubeSet& a) const;

  bool operator==(const Distribution& other) const {
    return shape_ == other.shape_ && probs_ == other.probs_;
  }

 private:
  CubeShape shape_;
  std::vector<Rational> probs_;
};

/// C(n+k-1, k-1).
Integer slice_count(const CubeShape& shape);

/// Calls fn(counts) for every (a_1..a_k) with sum n, in lexicographic order.
void for_each_slice(const CubeShape& shape, const std::function<void(std::span<const int>)>& fn);

/// Equal-slices probability of any single point with the given value counts.
Rational equal_slices_prob(const CubeShape& shape, std::span<const int> counts);
Rational equal_slices_prob(const Point& x);

/// Non-degenerate equal-slices probability; zero when a value is missing.
/// Throws InvalidArgument when n < k.
Rational nondegenerate_prob(const CubeShape& shape, std::span<const int> counts);
Rational nondegenerate_prob(const Point& x);

Rational uniform_measure(const CubeSet& a);
Rational equal_slices_measure(const CubeSet& a);
Rational nondegenerate_equal_slices_measure(const CubeSet& a);

Distribution uniform_distribution(const CubeShape& shape);
Distribution equal_slices_distribution(const CubeShape& shape);
Distribution nondegenerate_distribution(const CubeShape& shape);
Distribution point_mass(const CubeShape& shape, Index i);

/// An exact probability next to the bound it is compared with.
struct BoundCheck {
  Rational exact;
  Rational bound;
  bool precondition_met = true;
  bool holds() const { return exact <= bound; }
};

/// Equal-slices probability that no coordinate equals k: (k-1)/(n+k-1).
Rational degenerate_prob(const CubeShape& shape);

/// Probability that some value is missing, against the union bound k(k-1)/(n+k-1).
BoundCheck missing_value_prob(const CubeShape& shape);

/// Probability that fewer than m coordinates equal k, against mk/n.
/// precondition_met is n >= mk.
BoundCheck few_k_prob_bound(const CubeShape& shape, int m);

/// Probability that some value occurs fewer than m times, against mk^2/n.
BoundCheck few_any_prob_bound(const CubeShape& shape, int m);

/// Equal-slices sample via a random (k-1)-subset of pegs in {1..n+k-1}.
Point sample_equal_slices(const CubeShape& shape, Rng& rng);

/// Non-degenerate equal-slices sample via the circle construction.
Point sample_nondegenerate(const CubeShape& shape, Rng& rng);

/// Non-degenerate equal-slices sample via positive compositions (pegs in the
/// n-1 interior gaps). Same law as sample_nondegenerate.
Point sample_nondegenerate_pegs(const CubeShape& shape, Rng& rng);

/// A special d-dimensional subspace (no fixed coordinates) whose wildcard
/// partition, read as a point of [d]^n, is non-degenerate equal-slices.
Subspace sample_special_subspace(const CubeShape& shape, int d, Rng& rng);

/// Half the L1 distance.
Rational tv_distance(const Distribution& p, const Distribution& q);

/// (n+k-1)...(n+k-m) / n(n-1)...(n-m+1); requires m < n.
Rational transfer_ratio(int n, int k, int m);

enum class YLaw { uniform, equal_slices };

/// Law of z = (x on J, y off J) where J = sigma([m]) for a uniformly random
/// injection sigma, x is drawn from `inner` (on [k]^m or [k-1]^m) and copied
/// through sigma, and y is drawn from `y_law` on the remaining n-m coordinates.
/// Computed by exact summation over all injections.
Distribution composed_restriction_distribution(const CubeShape& shape, int m, const Distribution& inner,
                                               YLaw y_law, std::uint64_t budget = default_work_budget());

/// Per-point probability hook, used to build the composed law of a random
/// special subspace and a random point in it. Defaults to nondegenerate_prob.
using PointProbFn = std::function<Rational(const CubeShape&, std::span<const int>)>;

/// Law of x = w∘s where s is a non-degenerate equal-slices point of [d]^n
/// (a special subspace) and w a non-degenerate equal-slices point of [k]^d.
/// Requires n >= d >= k, since the inner measure on [k]^d needs d >= k.
Distribution special_subspace_composed_law(const CubeShape& shape, int d, const PointProbFn& prob = {},
                                           std::uint64_t budget = default_work_budget());

}  // namespace dhj
