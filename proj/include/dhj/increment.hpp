#pragma once

// The density-increment machinery for DHJ_k: dense diagonals, the
// insensitive sets C_j and D_j, restriction to uniform measure, partitions
// of insensitive sets into subspaces, the driver loop and the explicit
// constants for k = 3.
//
// Every lemma hypothesis is evaluated exactly and reported as a flag; the
// corresponding inequality is only asserted when the flag is true.

#include <optional>
#include <string>
#include <vector>

#include "dhj/cube.hpp"
#include "dhj/io.hpp"
#include "dhj/rational.hpp"
#include "dhj/rng.hpp"

namespace dhj {

/// A coordinate set J of size m and a point y on the complement of J.
struct EmbeddingSpec {
  std::vector<int> J;
  /// Digits of y on the coordinates outside J, in increasing coordinate order.
  std::vector<int> y;

  /// S_{J,y}: y off J, free on J (wildcard W_r = {J[r-1]}).
  Subspace subspace(const CubeShape& shape) const;
};

/// Constants of the first main step. For the full chain they follow one
/// assignment: theta = PDHJ(k-1, delta/4), eta = delta^2 theta / 96k,
/// gamma = 4 eta / delta, beta = delta theta / 12k.
struct IncrementParams {
  Rational delta;
  Rational eta;
  Rational gamma;
  Rational theta;
  Rational beta;
  int m = 0;
  int r = 0;
  int d = 0;
  /// m^4 <= n.
  bool m_within_bound = false;

  /// m = floor(n^(1/4)), r = floor(beta m / 8k^2), d = 1. Needs k in {2, 3}
  /// and delta in (0, 1].
  static IncrementParams for_chain(int k, const Rational& delta, int n);
};

/// The explicit probabilistic DHJ constant for alphabet size k_sub: 1/2 for
/// k_sub = 1 and delta^2/2 for k_sub = 2. Throws InvalidArgument otherwise.
Rational pdhj_constant(int k_sub, const Rational& delta);

/// MDHJ_{k_sub}(d, eta) where an explicit value is known: d for k_sub = 1,
/// 25 eta^(-2^d) for k_sub = 2.
std::optional<Integer> mdhj_bound(int k_sub, int d, const Rational& eta);

// ---------------------------------------------------------------------------
// Dense diagonal

enum class DiagonalCase { increment, diagonal, exhausted };
std::string to_string(DiagonalCase c);

struct DiagonalOptions {
  /// Must satisfy 0 < eta <= delta/4 for the lemma; zero means delta/4.
  Rational eta = 0;
  std::uint64_t budget = default_work_budget();
  /// Used when the exhaustive scan would exceed the budget.
  Rng* rng = nullptr;
  int samples = 4096;
};

struct DiagonalResult {
  DiagonalCase outcome = DiagonalCase::exhausted;
  /// The chosen (J, y), or the best candidate seen when exhausted.
  std::optional<EmbeddingSpec> embedding;
  Rational delta;
  Rational eta;
  /// Equal-slices density of A in S_{J,y}.
  Rational density;
  /// Equal-slices density of A in S'_{J,y} (J-coordinates in [k-1]).
  Rational density_prime;
  Rational increment_threshold;  // delta + eta
  Rational density_threshold;    // delta - 4 eta / delta
  Rational prime_threshold;      // delta / 4
  bool exhaustive = false;
  std::uint64_t candidates = 0;
  /// 0 < eta <= delta/4, m^4 <= n and n >= (16k/eta)^12.
  bool precondition_met = false;
};

DiagonalResult dense_diagonal(const CubeSet& a, int m, const DiagonalOptions& options = {});

// ---------------------------------------------------------------------------
// The sets C_j and D_j

struct ForbiddenSets {
  explicit ForbiddenSets(const CubeShape& shape) : b(shape), c_all(shape) {}

  /// A ∩ [k-1]^m as a subset of [k]^m.
  CubeSet b;
  /// C_1..C_{k-1}: C_j = {x : x^{k->j} ∈ B}.
  std::vector<CubeSet> c;
  /// C_1 ∩ ... ∩ C_{k-1}.
  CubeSet c_all;
  Rational nu_c;
  /// nu(C \ [k-1]^m): the equal-slices density of non-degenerate lines in B.
  Rational nu_c_outside;
  Rational nu_a_c;
  /// A ∩ C ⊂ [k-1]^m.
  bool disjoint_outside = false;
};

/// Requires k >= 2 and A line-free; throws InvalidArgument otherwise.
ForbiddenSets forbidden_sets(const CubeSet& a);

struct CorrelationResult {
  explicit CorrelationResult(const CubeShape& shape) : d(shape) {}

  /// D^(1)..D^(k): D^(i) = C_1 ∩ .. ∩ C_{i-1} ∩ C_i^c, D^(k) = C. These
  /// partition [k]^m.
  std::vector<CubeSet> cells;
  /// 1-based index of the chosen cell among 1..k-1.
  int chosen = 0;
  /// 1-based index of the cell with the largest relative density of A.
  int best_ratio = 0;
  /// D_1..D_{k-1} with D_j = C_j (j < chosen), C_j^c (j = chosen), else [k]^m.
  std::vector<CubeSet> factors;
  CubeSet d;
  Rational nu_a;
  Rational nu_c;
  Rational nu_a_c;
  Rational nu_d;
  Rational nu_a_d;
  /// (delta - gamma) nu(D) + delta theta / 4k.
  Rational bound;
  /// nu(A) >= delta - gamma, nu(A ∩ C) <= (delta/2) nu(C), 0 < gamma <= delta/4.
  bool precondition_met = false;
  bool holds() const { return nu_a_d >= bound; }
};

/// Chooses the cell D^(i), i < k, with the largest excess
/// nu(A ∩ D^(i)) - (delta - gamma) nu(D^(i)); ties go to the smaller i.
/// Throws InvalidArgument when every such cell is empty.
CorrelationResult correlating_d(const CubeSet& a, const ForbiddenSets& forbidden, const IncrementParams& params);

struct RestrictOptions {
  bool exhaustive = false;
  /// Sampling draws J uniformly and y from equal-slices; required unless exhaustive.
  Rng* rng = nullptr;
  int samples = 256;
  std::uint64_t budget = default_work_budget();
};

struct RestrictResult {
  std::optional<EmbeddingSpec> embedding;
  std::optional<Subspace> subspace;
  Rational mu_d;
  Rational mu_a_d;
  /// mu_V(A ∩ D) - (delta - gamma) mu_V(D).
  Rational excess;
  bool meets_gamma = false;      // mu_V(D) >= gamma
  bool meets_eta = false;        // mu_V(D) >= eta
  bool meets_increment = false;  // excess >= beta
  bool found() const { return meets_gamma && meets_increment; }
  std::uint64_t candidates = 0;
  Rational nu_d;
  Rational nu_a_d;
  /// nu(A ∩ D) >= (delta - gamma) nu(D) + 3 beta and r <= min(beta m / 8k, beta m / 2k^2).
  bool precondition_met = false;
};

/// Looks for an r-dimensional S_{J,y} on which A ∩ D is dense relative to D
/// in uniform measure. Exhaustive mode returns the best candidate (largest
/// excess, lexicographic ties); sampling returns the first candidate meeting
/// both thresholds, else the best one seen.
RestrictResult restrict_to_uniform(const CubeSet& a, const CubeSet& d, int r, const IncrementParams& params,
                                   const RestrictOptions& options);

// ---------------------------------------------------------------------------
// Partitions into subspaces

struct PartitionOptions {
  int d = 1;
  /// Block length of each round.
  int m = 1;
  /// Dimension and block length for the outer factors of an intersection;
  /// zero picks outer_d = m and outer_m = outer_d.
  int outer_d = 0;
  int outer_m = 0;
  Rational eta{1, 10};
  std::uint64_t budget = default_work_budget();
};

struct PartitionResult {
  explicit PartitionResult(const CubeShape& shape) : residual(shape) {}

  std::vector<Subspace> subspaces;
  CubeSet residual;
  /// Uniform density of the union of the subspaces.
  Rational covered_density;
  Rational input_density;
  /// mu(D) - 3 eta per factor.
  Rational bound;
  bool precondition_met = false;
  /// False when the budget ran out; the result is then partial.
  bool complete = true;
  int rounds = 0;
  bool bound_holds() const { return covered_density >= bound; }
};

/// Partitions most of a jk-insensitive D ⊂ [k]^n (1 <= j < k) into
/// disjoint d-dimensional subspaces inside D. Throws InvalidArgument when
/// D is not jk-insensitive or 1 <= d <= m <= n fails.
PartitionResult partition_insensitive(const CubeSet& d, int j, const PartitionOptions& options = {});

/// factors[j-1] must be jk-insensitive. Partitions D_{k-1} first, then the
/// remaining intersection inside every subspace produced.
PartitionResult partition_intersection(const std::vector<CubeSet>& factors, const PartitionOptions& options = {});

// ---------------------------------------------------------------------------
// Driver

enum class Mechanism { diagonal_increment, correlation_increment, line_found, exhausted };
std::string to_string(Mechanism m);

struct IterationRecord {
  int iter = 0;
  Mechanism mechanism = Mechanism::exhausted;
  /// The current subspace of the original cube after this iteration.
  Subspace subspace;
  Rational density_before;
  Rational density_after;
};

struct IncrementTrace {
  std::vector<IterationRecord> iterations;
};

struct DriverConfig {
  std::uint64_t seed = 1;
  /// Zero picks the desk-scale defaults m = n'-1, r = m-1 in dimension n'.
  int m = 0;
  int r = 0;
  int d = 1;
  int partition_m = 0;
  int max_iterations = 100;
  std::uint64_t budget = default_work_budget();
};

struct DriverResult {
  IncrementTrace trace;
  /// A line of A in the original cube when one was found.
  std::optional<LinePattern> line;
};

/// Alternates line search with the increment chain while the uniform
/// density strictly increases. Requires k in {2, 3}.
DriverResult dhj_driver(const CubeSet& a, const DriverConfig& config = {});

Json record_to_json(const IterationRecord& r);

// ---------------------------------------------------------------------------
// Constants for k = 3

struct BoundsReport {
  int k = 3;
  Rational delta;
  Rational theta;          // delta^2 / 32
  Rational gamma;          // delta^3 / 2304
  Rational beta;           // delta^3 / 1152
  Rational eta_diagonal;   // delta^2 theta / 96k
  Rational eta_partition;  // gamma^2 / 6(k-1)
  Rational pdhj2;          // delta^2 / 2
  Rational iteration_bound;       // 3072 delta^-2
  Rational iteration_bound_gamma; // 2 / gamma
  Integer tower_height;           // ceil(20000 delta^-2)
  Integer r_divisor = 41472;
  /// Divisor obtained from r = floor(beta m / 8k^2) directly.
  Integer r_divisor_from_chain = 82944;
  std::string r_formula;
  std::string d_formula;
  std::string mdhj2_formula;

  /// floor(delta^3 floor(n^(1/4)) / 41472).
  Integer r_of_n(const Integer& n) const;
};

/// Throws InvalidArgument unless k = 3 and 0 < delta <= 1.
BoundsReport bounds_calculator(int k, const Rational& delta);

Json bounds_to_json(const BoundsReport& b);

}  // namespace dhj
