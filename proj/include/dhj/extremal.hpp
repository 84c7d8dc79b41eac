#pragma once

// Largest line-free subsets of [k]^n: maximum independent sets in the
// k-uniform hypergraph of combinatorial lines.

#include <cstdint>
#include <vector>

#include "dhj/cube.hpp"

namespace dhj {

struct LineHypergraph {
  CubeShape shape;
  /// Point indices of every non-degenerate line, in encoding order.
  std::vector<std::vector<Index>> edges;
};

LineHypergraph build_line_hypergraph(const CubeShape& shape, std::uint64_t budget = default_work_budget());

struct ExtremalOptions {
  /// Wall-clock limit in seconds; 0 means none.
  double time_limit = 0;
  /// Node limit; 0 means none.
  std::uint64_t node_limit = 0;
  /// Orbit pruning under coordinate and alphabet permutations.
  bool symmetry = true;
  /// Symmetry is used only this many levels deep.
  int symmetry_depth = 48;
  /// Only sets of at least this size are searched for.
  int initial_lower_bound = 0;
  /// Seed the incumbent with the best union of whole slices.
  bool warm_start = true;
  /// Parallel subtree workers; 1 runs the deterministic sequential search.
  int workers = 1;
  std::uint64_t budget = default_work_budget();
};

struct BoundEvent {
  std::uint64_t nodes = 0;
  double seconds = 0;
  int lower = 0;
  int upper = 0;
};

struct SearchResult {
  int best_size = 0;
  CubeSet witness;
  bool optimal = false;
  /// Proven upper bound on the maximum (equals best_size when optimal).
  int upper_bound = 0;
  std::uint64_t nodes_explored = 0;
  double seconds = 0;
  std::vector<BoundEvent> bound_trace;
};

SearchResult max_linefree(const CubeShape& shape, const ExtremalOptions& options = {});

/// Re-checks line-freeness by exhaustive search and the cardinality.
bool verify_witness(const CubeSet& a, Index claimed_size);

/// The heaviest union of whole slices that contains no line. Slices
/// a + w e_1, ..., a + w e_k (w > 0) may not all be chosen.
CubeSet slice_union_construction(const CubeShape& shape, std::uint64_t node_limit = 10'000'000);

}  // namespace dhj
