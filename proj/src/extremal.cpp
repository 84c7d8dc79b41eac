#include "dhj/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "dhj/rational.hpp"

namespace dhj {

LineHypergraph build_line_hypergraph(const CubeShape& shape, std::uint64_t budget) {
  return LineHypergraph{shape, all_lines(shape, budget)};
}

bool verify_witness(const CubeSet& a, Index claimed_size) {
  if (a.count() != claimed_size) return false;
  SearchOptions options;
  options.budget = ~std::uint64_t{0};
  return !find_line_in_set(a, options).has_value();
}

// ---------------------------------------------------------------------------
// Slice-union warm start

CubeSet slice_union_construction(const CubeShape& shape, std::uint64_t node_limit) {
  const int k = shape.k();
  const int n = shape.n();
  std::vector<std::vector<int>> slices;
  std::map<std::vector<int>, int> slice_id;
  std::function<void(std::vector<int>&, int, int)> gen = [&](std::vector<int>& c, int j, int left) {
    if (j == k - 1) {
      c[static_cast<std::size_t>(j)] = left;
      slice_id[c] = static_cast<int>(slices.size());
      slices.push_back(c);
      return;
    }
    for (int a = left; a >= 0; --a) {
      c[static_cast<std::size_t>(j)] = a;
      gen(c, j + 1, left - a);
    }
  };
  std::vector<int> scratch(static_cast<std::size_t>(k));
  gen(scratch, 0, n);
  const int s = static_cast<int>(slices.size());

  std::vector<std::uint64_t> weight(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) weight[static_cast<std::size_t>(i)] = multinomial(static_cast<unsigned long>(n), slices[static_cast<std::size_t>(i)]).get_ui();

  // Hyperedges {b + w e_j : j in [k]} over slices.
  std::vector<std::vector<int>> edges;
  for (int w = 1; w <= n; ++w) {
    std::vector<int> b(static_cast<std::size_t>(k));
    std::function<void(int, int)> rec = [&](int j, int left) {
      if (j == k - 1) {
        b[static_cast<std::size_t>(j)] = left;
        std::vector<int> edge;
        for (int t = 0; t < k; ++t) {
          auto c = b;
          c[static_cast<std::size_t>(t)] += w;
          edge.push_back(slice_id.at(c));
        }
        edges.push_back(std::move(edge));
        return;
      }
      for (int a = left; a >= 0; --a) {
        b[static_cast<std::size_t>(j)] = a;
        rec(j + 1, left - a);
      }
    };
    rec(0, n - w);
  }

  // Heaviest independent set of slices; heavier slices are decided first.
  std::vector<int> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weight[static_cast<std::size_t>(a)] > weight[static_cast<std::size_t>(b)]; });
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(s));
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    for (int v : edges[static_cast<std::size_t>(e)]) incident[static_cast<std::size_t>(v)].push_back(e);

  std::vector<int> state(static_cast<std::size_t>(s), 0);  // 0 open, 1 in, 2 out
  std::vector<std::uint64_t> suffix(static_cast<std::size_t>(s) + 1, 0);
  for (int i = s - 1; i >= 0; --i) suffix[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(i) + 1] + weight[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  std::uint64_t best = 0;
  std::vector<int> best_state = state;
  std::uint64_t nodes = 0;
  std::function<void(int, std::uint64_t)> dfs = [&](int pos, std::uint64_t current) {
    if (++nodes > node_limit) return;
    if (current + suffix[static_cast<std::size_t>(pos)] <= best) return;
    if (pos == s) {
      best = current;
      best_state = state;
      return;
    }
    int v = order[static_cast<std::size_t>(pos)];
    bool ok = true;
    for (int e : incident[static_cast<std::size_t>(v)]) {
      int inside = 0;
      for (int u : edges[static_cast<std::size_t>(e)]) inside += state[static_cast<std::size_t>(u)] == 1;
      if (inside == k - 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      state[static_cast<std::size_t>(v)] = 1;
      dfs(pos + 1, current + weight[static_cast<std::size_t>(v)]);
    }
    state[static_cast<std::size_t>(v)] = 2;
    dfs(pos + 1, current);
    state[static_cast<std::size_t>(v)] = 0;
  };
  dfs(0, 0);

  CubeSet out(shape);
  for (Index i = 0; i < shape.size(); ++i) {
    auto counts = Point::from_index(shape, i).value_counts();
    if (best_state[static_cast<std::size_t>(slice_id.at(counts))] == 1) out.insert(i);
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Exact maximum extension inside a block of at most 64 vertices.

class BlockSolver {
 public:
  BlockSolver(int size, std::vector<std::uint64_t> edges) : size_(size), edges_(std::move(edges)) {}

  /// |inc| plus the largest S within und such that inc ∪ S contains no edge.
  int value(std::uint64_t inc, std::uint64_t und) { return std::popcount(inc) + extend(inc, und); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& key) const {
      std::uint64_t h = key.first * 0x9e3779b97f4a7c15ULL ^ (key.second + 0x632be59bd9b4e019ULL + (key.first << 6));
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  int extend(std::uint64_t inc, std::uint64_t und) {
    // Vertices that would complete an edge are out.
    for (auto e : edges_) {
      if (e & ~(inc | und)) continue;
      std::uint64_t rest = e & ~inc;
      if (std::popcount(rest) == 1) und &= ~rest;
    }
    std::uint64_t live = 0;
    std::uint64_t relevant_inc = 0;
    for (auto e : edges_) {
      if (e & ~(inc | und)) continue;
      live |= e & und;
      relevant_inc |= e & inc;
    }
    int free = std::popcount(und & ~live);
    und &= live;
    if (und == 0) return free;
    auto key = std::make_pair(relevant_inc, und);
    if (auto it = memo_.find(key); it != memo_.end()) return free + it->second;

    // Branch on the live vertex with the most live edges.
    int best_v = -1;
    int best_deg = -1;
    for (std::uint64_t bits = und; bits; bits &= bits - 1) {
      int v = std::countr_zero(bits);
      int deg = 0;
      for (auto e : edges_)
        if (((e >> v) & 1) && !(e & ~(inc | und))) ++deg;
      if (deg > best_deg) {
        best_deg = deg;
        best_v = v;
      }
    }
    const std::uint64_t bit = std::uint64_t{1} << best_v;
    int result = 1 + extend(inc | bit, und & ~bit);
    if (result < std::popcount(und)) result = std::max(result, extend(inc, und & ~bit));
    if (memo_.size() > 4'000'000) memo_.clear();
    memo_.emplace(key, static_cast<std::uint8_t>(result));
    return free + result;
  }

  int size_;
  std::vector<std::uint64_t> edges_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint8_t, KeyHash> memo_;
};

// ---------------------------------------------------------------------------
// Problem description shared by all workers.

struct BlockSpec {
  int partition;
  int solver;  // index into Problem::solver_edges, or -1 for a clique
  std::vector<Index> vertices;
};

struct Problem {
  explicit Problem(CubeShape s) : shape(std::move(s)) {}

  CubeShape shape;
  int k = 0;
  int num_vertices = 0;
  int num_edges = 0;
  std::vector<int> edge_vertices;  // num_edges * k
  std::vector<int> vertex_edge_start;
  std::vector<int> vertex_edges;

  int num_partitions = 0;
  std::vector<BlockSpec> blocks;
  std::vector<std::vector<std::uint64_t>> solver_edges;
  std::vector<int> solver_sizes;
  // For each vertex, (block, local bit) memberships.
  std::vector<std::vector<std::pair<int, int>>> vertex_blocks;

  int group_size = 1;
  std::vector<std::uint32_t> group;  // group_size * num_vertices
};

std::vector<std::vector<int>> permutations_of(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Blocks that are subcubes: fix every coordinate outside `free`.
void add_subcube_partition(Problem& prob, const std::vector<int>& free, int solver) {
  const CubeShape& shape = prob.shape;
  const int n = shape.n();
  const int t = static_cast<int>(free.size());
  const auto local_size = *checked_pow(static_cast<Index>(shape.k()), t);
  std::vector<int> fixed_coords;
  for (int c = 0; c < n; ++c)
    if (std::find(free.begin(), free.end(), c) == free.end()) fixed_coords.push_back(c);
  const auto block_count = *checked_pow(static_cast<Index>(shape.k()), n - t);
  const int partition = prob.num_partitions++;
  for (Index b = 0; b < block_count; ++b) {
    Index base = 0;
    Index rest = b;
    for (int j = static_cast<int>(fixed_coords.size()) - 1; j >= 0; --j) {
      base += (rest % static_cast<Index>(shape.k())) * shape.weight(fixed_coords[static_cast<std::size_t>(j)]);
      rest /= static_cast<Index>(shape.k());
    }
    BlockSpec spec{partition, solver, {}};
    for (Index l = 0; l < local_size; ++l) {
      Index idx = base;
      Index r = l;
      for (int j = t - 1; j >= 0; --j) {
        idx += (r % static_cast<Index>(shape.k())) * shape.weight(free[static_cast<std::size_t>(j)]);
        r /= static_cast<Index>(shape.k());
      }
      spec.vertices.push_back(idx);
    }
    prob.blocks.push_back(std::move(spec));
  }
}

// Symmetric chain decomposition of [2]^n read in a rotated coordinate order.
void add_chain_partition(Problem& prob, int rotation) {
  const int n = prob.shape.n();
  const int partition = prob.num_partitions++;
  std::map<Index, std::vector<Index>> chains;
  for (Index x = 0; x < prob.shape.size(); ++x) {
    // Reading order: coordinates rotation, rotation+1, ...; bit set means digit 2.
    std::vector<int> coords(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = (i + rotation) % n;
    std::vector<int> open;
    Index paired = 0;
    for (int c : coords) {
      Index bit = prob.shape.weight(c);
      if (x & bit) {
        if (!open.empty()) {
          paired |= bit | prob.shape.weight(open.back());
          open.pop_back();
        }
      } else {
        open.push_back(c);
      }
    }
    Index start = x & paired;
    chains[start | (paired << 32)].push_back(x);
  }
  for (auto& [key, members] : chains) {
    std::sort(members.begin(), members.end(), [](Index a, Index b) { return std::popcount(a) < std::popcount(b); });
    prob.blocks.push_back(BlockSpec{partition, -1, members});
  }
}

std::vector<std::uint64_t> local_cube_edges(int k, int t) {
  CubeShape local(k, t);
  std::vector<std::uint64_t> out;
  for (const auto& line : all_lines(local)) {
    std::uint64_t mask = 0;
    for (Index i : line) mask |= std::uint64_t{1} << i;
    out.push_back(mask);
  }
  return out;
}

Problem build_problem(const CubeShape& shape, const ExtremalOptions& options) {
  Problem prob(shape);
  prob.k = shape.k();
  check_budget("max_linefree", *checked_pow(static_cast<Index>(shape.k() + 1), shape.n()), options.budget);
  auto lines = all_lines(shape, options.budget);
  prob.num_vertices = static_cast<int>(shape.size());
  prob.num_edges = static_cast<int>(lines.size());
  std::vector<int> degree(static_cast<std::size_t>(prob.num_vertices), 0);
  for (const auto& line : lines)
    for (Index v : line) {
      prob.edge_vertices.push_back(static_cast<int>(v));
      ++degree[v];
    }
  prob.vertex_edge_start.assign(static_cast<std::size_t>(prob.num_vertices) + 1, 0);
  for (int v = 0; v < prob.num_vertices; ++v)
    prob.vertex_edge_start[static_cast<std::size_t>(v) + 1] = prob.vertex_edge_start[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
  prob.vertex_edges.resize(static_cast<std::size_t>(prob.vertex_edge_start.back()));
  std::vector<int> fill(prob.vertex_edge_start.begin(), prob.vertex_edge_start.end() - 1);
  for (int e = 0; e < prob.num_edges; ++e)
    for (int j = 0; j < prob.k; ++j) {
      int v = prob.edge_vertices[static_cast<std::size_t>(e * prob.k + j)];
      prob.vertex_edges[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = e;
    }

  // Bounding blocks.
  const int n = shape.n();
  const int k = shape.k();
  if (k == 2) {
    for (int r = 0; r < std::min(n, 4); ++r) add_chain_partition(prob, r);
  } else if (k >= 3 && k <= 64) {
    int t = 1;
    while (t < n && *checked_pow(static_cast<Index>(k), t + 1) <= 32) ++t;
    prob.solver_edges.push_back(local_cube_edges(k, t));
    prob.solver_sizes.push_back(static_cast<int>(*checked_pow(static_cast<Index>(k), t)));
    // Every choice of free coordinates, capped.
    std::vector<int> free(static_cast<std::size_t>(t));
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + t, true);
    int made = 0;
    do {
      free.clear();
      for (int c = 0; c < n; ++c)
        if (pick[static_cast<std::size_t>(c)]) free.push_back(c);
      add_subcube_partition(prob, free, 0);
    } while (++made < 32 && std::prev_permutation(pick.begin(), pick.end()));
  }
  prob.vertex_blocks.resize(static_cast<std::size_t>(prob.num_vertices));
  for (int b = 0; b < static_cast<int>(prob.blocks.size()); ++b) {
    const auto& verts = prob.blocks[static_cast<std::size_t>(b)].vertices;
    for (int l = 0; l < static_cast<int>(verts.size()); ++l) prob.vertex_blocks[verts[static_cast<std::size_t>(l)]].emplace_back(b, l);
  }

  // Symmetry group: coordinate permutations times alphabet permutations.
  if (options.symmetry && n <= 8 && k <= 6) {
    Integer order = factorial(static_cast<unsigned long>(n)) * factorial(static_cast<unsigned long>(k));
    if (order * prob.num_vertices <= 20'000'000) {
      auto coord_perms = permutations_of(n);
      auto value_perms = permutations_of(k);
      prob.group_size = static_cast<int>(coord_perms.size() * value_perms.size());
      prob.group.reserve(static_cast<std::size_t>(prob.group_size) * static_cast<std::size_t>(prob.num_vertices));
      for (const auto& sigma : coord_perms)
        for (const auto& tau : value_perms)
          for (Index x = 0; x < shape.size(); ++x) {
            Point p = Point::from_index(shape, x);
            Index y = 0;
            for (int i = 0; i < n; ++i)
              y += static_cast<Index>(tau[static_cast<std::size_t>(p[i] - 1)]) * shape.weight(sigma[static_cast<std::size_t>(i)]);
            prob.group.push_back(static_cast<std::uint32_t>(y));
          }
    }
  }
  return prob;
}

// ---------------------------------------------------------------------------
// Shared incumbent and limits.

struct Shared {
  std::atomic<int> best{0};
  std::mutex mutex;
  std::vector<int> witness;  // vertex indices of the incumbent
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> aborted{false};
  std::chrono::steady_clock::time_point start;
  double time_limit = 0;
  std::uint64_t node_limit = 0;
  std::vector<BoundEvent> trace;

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

enum : std::uint8_t { kUndecided = 0, kIn = 1, kOut = 2 };

class Engine {
 public:
  Engine(const Problem& prob, Shared& shared) : prob_(prob), shared_(shared) {
    const auto nv = static_cast<std::size_t>(prob.num_vertices);
    const auto ne = static_cast<std::size_t>(prob.num_edges);
    state_.assign(nv, kUndecided);
    edge_in_.assign(ne, 0);
    edge_out_.assign(ne, 0);
    alive_deg_.resize(nv);
    for (std::size_t v = 0; v < nv; ++v)
      alive_deg_[v] = prob.vertex_edge_start[v + 1] - prob.vertex_edge_start[v];
    undecided_ = prob.num_vertices;
    for (const auto& edges : prob.solver_edges) solvers_.emplace_back(64, edges);
    const auto nb = prob.blocks.size();
    inc_.assign(nb, 0);
    und_.resize(nb);
    value_.resize(nb);
    psum_.assign(static_cast<std::size_t>(prob.num_partitions), 0);
    for (std::size_t b = 0; b < nb; ++b) {
      auto size = prob.blocks[b].vertices.size();
      und_[b] = size == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << size) - 1;
      value_[b] = block_value(static_cast<int>(b));
      psum_[static_cast<std::size_t>(prob.blocks[b].partition)] += value_[b];
    }
    mark_.assign(nv, 0);
  }

  /// Edges of size one (k = 1) exclude their vertex outright.
  void initial_propagation() {
    if (prob_.k == 1)
      for (int v = 0; v < prob_.num_vertices; ++v) queue_.push_back({v, kOut});
    for (int v = 0; v < prob_.num_vertices; ++v)
      if (alive_deg_[static_cast<std::size_t>(v)] == 0) queue_.push_back({v, kIn});
    propagate();
  }

  int upper_bound() const {
    int ub = n_in_ + undecided_;
    for (int s : psum_) ub = std::min(ub, s);
    return ub;
  }

  void search(int depth, std::vector<int> group, int split_depth, std::vector<std::vector<std::uint8_t>>* frontier) {
    if (shared_.aborted.load(std::memory_order_relaxed)) return;
    std::uint64_t nodes = shared_.nodes.fetch_add(1, std::memory_order_relaxed) + 1;
    if ((nodes & 255) == 0) check_limits(nodes);

    const int best = shared_.best.load(std::memory_order_relaxed);
    if (undecided_ == 0) {
      if (n_in_ > best) record();
      return;
    }
    if (upper_bound() <= best) return;
    if (matching_bound() <= best) return;
    if (frontier && depth >= split_depth) {
      frontier->push_back(state_);
      return;
    }

    int v = choose_vertex();
    // Include v first; then exclude v's whole orbit under the current stabilizer.
    std::vector<int> orbit{v};
    std::vector<int> stab;
    const bool use_group = group.size() > 1;
    if (use_group) {
      const auto nv = static_cast<std::size_t>(prob_.num_vertices);
      ++stamp_;
      mark_[static_cast<std::size_t>(v)] = stamp_;
      for (int g : group) {
        auto w = static_cast<int>(prob_.group[static_cast<std::size_t>(g) * nv + static_cast<std::size_t>(v)]);
        if (w == v)
          stab.push_back(g);
        else if (mark_[static_cast<std::size_t>(w)] != stamp_) {
          mark_[static_cast<std::size_t>(w)] = stamp_;
          orbit.push_back(w);
        }
      }
      if (depth + 1 >= symmetry_depth_) stab.assign(1, 0);
    } else {
      stab = group;
    }

    std::size_t mark = trail_.size();
    queue_.push_back({v, kIn});
    propagate();
    search(depth + 1, std::move(stab), split_depth, frontier);
    undo(mark);

    for (int w : orbit) queue_.push_back({w, kOut});
    propagate();
    search(depth + 1, std::move(group), split_depth, frontier);
    undo(mark);
  }

  /// Replays a propagated snapshot, searches below it without symmetry, and rewinds.
  void run_task(const std::vector<std::uint8_t>& snapshot) {
    std::size_t mark = trail_.size();
    for (int v = 0; v < prob_.num_vertices; ++v)
      if (snapshot[static_cast<std::size_t>(v)] != kUndecided) assign(v, snapshot[static_cast<std::size_t>(v)]);
    queue_.clear();
    search(0, std::vector<int>{0}, 0, nullptr);
    undo(mark);
  }

  void set_symmetry_depth(int d) { symmetry_depth_ = d; }

 private:
  struct Pending {
    int vertex;
    std::uint8_t value;
  };

  int block_value(int b) {
    const auto& spec = prob_.blocks[static_cast<std::size_t>(b)];
    auto inc = inc_[static_cast<std::size_t>(b)];
    auto und = und_[static_cast<std::size_t>(b)];
    if (spec.solver < 0) return inc ? std::popcount(inc) : (und ? 1 : 0);
    return solvers_[static_cast<std::size_t>(spec.solver)].value(inc, und);
  }

  void update_blocks(int v) {
    for (auto [b, l] : prob_.vertex_blocks[static_cast<std::size_t>(v)]) {
      auto bi = static_cast<std::size_t>(b);
      std::uint64_t bit = std::uint64_t{1} << l;
      auto s = state_[static_cast<std::size_t>(v)];
      und_[bi] = s == kUndecided ? (und_[bi] | bit) : (und_[bi] & ~bit);
      inc_[bi] = s == kIn ? (inc_[bi] | bit) : (inc_[bi] & ~bit);
      int nv = block_value(b);
      psum_[static_cast<std::size_t>(prob_.blocks[bi].partition)] += nv - value_[bi];
      value_[bi] = nv;
    }
  }

  void assign(int v, std::uint8_t s) {
    const auto vi = static_cast<std::size_t>(v);
    state_[vi] = s;
    trail_.push_back(v);
    --undecided_;
    const int k = prob_.k;
    const int* begin = prob_.vertex_edges.data() + prob_.vertex_edge_start[vi];
    const int* end = prob_.vertex_edges.data() + prob_.vertex_edge_start[vi + 1];
    if (s == kIn) {
      ++n_in_;
      for (const int* p = begin; p != end; ++p) {
        auto e = static_cast<std::size_t>(*p);
        ++edge_in_[e];
        if (edge_out_[e] == 0 && edge_in_[e] == k - 1) {
          for (int j = 0; j < k; ++j) {
            int u = prob_.edge_vertices[e * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
            if (state_[static_cast<std::size_t>(u)] == kUndecided) queue_.push_back({u, kOut});
          }
        }
      }
    } else {
      for (const int* p = begin; p != end; ++p) {
        auto e = static_cast<std::size_t>(*p);
        if (edge_out_[e]++ == 0) {
          for (int j = 0; j < k; ++j) {
            int u = prob_.edge_vertices[e * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
            if (--alive_deg_[static_cast<std::size_t>(u)] == 0 && state_[static_cast<std::size_t>(u)] == kUndecided)
              queue_.push_back({u, kIn});
          }
        }
      }
    }
    update_blocks(v);
  }

  void propagate() {
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      auto [v, s] = queue_[i];
      if (state_[static_cast<std::size_t>(v)] != kUndecided) continue;
      // A free vertex may have regained live edges only through undo, never here.
      assign(v, s);
    }
    queue_.clear();
  }

  void undo(std::size_t mark) {
    const int k = prob_.k;
    while (trail_.size() > mark) {
      int v = trail_.back();
      trail_.pop_back();
      const auto vi = static_cast<std::size_t>(v);
      auto s = state_[vi];
      const int* begin = prob_.vertex_edges.data() + prob_.vertex_edge_start[vi];
      const int* end = prob_.vertex_edges.data() + prob_.vertex_edge_start[vi + 1];
      if (s == kIn) {
        --n_in_;
        for (const int* p = begin; p != end; ++p) --edge_in_[static_cast<std::size_t>(*p)];
      } else {
        for (const int* p = begin; p != end; ++p) {
          auto e = static_cast<std::size_t>(*p);
          if (--edge_out_[e] == 0)
            for (int j = 0; j < k; ++j)
              ++alive_deg_[static_cast<std::size_t>(prob_.edge_vertices[e * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)])];
        }
      }
      state_[vi] = kUndecided;
      ++undecided_;
      update_blocks(v);
    }
  }

  int choose_vertex() const {
    int best_v = -1;
    int best_deg = -1;
    for (int v = 0; v < prob_.num_vertices; ++v) {
      if (state_[static_cast<std::size_t>(v)] != kUndecided) continue;
      int deg = alive_deg_[static_cast<std::size_t>(v)];
      if (deg > best_deg) {
        best_deg = deg;
        best_v = v;
      }
    }
    return best_v;
  }

  // |I| + |U| minus a greedy family of live edges disjoint on undecided vertices.
  int matching_bound() {
    ++stamp_;
    int matched = 0;
    const int k = prob_.k;
    for (int e = 0; e < prob_.num_edges; ++e) {
      if (edge_out_[static_cast<std::size_t>(e)] != 0) continue;
      bool clash = false;
      for (int j = 0; j < k && !clash; ++j) {
        int u = prob_.edge_vertices[static_cast<std::size_t>(e * k + j)];
        clash = state_[static_cast<std::size_t>(u)] == kUndecided && mark_[static_cast<std::size_t>(u)] == stamp_;
      }
      if (clash) continue;
      for (int j = 0; j < k; ++j) {
        int u = prob_.edge_vertices[static_cast<std::size_t>(e * k + j)];
        if (state_[static_cast<std::size_t>(u)] == kUndecided) mark_[static_cast<std::size_t>(u)] = stamp_;
      }
      ++matched;
    }
    return n_in_ + undecided_ - matched;
  }

  void record() {
    std::lock_guard<std::mutex> lock(shared_.mutex);
    if (n_in_ <= shared_.best.load()) return;
    shared_.best.store(n_in_);
    shared_.witness.clear();
    for (int v = 0; v < prob_.num_vertices; ++v)
      if (state_[static_cast<std::size_t>(v)] == kIn) shared_.witness.push_back(v);
    shared_.trace.push_back({shared_.nodes.load(), shared_.elapsed(), n_in_, -1});
  }

  void check_limits(std::uint64_t nodes) {
    if (shared_.node_limit && nodes >= shared_.node_limit) shared_.aborted.store(true);
    if (shared_.time_limit > 0 && shared_.elapsed() >= shared_.time_limit) shared_.aborted.store(true);
  }

  const Problem& prob_;
  Shared& shared_;
  std::vector<std::uint8_t> state_;
  std::vector<int> edge_in_;
  std::vector<int> edge_out_;
  std::vector<int> alive_deg_;
  int undecided_ = 0;
  int n_in_ = 0;
  std::vector<int> trail_;
  std::vector<Pending> queue_;
  std::vector<BlockSolver> solvers_;
  std::vector<std::uint64_t> inc_;
  std::vector<std::uint64_t> und_;
  std::vector<int> value_;
  std::vector<int> psum_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  int symmetry_depth_ = 48;
};

}  // namespace

SearchResult max_linefree(const CubeShape& shape, const ExtremalOptions& options) {
  Problem prob = build_problem(shape, options);
  Shared shared;
  shared.start = std::chrono::steady_clock::now();
  shared.time_limit = options.time_limit;
  shared.node_limit = options.node_limit;

  CubeSet witness(shape);
  if (options.warm_start && shape.k() >= 2) {
    witness = slice_union_construction(shape);
    shared.best = static_cast<int>(witness.count());
    for (Index i : witness.indices()) shared.witness.push_back(static_cast<int>(i));
  }
  int found = shared.best.load();
  // Searching for sets of at least L: anything of size L-1 or less is pruned.
  const int target_floor = std::max(found, options.initial_lower_bound - 1);
  shared.best = target_floor;

  std::vector<int> group(static_cast<std::size_t>(prob.group_size));
  std::iota(group.begin(), group.end(), 0);

  Engine root(prob, shared);
  root.set_symmetry_depth(options.symmetry_depth);
  root.initial_propagation();
  const int root_bound = root.upper_bound();
  shared.trace.push_back({0, shared.elapsed(), found, root_bound});

  if (options.workers <= 1) {
    root.search(0, group, 0, nullptr);
  } else {
    std::vector<std::vector<std::uint8_t>> frontier;
    root.search(0, group, 8, &frontier);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (int w = 0; w < options.workers; ++w)
      threads.emplace_back([&] {
        Engine engine(prob, shared);
        for (std::size_t i = next++; i < frontier.size(); i = next++) {
          if (shared.aborted) break;
          engine.run_task(frontier[i]);
        }
      });
    for (auto& t : threads) t.join();
  }

  SearchResult result{.best_size = 0, .witness = CubeSet(shape), .bound_trace = {}};
  const int best = shared.best.load();
  CubeSet best_set(shape);
  for (int v : shared.witness) best_set.insert(static_cast<Index>(v));
  result.best_size = static_cast<int>(best_set.count());
  result.witness = std::move(best_set);
  result.nodes_explored = shared.nodes.load();
  result.seconds = shared.elapsed();
  const bool exhausted = !shared.aborted.load();
  if (exhausted)
    result.upper_bound = best;  // nothing above `best` exists
  else
    result.upper_bound = root_bound;
  result.optimal = exhausted && result.best_size == result.upper_bound;
  result.bound_trace = std::move(shared.trace);
  result.bound_trace.push_back({result.nodes_explored, result.seconds, result.best_size, result.upper_bound});
  (void)found;
  return result;
}

}  // namespace dhj
