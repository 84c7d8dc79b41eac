// dhj: command-line front end. Every subcommand prints one JSON document.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dhj/cube.hpp"
#include "dhj/error.hpp"
#include "dhj/extremal.hpp"
#include "dhj/harness.hpp"
#include "dhj/increment.hpp"
#include "dhj/io.hpp"
#include "dhj/measures.hpp"
#include "dhj/rng.hpp"
#include "dhj/sperner.hpp"

namespace {

using dhj::Json;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitError = 4;

struct Globals {
  bool human = false;
  int workers = 1;
  std::uint64_t budget = 0;
  std::uint64_t work_budget() const { return budget != 0 ? budget : dhj::default_work_budget(); }
};

void print_human(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      print_human(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) print_human(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_string()) {
    out << prefix << ": " << j.get<std::string>() << '\n';
  } else {
    out << prefix << ": " << j.dump() << '\n';
  }
}

void emit(const Globals& g, const Json& j) {
  if (g.human)
    print_human(j, "", std::cout);
  else
    std::cout << j.dump() << '\n';
}

dhj::CubeSet load_set(const std::string& path) { return dhj::set_from_json(dhj::read_json_file(path)); }

std::vector<std::string> point_strings(const dhj::CubeSet& a) {
  std::vector<std::string> out;
  a.for_each([&](dhj::Index i) { out.push_back(dhj::Point::from_index(a.shape(), i).str()); });
  return out;
}

// --- subcommands ---------------------------------------------------------------

int run_lines(const Globals& g, const std::string& file, int k, int n, bool enumerate, bool degenerate) {
  std::optional<dhj::CubeSet> a;
  if (!file.empty()) a = load_set(file);
  if (!a && (k < 1 || n < 1)) throw dhj::InvalidArgument("lines needs --file or both --k and --n");
  const dhj::CubeShape shape = a ? a->shape() : dhj::CubeShape(k, n);
  if (!enumerate) {
    if (!a) throw dhj::InvalidArgument("finding a line needs --file");
    auto line = dhj::find_line_in_set(*a, {.include_degenerate = degenerate, .budget = g.work_budget()});
    emit(g, Json{{"found", line.has_value()}, {"line", line ? Json(line->str()) : Json(nullptr)}});
    return 0;
  }
  const dhj::CubeShape patterns(shape.k() + 1, shape.n());
  dhj::check_budget("line enumeration", patterns.size(), g.work_budget());
  Json lines = Json::array();
  for (dhj::Index y = 0; y < patterns.size(); ++y) {
    auto line = dhj::LinePattern::from_point(dhj::Point::from_index(patterns, y));
    if (line.degenerate() && !degenerate) continue;
    if (a) {
      bool inside = true;
      for (dhj::Index i : line.point_indices()) inside = inside && a->contains(i);
      if (!inside) continue;
    }
    lines.push_back(line.str());
  }
  const std::size_t count = lines.size();
  emit(g, Json{{"k", shape.k()}, {"n", shape.n()}, {"count", count}, {"lines", std::move(lines)}});
  return 0;
}

int run_subspace(const Globals& g, const std::string& file, int d) {
  auto a = load_set(file);
  auto v = dhj::find_subspace_in_set(a, d, {.include_degenerate = false, .budget = g.work_budget()});
  emit(g, Json{{"found", v.has_value()}, {"subspace", v ? dhj::subspace_to_json(*v) : Json(nullptr)}});
  return 0;
}

int run_measure(const Globals& g, const std::string& file, const std::vector<std::string>& which) {
  auto a = load_set(file);
  Json out = Json::object();
  for (const auto& m : which) {
    if (m == "equal_slices")
      out[m] = dhj::to_string(dhj::equal_slices_measure(a));
    else if (m == "uniform")
      out[m] = dhj::to_string(dhj::uniform_measure(a));
    else if (m == "nondegenerate")
      out[m] = dhj::to_string(dhj::nondegenerate_equal_slices_measure(a));
    else
      throw dhj::InvalidArgument("unknown measure " + m);
  }
  emit(g, out);
  return 0;
}

int run_sample(const Globals& g, int k, int n, const std::string& law, int count, std::uint64_t seed) {
  const dhj::CubeShape shape(k, n);
  if (count < 0) throw dhj::InvalidArgument("--count must be non-negative");
  dhj::Rng rng(seed);
  Json pts = Json::array();
  for (int i = 0; i < count; ++i) {
    if (law == "equal_slices")
      pts.push_back(dhj::sample_equal_slices(shape, rng).str());
    else if (law == "nondegenerate")
      pts.push_back(dhj::sample_nondegenerate(shape, rng).str());
    else
      throw dhj::InvalidArgument("unknown law " + law);
  }
  emit(g, Json{{"k", k}, {"n", n}, {"law", law}, {"seed", seed}, {"points", std::move(pts)}});
  return 0;
}

int run_tv(const Globals& g, const std::string& p, const std::string& q) {
  auto a = dhj::distribution_from_json(dhj::read_json_file(p));
  auto b = dhj::distribution_from_json(dhj::read_json_file(q));
  emit(g, Json{{"tv", dhj::to_string(dhj::tv_distance(a, b))}});
  return 0;
}

int run_extremal(const Globals& g, int k, int n, std::uint64_t nodes, double seconds, bool symmetry, bool timing) {
  dhj::ExtremalOptions opts;
  opts.node_limit = nodes;
  opts.time_limit = seconds;
  opts.symmetry = symmetry;
  opts.workers = g.workers;
  opts.budget = g.work_budget();
  auto r = dhj::max_linefree(dhj::CubeShape(k, n), opts);
  Json out{{"n", n},
           {"k", k},
           {"best_size", r.best_size},
           {"optimal", r.optimal},
           {"upper_bound", r.upper_bound},
           {"witness", point_strings(r.witness)},
           {"nodes", r.nodes_explored}};
  if (timing) out["seconds"] = r.seconds;
  emit(g, out);
  return 0;
}

int run_sperner(const Globals& g, const std::string& mode, int n, const std::string& file) {
  if (mode == "bound") {
    if (n < 1) throw dhj::InvalidArgument("sperner bound needs --n");
    emit(g, Json{{"n", n}, {"bound", dhj::sperner_bound(n).get_str()}});
    return 0;
  }
  if (file.empty()) throw dhj::InvalidArgument("sperner " + mode + " needs --file");
  auto a = load_set(file);
  if (mode == "antichain") {
    emit(g, Json{{"antichain", dhj::is_antichain(a)}, {"size", a.count()}});
  } else if (mode == "density") {
    auto s = dhj::probabilistic_sperner_density(a);
    emit(g, Json{{"delta", dhj::to_string(s.delta)},
                 {"line_density", dhj::to_string(s.line_density)},
                 {"nondegenerate_line_density", dhj::to_string(s.nondegenerate_line_density)},
                 {"bound", dhj::to_string(s.bound)},
                 {"holds", s.holds()}});
  } else {
    throw dhj::InvalidArgument("unknown sperner mode " + mode);
  }
  return 0;
}

int run_partition(const Globals& g, const std::string& file, int d, int m, int j, const std::string& eta) {
  auto a = load_set(file);
  const int k = a.shape().k();
  if (j == 0) {
    for (int c = 1; c < k && j == 0; ++c)
      if (dhj::is_ij_insensitive(a, c, k)) j = c;
    if (j == 0) throw dhj::InvalidArgument("the set is not jk-insensitive for any j < k");
  }
  dhj::PartitionOptions opts;
  opts.d = d;
  opts.m = m;
  opts.eta = dhj::parse_rational(eta);
  opts.budget = g.work_budget();
  auto r = dhj::partition_insensitive(a, j, opts);
  Json subs = Json::array();
  for (const auto& v : r.subspaces) subs.push_back(v.str());
  emit(g, Json{{"j", j},
               {"subspaces", std::move(subs)},
               {"residual", r.residual.count()},
               {"covered_density", dhj::to_string(r.covered_density)},
               {"input_density", dhj::to_string(r.input_density)},
               {"bound", dhj::to_string(r.bound)},
               {"bound_holds", r.bound_holds()},
               {"precondition_met", r.precondition_met},
               {"complete", r.complete},
               {"rounds", r.rounds}});
  return 0;
}

int run_driver(const Globals& g, const std::string& file, std::uint64_t seed, int max_iterations, bool jsonl) {
  auto a = load_set(file);
  dhj::DriverConfig cfg;
  cfg.seed = seed;
  cfg.max_iterations = max_iterations;
  cfg.budget = g.work_budget();
  auto r = dhj::dhj_driver(a, cfg);
  if (jsonl) {
    // One record per line, then the outcome.
    for (const auto& rec : r.trace.iterations) std::cout << dhj::record_to_json(rec).dump() << '\n';
    std::cout << Json{{"line", r.line ? Json(r.line->str()) : Json(nullptr)}}.dump() << '\n';
    return 0;
  }
  Json trace = Json::array();
  for (const auto& rec : r.trace.iterations) trace.push_back(dhj::record_to_json(rec));
  emit(g, Json{{"trace", std::move(trace)}, {"line", r.line ? Json(r.line->str()) : Json(nullptr)}});
  return 0;
}

int run_bounds(const Globals& g, int k, const std::string& delta) {
  emit(g, dhj::bounds_to_json(dhj::bounds_calculator(k, dhj::parse_rational(delta))));
  return 0;
}

int run_verify(const Globals& g, const std::string& lemma, const std::string& params, bool all,
               const std::string& suite, std::uint64_t seed) {
  if (all) {
    if (suite != "fast" && suite != "full") throw dhj::InvalidArgument("--suite must be fast or full");
    auto reports = dhj::verify_all(suite == "fast" ? dhj::Suite::fast : dhj::Suite::full, seed);
    Json out = Json::array();
    for (const auto& r : reports) out.push_back(dhj::report_to_json(r));
    emit(g, out);
    return dhj::all_passed(reports) ? 0 : kExitFail;
  }
  if (lemma.empty()) throw dhj::InvalidArgument("verify needs --lemma or --all");
  Json p = params.empty() ? Json::object() : Json::parse(params);
  auto r = dhj::verify(lemma, p, seed);
  emit(g, dhj::report_to_json(r));
  return r.verdict == dhj::Verdict::fail ? kExitFail : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combinatorial lines, equal-slices measures and density increments over [k]^n"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--human", g.human, "Readable key: value output instead of JSON");
  app.add_option("--workers", g.workers, "Parallel workers for the extremal search")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "Work budget in elementary steps (default: DHJ_WORK_BUDGET or 10^8)");

  std::string file;
  int k = 0;
  int n = 0;
  int d = 1;
  std::uint64_t seed = 1;

  auto* lines = app.add_subcommand("lines", "Enumerate or find combinatorial lines");
  bool enumerate = false;
  bool degenerate = false;
  lines->add_option("--file", file, "Set file");
  lines->add_option("--k", k);
  lines->add_option("--n", n);
  lines->add_flag("--enumerate", enumerate, "List every line (inside the set when --file is given)");
  lines->add_flag("--degenerate", degenerate, "Include degenerate patterns");

  auto* subspace = app.add_subcommand("subspace", "Find a d-dimensional subspace inside a set");
  subspace->add_option("--file", file)->required();
  subspace->add_option("--d", d)->check(CLI::PositiveNumber);

  auto* measure = app.add_subcommand("measure", "Measures of a set");
  std::vector<std::string> which{"equal_slices", "uniform"};
  measure->add_option("--file", file)->required();
  measure->add_option("--measures", which, "Any of equal_slices, uniform, nondegenerate")->delimiter(',');

  auto* sample = app.add_subcommand("sample", "Draw points from a measure");
  std::string law = "equal_slices";
  int count = 1;
  sample->add_option("--k", k)->required();
  sample->add_option("--n", n)->required();
  sample->add_option("--law", law)->check(CLI::IsMember({"equal_slices", "nondegenerate"}));
  sample->add_option("--count", count);
  sample->add_option("--seed", seed);

  auto* tv = app.add_subcommand("tv", "Total variation distance of two distribution files");
  std::string p_file;
  std::string q_file;
  tv->add_option("p", p_file)->required();
  tv->add_option("q", q_file)->required();

  auto* extremal = app.add_subcommand("extremal", "Largest line-free subset of [k]^n");
  std::uint64_t nodes = 0;
  double seconds = 0;
  bool symmetry = true;
  bool no_timing = false;
  extremal->add_option("--k", k)->required();
  extremal->add_option("--n", n)->required();
  extremal->add_option("--nodes", nodes, "Node limit, 0 for none");
  extremal->add_option("--time-limit", seconds, "Seconds, 0 for none");
  extremal->add_option("--symmetry", symmetry, "Orbit pruning (true/false)");
  extremal->add_flag("--no-timing", no_timing, "Omit the wall-clock field");

  auto* sperner = app.add_subcommand("sperner", "Sperner bound, antichain check, line density");
  std::string mode = "bound";
  sperner->add_option("mode", mode)->check(CLI::IsMember({"bound", "antichain", "density"}));
  sperner->add_option("--n", n);
  sperner->add_option("--file", file);

  auto* partition = app.add_subcommand("partition", "Partition an insensitive set into subspaces");
  int m = 1;
  int j = 0;
  std::string eta = "1/10";
  partition->add_option("--file,--set-file", file)->required();
  partition->add_option("--d", d)->check(CLI::PositiveNumber);
  partition->add_option("--m", m)->check(CLI::PositiveNumber);
  partition->add_option("--j", j, "Insensitive pair (j, k); 0 detects it");
  partition->add_option("--eta", eta);

  auto* driver = app.add_subcommand("driver", "Run the density-increment driver on a set");
  int max_iterations = 100;
  driver->add_option("--file,--set-file", file)->required();
  driver->add_option("--seed", seed);
  driver->add_option("--max-iterations", max_iterations);
  bool jsonl = false;
  driver->add_flag("--jsonl", jsonl, "One trace record per line");

  auto* bounds = app.add_subcommand("bounds", "Explicit constants for k = 3");
  std::string delta;
  bounds->add_option("--k", k)->required();
  bounds->add_option("--delta", delta)->required();

  auto* verify = app.add_subcommand("verify", "Run lemma checks");
  std::string lemma;
  std::string params;
  bool all = false;
  std::string suite = "fast";
  verify->add_option("--lemma", lemma);
  verify->add_option("--params", params, "JSON object of parameters");
  verify->add_flag("--all", all);
  verify->add_option("--suite", suite);
  verify->add_option("--seed", seed);
  verify->add_flag("--list", [](std::int64_t) {
    for (const auto& id : dhj::registered_lemmas()) std::cout << id << '\n';
    std::exit(0);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*lines) return run_lines(g, file, k, n, enumerate, degenerate);
    if (*subspace) return run_subspace(g, file, d);
    if (*measure) return run_measure(g, file, which);
    if (*sample) return run_sample(g, k, n, law, count, seed);
    if (*tv) return run_tv(g, p_file, q_file);
    if (*extremal) return run_extremal(g, k, n, nodes, seconds, symmetry, !no_timing);
    if (*sperner) return run_sperner(g, mode, n, file);
    if (*partition) return run_partition(g, file, d, m, j, eta);
    if (*driver) return run_driver(g, file, seed, max_iterations, jsonl);
    if (*bounds) return run_bounds(g, k, delta);
    if (*verify) return run_verify(g, lemma, params, all, suite, seed);
  } catch (const dhj::BudgetExceeded& e) {
    std::cerr << "dhj: " << e.what() << '\n';
    return kExitBudget;
  } catch (const dhj::InvalidArgument& e) {
    std::cerr << "dhj: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "dhj: bad JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dhj: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
