#pragma once

// A registry of executable checks, one per lemma in scope. Each check
// computes both sides of its statement by exact enumeration or seeded
// sampling and returns a uniform report.

#include <cstdint>
#include <string>
#include <vector>

#include "dhj/io.hpp"
#include "dhj/measures.hpp"

namespace dhj {

enum class Verdict { pass, report_only, fail };
std::string to_string(Verdict v);

struct VerificationReport {
  std::string lemma_id;
  /// The parameters actually used, defaults filled in.
  Json params;
  /// Named exact values ("p/q" strings) and counts.
  Json computed;
  /// The claimed side of the comparison, "p/q" or a short description.
  std::string paper_bound;
  bool precondition_met = false;
  Verdict verdict = Verdict::report_only;
  std::string detail;
};

Json report_to_json(const VerificationReport& r);

/// Replaceable pieces used to mutation-test the registry.
struct HarnessHooks {
  /// Per-point non-degenerate equal-slices probability; empty means the library's.
  PointProbFn point_prob;
};

/// Registered ids in registry order.
std::vector<std::string> registered_lemmas();

/// Runs one check. Unknown ids throw InvalidArgument; oversize parameters
/// throw BudgetExceeded. Missing parameters take per-lemma defaults.
VerificationReport verify(const std::string& lemma_id, const Json& params = Json::object(), std::uint64_t seed = 1,
                          const HarnessHooks& hooks = {});

enum class Suite { fast, full };

/// Runs the registered battery; each entry draws its own stream from
/// (seed, lemma id, parameters).
std::vector<VerificationReport> verify_all(Suite suite, std::uint64_t seed = 1, const HarnessHooks& hooks = {});

/// True iff no report has verdict fail.
bool all_passed(const std::vector<VerificationReport>& reports);

}  // namespace dhj
