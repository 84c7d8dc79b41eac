#include "dhj/error.hpp"

#include <cstdlib>

namespace dhj {

std::uint64_t default_work_budget() {
  static const std::uint64_t budget = [] {
    if (const char* env = std::getenv("DHJ_WORK_BUDGET")) {
      char* end = nullptr;
      unsigned long long value = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && value > 0) return static_cast<std::uint64_t>(value);
    }
    return std::uint64_t{100'000'000};
  }();
  return budget;
}

void check_budget(const std::string& what, std::uint64_t required, std::uint64_t budget) {
  if (required > budget) throw BudgetExceeded(what, required, budget);
}

}  // namespace dhj
