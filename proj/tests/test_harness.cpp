#include <gtest/gtest.h>

#include <algorithm>

#include "dhj/error.hpp"
#include "dhj/harness.hpp"

using namespace dhj;

TEST(Registry, Ids) {
  auto ids = registered_lemmas();
  for (const char* id : {"L1.6", "L2.2", "L3.1", "L3.2", "L3.3", "L3.4", "L3.5", "L3.6", "T3.7", "L3.8", "L6.2",
                         "L6.3", "L6.4", "L6.5", "L6.6", "L6.7", "L6.9"})
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
}

TEST(Registry, UnknownInputsThrow) {
  EXPECT_THROW(verify("L9.9"), InvalidArgument);
  EXPECT_THROW(verify("L3.2", {{"colour", 3}}), InvalidArgument);
  EXPECT_THROW(verify("L3.2", {{"n", "many"}}), InvalidArgument);
}

TEST(Registry, OversizeThrowsBudget) {
  EXPECT_THROW(verify("L3.1", {{"n", 5}, {"exhaustive", true}}), BudgetExceeded);
}

TEST(Checks, SliceFormulaPasses) {
  auto r = verify("L3.2", {{"n", 4}, {"k", 3}});
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_TRUE(r.precondition_met);
  EXPECT_EQ(r.params.at("n"), 4);
  EXPECT_FALSE(r.paper_bound.empty());
}

TEST(Checks, ComposedLawPasses) {
  auto r = verify("L3.6", {{"k", 2}, {"d", 2}, {"n", 5}});
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.computed.at("tv"), "0/1");
  EXPECT_EQ(r.computed.at("total"), "1/1");
}

TEST(Checks, ComposedLawBelowAlphabetIsReportOnly) {
  for (auto [k, d, n] : {std::tuple{2, 1, 4}, std::tuple{3, 1, 5}, std::tuple{3, 2, 6}}) {
    auto r = verify("L3.6", {{"k", k}, {"d", d}, {"n", n}});
    EXPECT_EQ(r.verdict, Verdict::report_only);
    EXPECT_FALSE(r.precondition_met);
    EXPECT_FALSE(r.detail.empty());
  }
}

TEST(Checks, TamperedProbabilityFails) {
  HarnessHooks hooks;
  hooks.point_prob = [](const CubeShape& s, std::span<const int> counts) -> Rational {
    Rational p = nondegenerate_prob(s, counts);
    return counts[0] == 1 ? p * 2 : p;
  };
  auto r = verify("L3.6", {{"k", 2}, {"d", 2}, {"n", 5}}, 1, hooks);
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_NE(r.computed.at("tv"), "0/1");
}

TEST(Checks, SpernerExhaustiveCount) {
  auto r = verify("L3.1", {{"n", 3}});
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.computed.at("sets_checked"), 256);
  EXPECT_EQ(r.computed.at("violations"), 0);
}

TEST(Checks, MonteCarloIsReportOnly) {
  auto r = verify("L6.3");
  EXPECT_EQ(r.verdict, Verdict::report_only);
}

TEST(Checks, ExtremalSpotCheck) {
  auto r = verify("T3.7", {{"k", 2}, {"n", 4}});
  EXPECT_EQ(r.verdict, Verdict::pass);
  auto three = verify("T3.7", {{"k", 3}, {"n", 3}});
  EXPECT_NE(three.verdict, Verdict::fail);
}

TEST(Suite, FastHasNoFailure) {
  auto reports = verify_all(Suite::fast, 1);
  EXPECT_TRUE(all_passed(reports));
  for (const auto& r : reports) EXPECT_NE(r.verdict, Verdict::fail) << report_to_json(r).dump();
  EXPECT_GE(reports.size(), registered_lemmas().size());
}

TEST(Suite, SameSeedSameReports) {
  auto a = verify_all(Suite::fast, 7);
  auto b = verify_all(Suite::fast, 7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(report_to_json(a[i]).dump(), report_to_json(b[i]).dump());
}

TEST(Suite, ReportJsonShape) {
  auto j = report_to_json(verify("L3.2"));
  for (const char* key : {"lemma_id", "params", "computed", "paper_bound", "precondition_met", "verdict"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("verdict"), "pass");
}
