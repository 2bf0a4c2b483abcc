#include <gtest/gtest.h>

#include "normspace/campaign.hpp"

using namespace normspace;

TEST(Campaign, EveryKindPassesSmallBatch) {
  for (const auto& [kind, _] : campaign_kinds()) {
    const auto r = run_campaign(kind, 10, 123, 1);
    EXPECT_EQ(r.passed, 10u) << kind << (r.failures.empty() ? "" : ": " + r.failures.front().second);
  }
}

TEST(Campaign, ThreadCountDoesNotChangeResults) {
  const auto a = run_campaign("helly-na", 24, 9, 1);
  const auto b = run_campaign("helly-na", 24, 9, 4);
  EXPECT_EQ(a.passed, b.passed);
  EXPECT_EQ(a.failures, b.failures);
}

TEST(Campaign, InstanceSeedsAreIndependentOfBatchSize) {
  // instance i sees the same inputs whatever the batch size
  std::vector<std::uint64_t> small, large;
  for (std::size_t i = 0; i < 5; ++i) small.push_back(instance_seed(77, i));
  for (std::size_t i = 0; i < 50; ++i) large.push_back(instance_seed(77, i));
  EXPECT_TRUE(std::equal(small.begin(), small.end(), large.begin()));
}

TEST(Campaign, UnknownKind) { EXPECT_THROW(run_campaign("nope", 1, 0), UsageError); }

TEST(Campaign, EnvironmentCapsThreads) {
  setenv("NORMSPACE_THREADS", "2", 1);
  EXPECT_EQ(campaign_threads(), 2u);
  setenv("NORMSPACE_THREADS", "junk", 1);
  EXPECT_GE(campaign_threads(), 1u);
  unsetenv("NORMSPACE_THREADS");
}
