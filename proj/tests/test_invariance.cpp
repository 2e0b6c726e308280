#include <gtest/gtest.h>

#include "fkrc/invariance.hpp"

using namespace fkrc;

TEST(BridgeTest, BrownianSelfCheck) {
  const auto profiles = simulate_brownian_bridges(4000, 20, 1.0, 17);
  const auto t = bridge_covariance_test(profiles);
  EXPECT_LT(std::abs(t.chi.value - 1.0), 3 * t.chi.se());
  EXPECT_GT(t.r2, 0.99);
  EXPECT_NEAR(t.kurtosis, 3.0, 0.3);
  EXPECT_LT(t.max_cov_deviation, 0.25);
  EXPECT_LT(t.endpoint_variance, 1e-20);
}

TEST(BridgeTest, ScaledBridge) {
  const auto profiles = simulate_brownian_bridges(3000, 16, 0.45, 3);
  const auto t = bridge_covariance_test(profiles, 0.5);
  EXPECT_LT(std::abs(t.chi.value - 0.45), 3 * t.chi.se());
  ASSERT_TRUE(t.relative_gap.has_value());
  EXPECT_NEAR(*t.relative_gap, 0.1, 0.05);
}

TEST(BridgeTest, GridMismatch) {
  auto profiles = simulate_brownian_bridges(1000, 10, 1.0, 1);
  profiles[5].r[3] += 0.01;
  try {
    bridge_covariance_test(profiles);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(BridgeTest, TooFewProfiles) {
  EXPECT_THROW(bridge_covariance_test(simulate_brownian_bridges(10, 10, 1.0, 1)), Error);
}

TEST(BridgeTest, Deterministic) {
  const auto a = simulate_brownian_bridges(5, 8, 1.0, 4), b = simulate_brownian_bridges(5, 8, 1.0, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].phi, b[i].phi);
}

TEST(InterfaceSampler, SplitsProfilesAcrossChainsDeterministically) {
  InterfaceSamplerConfig cfg;
  cfg.n = 4;
  cfg.beta = 2 * potts_self_dual_beta(2);
  cfg.profiles = 23;
  cfg.chains = 3;
  cfg.m = 8;
  cfg.tune_stages = 4;
  const auto a = sample_interface_profiles(cfg, 1);
  const auto b = sample_interface_profiles(cfg, 3);
  ASSERT_EQ(a.size(), 23u);
  ASSERT_EQ(b.size(), 23u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].phi, b[i].phi);
    EXPECT_EQ(a[i].r.size(), 9u);
  }
}
