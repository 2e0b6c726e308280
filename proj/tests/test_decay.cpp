#include <gtest/gtest.h>

#include <cmath>

#include "fkrc/decay.hpp"

using namespace fkrc;

namespace {

double beta_for(double p) { return beta_from_probability(p); }

// on a tree the FK bonds are independent with this probability
double tree_bond(double p, double q) { return p / (p + q * (1 - p)); }

bool within(const EstimateWithCI& e, double exact, double sds = 4) {
  return std::abs(e.value - exact) <= sds * e.se() + 1e-12;
}

}  // namespace

TEST(ExitLaw, ClosedFormMatchesEnumeration) {
  for (double p : {0.0, 0.3, 0.5, 0.9})
    for (int n = 0; n <= 8; ++n)
      EXPECT_NEAR(exit_probability_1d(p, n), exit_probability_1d_enumerated({beta_for(p), 1.0}, n), 1e-12);
}

TEST(ExitLaw, ZeroProbability) {
  for (int n = 0; n < 5; ++n) EXPECT_EQ(exit_probability_1d(0.0, n), 0.0);
  EXPECT_THROW(exit_probability_1d(1.5, 2), Error);
}

TEST(ExitLaw, EnumerationForClusterWeightedLine) {
  const double p = 0.6, r = tree_bond(p, 3.0);
  for (int n = 0; n <= 6; ++n)
    EXPECT_NEAR(exit_probability_1d_enumerated({beta_for(p), 3.0}, n), exit_probability_1d(r, n), 1e-12);
}

TEST(BridgeChains, OneDimensionalRate) {
  const double p = 0.6, q = 2.0, r = tree_bond(p, q);
  BridgeConfig cfg;
  cfg.params = {beta_for(p), q};
  cfg.step = Site{1};
  cfg.k_max = 10;
  cfg.margin = 3;
  cfg.budget = {200, 20000, 50};
  cfg.seed = 7;
  const auto bc = run_bridge_chains(cfg);
  ASSERT_EQ(bc.chains.size(), 11u);
  for (std::size_t k = 1; k < bc.chains.size(); ++k) {
    EXPECT_DOUBLE_EQ(bc.chains[k].b, 1.0);
    EXPECT_NEAR(bc.chains[k].a, r, 5 * std::sqrt(bc.chains[k].var_a) + 1e-3);
  }
  const auto s = bridge_series(bc, 1, 10);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_TRUE(within(s.p[i], std::pow(r, s.scales[i])));
  const auto f = fit_inverse_correlation_length(s, 1);
  EXPECT_LT(std::abs(f.xi.value + std::log(r)), 4 * f.xi.se());
}

TEST(BridgeChains, MarginGrowsWithLength) {
  BridgeConfig cfg;
  cfg.step = Site{1, 1};
  cfg.margin = 8;
  cfg.spread = 3;
  EXPECT_EQ(bridge_margin(cfg, 0), 8);
  EXPECT_EQ(bridge_margin(cfg, 8), 8 + 11);  // 3 sqrt(8 sqrt 2) = 10.09
  cfg.spread = 0;
  EXPECT_EQ(bridge_margin(cfg, 40), 8);
}

TEST(BridgeChains, Deterministic) {
  BridgeConfig cfg;
  cfg.params = {0.5, 2.0};
  cfg.step = Site{1, 0};
  cfg.k_max = 2;
  cfg.margin = 2;
  cfg.budget = {10, 100, 10};
  const auto a = run_bridge_chains(cfg), b = run_bridge_chains(cfg);
  for (std::size_t k = 0; k < a.chains.size(); ++k) {
    EXPECT_EQ(a.chains[k].a, b.chains[k].a);
    EXPECT_EQ(a.chains[k].b, b.chains[k].b);
  }
  const auto s = bridge_series(a, 1, 2);
  EXPECT_EQ(s.log_cov.rows(), 2);
  EXPECT_THROW(bridge_series(a, 1, 3), Error);
}

TEST(ExitChains, OneDimensionalProduct) {
  const double p = 0.6, q = 2.0, r = tree_bond(p, q);
  const auto nc = run_exit_chains({beta_for(p), q}, 1, 8, 2, {200, 20000, 50}, 3);
  const auto s = exit_series(nc, 0, 8);
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_TRUE(within(s.p[i], exit_probability_1d(r, static_cast<int>(s.scales[i]))))
        << "N=" << s.scales[i] << " est " << s.p[i].value;
  const auto rates = exit_rates(nc, 4, 8);
  EXPECT_EQ(rates.size(), 5u);
  // the rate tends to -log r
  EXPECT_NEAR(rates.back().value, -std::log(r), 5 * rates.back().se() + 0.02);
}

TEST(WiredEscape, OneDimensionalBernoulli) {
  const double p = 0.7;
  for (int n : {1, 3, 6}) {
    const auto e = wired_escape({beta_for(p), 1.0}, 1, n, {200, 20000, 50}, 5);
    EXPECT_TRUE(within(e, 2 * std::pow(p, n) - std::pow(p, 2 * n))) << n << ' ' << e.value;
  }
}

TEST(WiredEscape, SmallSquareAgainstEnumeration) {
  const ModelParams params{0.9, 2.0};
  auto g = make_graph(Box::cube(2, 1), CouplingField::nearest_neighbor(2));
  const auto dist = exact_distribution(g, params, BoundaryCondition::wired);
  BondConfiguration omega(g, BoundaryCondition::wired);
  const auto o = static_cast<std::uint32_t>(g->box().index(Site{0, 0}));
  double exact = 0;
  for (std::uint64_t m = 0; m < dist.prob.size(); ++m) {
    omega.set_mask(m);
    if (connected(omega, o, static_cast<std::uint32_t>(g->exterior()))) exact += dist.prob[m];
  }
  const auto e = wired_escape(params, 2, 1, {200, 40000, 50}, 8);
  EXPECT_TRUE(within(e, exact)) << e.value << " vs " << exact;
}

TEST(BridgeChains, ThreadCountDoesNotChangeResults) {
  BridgeConfig cfg;
  cfg.params = {0.4, 2.0};
  cfg.step = Site{1, 0};
  cfg.k_max = 5;
  cfg.margin = 2;
  cfg.budget = {10, 200, 10};
  const auto a = run_bridge_chains(cfg);
  cfg.threads = 4;
  const auto b = run_bridge_chains(cfg);
  for (std::size_t k = 0; k < a.chains.size(); ++k) {
    EXPECT_EQ(a.chains[k].a, b.chains[k].a);
    EXPECT_EQ(a.chains[k].var_b, b.chains[k].var_b);
  }
  const auto w1 = wired_escape_series({0.4, 2.0}, 2, {2, 3}, {10, 100, 10}, 4, 1);
  const auto w4 = wired_escape_series({0.4, 2.0}, 2, {2, 3}, {10, 100, 10}, 4, 4);
  for (std::size_t i = 0; i < w1.size(); ++i) EXPECT_EQ(w1[i].value, w4[i].value);
}
