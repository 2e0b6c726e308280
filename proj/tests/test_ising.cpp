#include <gtest/gtest.h>

#include <cmath>

#include "fkrc/fk.hpp"
#include "fkrc/geometry.hpp"
#include "fkrc/ising.hpp"

using namespace fkrc;

namespace {

// Exact high-temperature rate: xi(u) = max p.u over cosh p1 + cosh p2 = c.
double exact_rate(double tanh_k, double angle) {
  const double k = std::atanh(tanh_k);
  const double c = std::pow(std::cosh(2 * k), 2) / std::sinh(2 * k);
  double best = 0;
  const int grid = 200000;
  const double pmax = std::acosh(c - 1);
  for (int i = 0; i <= grid; ++i) {
    const double p2 = -pmax + 2 * pmax * i / grid;
    const double ch = c - std::cosh(p2);
    if (ch < 1) continue;
    best = std::max(best, std::acosh(ch) * std::cos(angle) + p2 * std::sin(angle));
  }
  return best;
}

}  // namespace

TEST(Ising, DualParameters) {
  const double beta = 2 * std::log1p(std::sqrt(2.0));  // twice the self-dual Potts point
  const double p = 1 - std::exp(-beta);
  const double q = 2, pstar = q * (1 - p) / (p + q * (1 - p));
  EXPECT_NEAR(ising_tanh_from_fk(pstar), std::exp(-beta), 1e-12);
  EXPECT_NEAR(onsager_axis_rate(std::exp(-beta)), 2 * (0.5 * beta - std::atanh(std::exp(-beta))), 1e-12);
  EXPECT_NEAR(onsager_axis_rate(0.1716), exact_rate(0.1716, 0.0), 1e-6);
}

TEST(Ising, SmallBoxMatchesFkEnumeration) {
  const double p = 0.4;
  auto g = make_graph(Box::cube(2, 1), CouplingField::nearest_neighbor(2));
  const auto dist = exact_distribution(g, {beta_from_probability(p), 2.0}, BoundaryCondition::free);
  BondConfiguration omega(g, BoundaryCondition::free);
  const auto o = static_cast<std::uint32_t>(g->box().index(Site{0, 0}));
  double axis = 0, diag = 0;
  for (std::uint64_t m = 0; m < dist.prob.size(); ++m) {
    omega.set_mask(m);
    if (connected(omega, o, static_cast<std::uint32_t>(g->box().index(Site{1, 0})))) axis += dist.prob[m];
    if (connected(omega, o, static_cast<std::uint32_t>(g->box().index(Site{1, 1})))) diag += dist.prob[m];
  }
  IsingWormConfig cfg;
  cfg.tanh_k = ising_tanh_from_fk(p);
  cfg.half_width = 1;
  cfg.moves = 4000000;
  cfg.seed = 3;
  const auto s = ising_two_point_series(cfg, {Site{1, 0}, Site{1, 1}}, {1, 1});
  EXPECT_LT(std::abs(s[0].p[0].value - axis), 4 * s[0].p[0].se()) << s[0].p[0].value << " " << axis;
  EXPECT_LT(std::abs(s[1].p[0].value - diag), 4 * s[1].p[0].se()) << s[1].p[0].value << " " << diag;
}

TEST(Ising, DirectionalRatesMatchExactCurve) {
  IsingWormConfig cfg;
  cfg.tanh_k = 0.1716;
  cfg.half_width = 12;
  cfg.moves = 60000000;
  cfg.seed = 5;
  const std::vector<Site> steps{Site{1, 0}, Site{1, 1}};
  const auto s = ising_two_point_series(cfg, steps, {10, 7});
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto f = fit_inverse_correlation_length(s[i], 2);
    const double exact = exact_rate(cfg.tanh_k, std::atan2(steps[i][1], steps[i][0]));
    EXPECT_NEAR(f.xi.value, exact, 0.02 * exact) << steps[i].str() << " ci [" << f.xi.lo << ", " << f.xi.hi << "]";
  }
}

TEST(Ising, WormDeterministic) {
  IsingWormConfig cfg;
  cfg.half_width = 4;
  cfg.moves = 100000;
  cfg.tune_stages = 2;
  const auto a = ising_two_point_series(cfg, {Site{1, 0}}, {3});
  const auto b = ising_two_point_series(cfg, {Site{1, 0}}, {3});
  for (std::size_t i = 0; i < a[0].size(); ++i) EXPECT_EQ(a[0].p[i].value, b[0].p[i].value);
}
