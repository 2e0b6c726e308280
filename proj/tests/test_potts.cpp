#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fkrc/potts.hpp"

using namespace fkrc;

namespace {

Box two_by_two() { return Box(Site{0, 0}, Site{1, 1}); }

template <class Draw>
std::vector<double> empirical(std::size_t states, int n, Draw&& draw) {
  std::vector<double> h(states, 0.0);
  for (int i = 0; i < n; ++i) h[draw()] += 1.0 / n;
  return h;
}

}  // namespace

TEST(PottsWeight, Examples) {
  SpinConfiguration s(Box::cube(2, 0), 2, PottsBoundary::uniform(1));
  s.spin[0] = 1;
  EXPECT_NEAR(potts_weight(s, 0.7), std::exp(4 * 0.7), 1e-12);
  s.spin[0] = 2;
  EXPECT_DOUBLE_EQ(potts_weight(s, 0.7), 1.0);
  SpinConfiguration t(Box::cube(2, 2), 3, PottsBoundary::dobrushin());
  EXPECT_DOUBLE_EQ(potts_weight(t, 0.0), 1.0);
}

TEST(PottsWeight, CountsBoundaryPairs) {
  // 3x3 ground state under e2-Dobrushin bc: only the 3 pairs across the
  // horizontal line between rows -1 and 0 and the two side pairs... disagree
  SpinConfiguration s(Box::cube(2, 1), 2, PottsBoundary::dobrushin());
  for (std::size_t i = 0; i < s.spin.size(); ++i) s.spin[i] = s.box.site(i)[1] >= 0 ? 1 : 2;
  // pairs meeting the box: 12 inner + 12 boundary = 24; disagreeing: 3 inner
  EXPECT_NEAR(log_potts_weight(s, 1.0), 21.0, 1e-12);
}

TEST(ExactPotts, Examples) {
  const auto uni = exact_potts_distribution(two_by_two(), 0.0, 3, PottsBoundary::uniform(1));
  for (double p : uni.prob) EXPECT_NEAR(p, 1.0 / 81, 1e-15);
  const auto d = exact_potts_distribution(two_by_two(), 0.5, 2, PottsBoundary::uniform(1));
  double sum = 0;
  for (double p : d.prob) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_GT(d.prob[0], d.prob[15]);  // all 1 beats all 2
  for (std::size_t k = 1; k < d.prob.size(); ++k) EXPECT_GT(d.prob[0], d.prob[k]);
  EXPECT_THROW(exact_potts_distribution(Box::cube(2, 3), 0.5, 2, PottsBoundary::free_bc()), Error);
  // brute-force normalisation of the weight
  double z = 0;
  for (std::size_t k = 0; k < d.prob.size(); ++k) z += potts_weight(d.config(k), 0.5);
  for (std::size_t k = 0; k < d.prob.size(); ++k) EXPECT_NEAR(d.prob[k], potts_weight(d.config(k), 0.5) / z, 1e-14);
}

TEST(EdwardsSokal, MatchesExactLaw) {
  struct Case {
    int q;
    PottsBoundary bc;
  };
  for (const auto& c : {Case{2, PottsBoundary::dobrushin()}, Case{3, PottsBoundary::uniform(2)},
                        Case{3, PottsBoundary::free_bc()}, Case{2, PottsBoundary::dobrushin(Vec{0.5, 1.0})}}) {
    const double beta = 0.9;
    const auto exact = exact_potts_distribution(two_by_two(), beta, c.q, c.bc);
    EdwardsSokal es(two_by_two(), beta, c.q, c.bc);
    Rng rng(17);
    auto s = es.initial();
    const auto h = empirical(exact.prob.size(), 1000000, [&] {
      es.step(s, rng);
      return PottsDistribution::key(s);
    });
    EXPECT_LT(total_variation(h, exact.prob), 0.01) << "q=" << c.q;
  }
}

TEST(EdwardsSokal, BetaZeroIsUniform) {
  int ones = 0, total = 0;
  es_sample(3, 0.0, 3, PottsBoundary::dobrushin(), 0, 2000, 1, 5, [&](const SpinConfiguration& s) {
    for (auto v : s.spin) ones += v == 1, ++total;
  });
  EXPECT_NEAR(static_cast<double>(ones) / total, 1.0 / 3, 0.01);
}

TEST(EdwardsSokal, LowTemperatureFollowsBoundary) {
  const double beta = 2 * potts_self_dual_beta(2);
  double agree = 0, total = 0;
  es_sample(8, beta, 2, PottsBoundary::dobrushin(), 50, 50, 2, 9, [&](const SpinConfiguration& s) {
    for (std::size_t i = 0; i < s.spin.size(); ++i) {
      agree += s.spin[i] == s.bc.spin_at(s.box.site(i));
      ++total;
    }
  });
  EXPECT_GT(agree / total, 0.9);
}

TEST(EdwardsSokal, BondMarginalIsFreeFkMeasure) {
  const double beta = 1.1;
  const int q = 3;
  EdwardsSokal es(two_by_two(), beta, q, PottsBoundary::free_bc());
  auto g = make_graph(two_by_two(), CouplingField::nearest_neighbor(2));
  const auto fk = exact_distribution(g, ModelParams{beta / 2, double(q)}, BoundaryCondition::free);
  std::vector<std::size_t> bond_of(es.num_pairs());
  for (std::size_t k = 0; k < es.num_pairs(); ++k) {
    auto [u, v] = es.pair(k);
    bond_of[k] = g->bond_index(std::min(u, v), std::max(u, v));
  }
  Rng rng(23);
  auto s = es.initial();
  const auto h = empirical(fk.prob.size(), 1000000, [&] {
    es.step(s, rng);
    std::size_t m = 0;
    for (std::size_t k = 0; k < es.num_pairs(); ++k) m |= std::size_t{es.bonds()[k]} << bond_of[k];
    return m;
  });
  EXPECT_LT(total_variation(h, fk.prob), 0.01);
}

TEST(Interface, GroundStateIsFlat) {
  const int n = 5;
  SpinConfiguration s(Box::cube(2, n), 2, PottsBoundary::dobrushin());
  for (std::size_t i = 0; i < s.spin.size(); ++i) s.spin[i] = s.box.site(i)[1] >= 0 ? 1 : 2;
  const auto iface = extract_interface(s);
  EXPECT_EQ(iface.edges.size(), 2u * n + 1);
  EXPECT_EQ(iface.left, (Site{-n - 1, -1}));
  EXPECT_EQ(iface.right, (Site{n, -1}));
  for (const auto& v : iface.vertices) EXPECT_EQ(v[1], -1);
  const auto prof = interface_profile(iface, 16);
  for (std::size_t k = 0; k < prof.r.size(); ++k) {
    EXPECT_DOUBLE_EQ(prof.height[k], -0.5);
    EXPECT_DOUBLE_EQ(prof.phi[k], 0.0);
  }
}

TEST(Interface, DetachedIslandIsExcluded) {
  const int n = 5;
  SpinConfiguration s(Box::cube(2, n), 2, PottsBoundary::dobrushin());
  for (std::size_t i = 0; i < s.spin.size(); ++i) s.spin[i] = s.box.site(i)[1] >= 0 ? 1 : 2;
  s.spin[s.box.index(Site{0, 3})] = 2;
  const auto iface = extract_interface(s);
  EXPECT_EQ(iface.edges.size(), 2u * n + 1);
  // an island touching the interface joins it
  s.spin[s.box.index(Site{0, 3})] = 1;
  s.spin[s.box.index(Site{0, 0})] = 2;
  EXPECT_EQ(extract_interface(s).edges.size(), 2u * n + 3);
}

TEST(Interface, TiltedNormal) {
  const int n = 4;
  const auto bc = PottsBoundary::dobrushin(Vec{0.3, 1.0});
  SpinConfiguration s(Box::cube(2, n), 2, bc);
  for (std::size_t i = 0; i < s.spin.size(); ++i) s.spin[i] = bc.spin_at(s.box.site(i));
  const auto iface = extract_interface(s);
  EXPECT_LT(iface.left[0], -n + 0);
  EXPECT_GE(iface.right[0], n);
  EXPECT_GE(iface.edges.size(), 2u * n + 1);
}

TEST(DobrushinWorm, MatchesExactLawOnTinyBox) {
  const double beta = 0.8;
  const auto exact = exact_potts_distribution(Box::cube(2, 1), beta, 2, PottsBoundary::dobrushin());
  DobrushinWorm worm(1, beta);
  Rng rng(31);
  worm.tune(rng, 8, 200.0);
  const auto visits = static_cast<std::uint64_t>(std::ceil(worm.visits_per_round_trip(rng, 2000000)));
  const auto h = empirical(exact.prob.size(), 400000, [&] {
    worm.advance_visits(rng, visits);
    return PottsDistribution::key(worm.spins());
  });
  EXPECT_LT(total_variation(h, exact.prob), 0.01);
}

TEST(DobrushinWorm, AgreesWithEdwardsSokal) {
  // mean spin per site on Lambda_4 at a temperature where ES mixes well
  const int n = 4;
  const double beta = 1.2;
  const int samples = 40000;
  const auto box = Box::cube(2, n);
  std::vector<double> es_mean(box.size(), 0.0), worm_mean(box.size(), 0.0);
  es_sample(n, beta, 2, PottsBoundary::dobrushin(), 200, samples, 2, 41, [&](const SpinConfiguration& s) {
    for (std::size_t i = 0; i < s.spin.size(); ++i) es_mean[i] += (s.spin[i] == 1) / double(samples);
  });
  DobrushinWorm worm(n, beta);
  Rng rng(43);
  worm.tune(rng);
  const auto visits = static_cast<std::uint64_t>(std::ceil(worm.visits_per_round_trip(rng, 5000000)));
  for (int k = 0; k < samples; ++k) {
    worm.advance_visits(rng, visits);
    const auto s = worm.spins();
    for (std::size_t i = 0; i < s.spin.size(); ++i) worm_mean[i] += (s.spin[i] == 1) / double(samples);
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double p = 0.5 * (es_mean[i] + worm_mean[i]);
    const double se = std::sqrt(std::max(p * (1 - p), 1e-4) * 2.0 / samples) * 2.0;  // ES draws are correlated
    EXPECT_NEAR(es_mean[i], worm_mean[i], 5 * se) << box.site(i).str();
  }
}

TEST(DobrushinWorm, InterfaceSpansEveryColumn) {
  DobrushinWorm worm(8, 2 * potts_self_dual_beta(2));
  Rng rng(5);
  worm.tune(rng, 10);
  const auto visits = static_cast<std::uint64_t>(std::ceil(worm.visits_per_round_trip(rng, 5000000)));
  for (int k = 0; k < 200; ++k) {
    worm.advance_visits(rng, visits);
    const auto iface = extract_interface(worm.spins());
    EXPECT_GE(iface.edges.size(), 17u);
    const auto prof = interface_profile(iface, 16);
    EXPECT_EQ(prof.phi.front(), 0.0);
    EXPECT_EQ(prof.phi.back(), 0.0);
  }
}
