#include <gtest/gtest.h>

#include <cmath>

#include "fkrc/fk.hpp"

using namespace fkrc;

namespace {

GraphPtr square(int n, int d = 2) { return make_graph(Box::cube(d, n), CouplingField::nearest_neighbor(d)); }

ModelParams with_p(double p, double q) { return {beta_from_probability(p), q}; }

}  // namespace

TEST(BondProbability, InvertsBeta) {
  EXPECT_NEAR(bond_probability(1.0, beta_from_probability(0.37)), 0.37, 1e-15);
  EXPECT_NEAR(bond_probability(1.0, 0.5 * std::log(2.0)), 0.5, 1e-15);
}

TEST(ClusterLabeling, FreeAndWiredCounts) {
  auto g = square(1);
  BondConfiguration free(g, BoundaryCondition::free), wired(g, BoundaryCondition::wired);
  EXPECT_EQ(cluster_labeling(free).count, 9u);
  // the 8 boundary sites merge into the exterior cluster, the centre is alone
  EXPECT_EQ(cluster_labeling(wired).count, 2u);
}

TEST(ConfigWeight, AllClosedWired) {
  auto g = square(1);
  BondConfiguration w(g, BoundaryCondition::wired);
  const double p = 0.3;
  EXPECT_NEAR(config_weight(w, with_p(p, 2.0)), std::pow(1 - p, 12) * 4.0, 1e-14);
}

TEST(ExactDistribution, SingleBond) {
  auto g1 = make_graph(Box(Site{0}, Site{1}), CouplingField::nearest_neighbor(1));
  ASSERT_EQ(g1->num_bonds(), 1u);
  const auto dist = exact_distribution(g1, with_p(0.5, 2.0), BoundaryCondition::free);
  // open: p q ; closed: (1-p) q^2
  EXPECT_NEAR(dist.bond_marginal(0), 1.0 / 3.0, 1e-15);
}

TEST(ExactDistribution, QOneIsProduct) {
  auto g = square(1);
  const auto dist = exact_distribution(g, with_p(0.3, 1.0), BoundaryCondition::wired);
  for (std::size_t e = 0; e < g->num_bonds(); ++e) EXPECT_NEAR(dist.bond_marginal(e), 0.3, 1e-13);
  EXPECT_NEAR(dist.all_open(0b101), 0.09, 1e-13);
}

TEST(ExactDistribution, RejectsTooManyBonds) {
  EXPECT_THROW(exact_distribution(square(3), with_p(0.5, 2.0), BoundaryCondition::free), Error);
}

TEST(Connectivity, WiredThroughExterior) {
  auto g = make_graph(Box(Site{0}, Site{3}), CouplingField::nearest_neighbor(1));
  BondConfiguration w(g, BoundaryCondition::wired), f(g, BoundaryCondition::free);
  EXPECT_TRUE(connected(w, 0, 3));
  EXPECT_FALSE(connected(f, 0, 3));
  EXPECT_FALSE(connected(w, 1, 2));
  f.open = {1, 1, 1};
  EXPECT_TRUE(connected(f, 0, 3));
}

TEST(Connectivity, Restricted) {
  auto g = make_graph(Box(Site{0}, Site{3}), CouplingField::nearest_neighbor(1));
  BondConfiguration f(g, BoundaryCondition::free);
  f.open = {1, 1, 1};
  std::vector<std::uint8_t> a{1, 1, 0, 0};
  EXPECT_TRUE(restricted_connected(f, a, 0, 2));   // endpoint may leave A
  EXPECT_FALSE(restricted_connected(f, a, 0, 3));  // interior vertex 2 is outside A
}

TEST(ConnectivityProbe, AgreesWithLabelling) {
  auto g = square(3);
  Rng rng(11);
  ConnectivityProbe probe(*g);
  for (int trial = 0; trial < 200; ++trial) {
    BondConfiguration w(g, trial % 2 ? BoundaryCondition::wired : BoundaryCondition::free);
    for (auto& b : w.open) b = rng.bernoulli(0.45);
    const auto lab = cluster_labeling(w);
    for (int k = 0; k < 10; ++k) {
      const auto x = static_cast<std::uint32_t>(rng.below(g->num_vertices()));
      const auto y = static_cast<std::uint32_t>(rng.below(g->num_vertices()));
      EXPECT_EQ(probe.joined(x, y, SIZE_MAX, w.open, w.wired()), lab.label[x] == lab.label[y]);
    }
  }
}

namespace {

// Empirical law of full configurations from a chain, compared to the oracle.
template <class Step>
double chain_tv(const ExactDistribution& exact, BondConfiguration omega, Step&& step, int n) {
  std::vector<double> hist(exact.prob.size(), 0.0);
  for (int i = 0; i < 200; ++i) step(omega);
  for (int i = 0; i < n; ++i) {
    step(omega);
    hist[omega.mask()] += 1.0 / n;
  }
  return total_variation(hist, exact.prob);
}

}  // namespace

TEST(HeatBath, MatchesExactLawNonIntegerQ) {
  auto g = make_graph(Box(Site{0, 0}, Site{1, 2}), CouplingField::nearest_neighbor(2));  // 7 bonds
  for (auto bc : {BoundaryCondition::free, BoundaryCondition::wired}) {
    const auto params = with_p(0.55, 2.5);
    const auto exact = exact_distribution(g, params, bc);
    HeatBath hb(g, params);
    Rng rng(3);
    const double tv = chain_tv(exact, BondConfiguration(g, bc), [&](BondConfiguration& w) { hb.sweep(w, rng); }, 200000);
    EXPECT_LT(tv, 0.02) << to_string(bc);
  }
}

TEST(HeatBath, ConditionedChainMatchesConditionedLaw) {
  auto g = make_graph(Box(Site{0, 0}, Site{1, 2}), CouplingField::nearest_neighbor(2));
  const auto params = with_p(0.4, 2.0);
  const auto bc = BoundaryCondition::free;
  auto exact = exact_distribution(g, params, bc);
  ConnectionEvent ev{0, std::vector<std::uint8_t>(g->num_vertices() + 1, 0)};
  const std::uint32_t far = static_cast<std::uint32_t>(g->num_vertices() - 1);
  ev.target[far] = 1;
  BondConfiguration w(g, bc);
  double z = 0.0;
  for (std::uint64_t m = 0; m < exact.prob.size(); ++m) {
    w.set_mask(m);
    if (!connected(w, 0, far)) exact.prob[m] = 0.0;
    z += exact.prob[m];
  }
  for (auto& p : exact.prob) p /= z;
  w.open.assign(w.open.size(), 1);
  HeatBath hb(g, params);
  Rng rng(5);
  const double tv = chain_tv(exact, w, [&](BondConfiguration& c) { hb.sweep(c, rng, &ev); }, 200000);
  EXPECT_LT(tv, 0.02);
}

TEST(SwendsenWang, MatchesExactLaw) {
  auto g = make_graph(Box(Site{0, 0}, Site{1, 2}), CouplingField::nearest_neighbor(2));
  for (auto bc : {BoundaryCondition::free, BoundaryCondition::wired}) {
    const auto params = with_p(0.6, 3.0);
    const auto exact = exact_distribution(g, params, bc);
    SwendsenWang sw(g, params);
    Rng rng(9);
    std::vector<std::uint8_t> spins(g->num_vertices(), 0);
    const double tv =
        chain_tv(exact, BondConfiguration(g, bc), [&](BondConfiguration& w) { sw.step(w, spins, rng); }, 200000);
    EXPECT_LT(tv, 0.02) << to_string(bc);
  }
}

TEST(SwendsenWang, RejectsNonIntegerQ) {
  EXPECT_THROW(SwendsenWang(square(1), with_p(0.5, 2.5)), Error);
}

TEST(SampleChain, ReproducibleFromSeed) {
  ChainSettings s{Sampler::heat_bath, 10, 5, 2, 42};
  const auto a = sample_chain(square(2), with_p(0.5, 2.0), BoundaryCondition::wired, s);
  const auto b = sample_chain(square(2), with_p(0.5, 2.0), BoundaryCondition::wired, s);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].open, b[i].open);
}

TEST(Dump, RoundTrip) {
  auto g = square(2);
  BondConfiguration w(g, BoundaryCondition::wired);
  Rng rng(1);
  for (auto& b : w.open) b = rng.bernoulli(0.5);
  const ModelParams params{0.3, 2.0};
  const auto text = dump_configuration(w, params, 77);
  EXPECT_EQ(text.substr(0, text.find('\n')), "fk d=2 N=2 q=2 beta=0.3 bc=wired seed=77");
  const auto back = parse_configuration(text);
  EXPECT_EQ(back.omega, w);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_DOUBLE_EQ(back.params.beta, 0.3);
}

TEST(Dump, NibbleOrder) {
  auto g = make_graph(Box::cube(1, 2), CouplingField::nearest_neighbor(1));  // 4 bonds
  BondConfiguration w(g, BoundaryCondition::free);
  w.open = {1, 0, 0, 0};
  auto text = dump_configuration(w, {0.1, 1.0}, 0);
  EXPECT_EQ(text.substr(text.find('\n') + 1), "1\n");
  w.open = {0, 0, 0, 1};
  text = dump_configuration(w, {0.1, 1.0}, 0);
  EXPECT_EQ(text.substr(text.find('\n') + 1), "8\n");
}
