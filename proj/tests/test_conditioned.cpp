#include <gtest/gtest.h>

#include <cmath>

#include "fkrc/conditioned.hpp"

using namespace fkrc;

namespace {

double exact_connection(const ModelParams& params, int n, const Site& x, double* mean_size = nullptr) {
  auto g = make_graph(Box::cube(2, n), CouplingField::nearest_neighbor(2));
  const auto dist = exact_distribution(g, params, BoundaryCondition::free);
  BondConfiguration omega(g, BoundaryCondition::free);
  const auto o = static_cast<std::uint32_t>(g->box().index(Site{0, 0}));
  const auto t = static_cast<std::uint32_t>(g->box().index(x));
  double p = 0, size = 0;
  for (std::uint64_t m = 0; m < dist.prob.size(); ++m) {
    omega.set_mask(m);
    const auto lab = cluster_labeling(omega);
    if (lab.label[o] != lab.label[t]) continue;
    p += dist.prob[m];
    size += dist.prob[m] * static_cast<double>(std::count(lab.label.begin(), lab.label.end() - 1, lab.label[o]));
  }
  if (mean_size) *mean_size = size / p;
  return p;
}

Cluster line(int n) {
  std::vector<Site> v;
  std::vector<Cluster::Edge> e;
  for (int i = 0; i <= n; ++i) {
    v.push_back(Site{i, 0});
    if (i) e.emplace_back(i - 1, i);
  }
  return Cluster(v, e, Site{0, 0}, Site{n, 0});
}

void check_against_enumeration(double q, std::uint64_t seed) {
  const ModelParams params{beta_from_probability(0.5), q};
  const Site x{1, 1};
  double size = 0;
  const double exact = exact_connection(params, 1, x, &size);
  ConditionedSamplerConfig cfg;
  cfg.params = params;
  cfg.x = x;
  cfg.half_width = 1;
  cfg.thinning = 2;
  cfg.seed = seed;
  ConditionedClusterSampler s(cfg);
  double total = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto c = s.next();
    ASSERT_TRUE(c.contains(Site{0, 0}) && c.contains(x));
    total += static_cast<double>(c.size());
  }
  const auto rate = wilson(s.accepted(), s.attempts());
  // the chain's attempts are correlated, so allow a wider band for q > 1
  const double band = q == 1.0 ? 4 * rate.se() : 12 * rate.se();
  EXPECT_NEAR(s.acceptance_rate(), exact, band);
  EXPECT_NEAR(total / n, size, 0.05);
}

}  // namespace

TEST(ConditionedSampler, ZeroProbabilityFailsAtOnce) {
  ConditionedSamplerConfig cfg;
  cfg.params = {0.0, 1.0};
  cfg.x = Site{3, 0};
  ConditionedClusterSampler s(cfg);
  try {
    s.next();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AcceptanceTooLow);
  }
  EXPECT_EQ(s.attempts(), 0u);
}

TEST(ConditionedSampler, RejectionBudget) {
  ConditionedSamplerConfig cfg;
  cfg.params = {beta_from_probability(0.05), 1.0};
  cfg.x = Site{20, 0};
  cfg.max_rejects = 50;
  ConditionedClusterSampler s(cfg);
  EXPECT_THROW(s.next(), Error);
  EXPECT_EQ(s.attempts(), 50u);
}

TEST(ConditionedSampler, LeathMatchesEnumeration) { check_against_enumeration(1.0, 4); }

TEST(ConditionedSampler, ChainMatchesEnumeration) { check_against_enumeration(2.0, 5); }

TEST(ConditionedSampler, PilotAcceptance) {
  ConditionedSamplerConfig cfg;
  cfg.params = {beta_from_probability(0.45), 1.0};
  cfg.x = Site{4, 0};
  cfg.seed = 2;
  ConditionedClusterSampler s(cfg);
  for (int i = 0; i < 500; ++i) {
    const auto c = s.next();
    ASSERT_TRUE(c.contains(Site{4, 0}));
    ASSERT_EQ(c.origin(), Site({0, 0}));
  }
  EXPECT_GT(s.acceptance_rate(), 0.1);
}

TEST(ConditionedSampler, Deterministic) {
  ConditionedSamplerConfig cfg;
  cfg.params = {beta_from_probability(0.45), 1.0};
  cfg.x = Site{6, 0};
  cfg.seed = 9;
  ConditionedClusterSampler a(cfg), b(cfg);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a.next().vertices(), b.next().vertices());
}

TEST(ConeDensity, LineClusters) {
  const auto xi = DirectionalNorm::euclidean(2);
  std::vector<double> scales{8, 16, 24};
  std::vector<std::vector<double>> counts;
  for (double s : scales) {
    const auto c = line(static_cast<int>(s));
    const double k = static_cast<double>(cone_point_count(c, Vec{1.0, 0.0}, 0.1, xi));
    EXPECT_EQ(k, s + 1);
    counts.push_back({k, k});
  }
  const auto d = cone_density(scales, counts);
  for (const auto& e : d.density) EXPECT_NEAR(e.value, 1.0, 0.13);
  EXPECT_NEAR(d.fit.slope, 1.0, 1e-12);
}

TEST(StepTail, UnitStepsAreDegenerate) {
  EffectiveWalk w;
  w.steps.assign(1500, Site{1, 0});
  const auto t = step_tail_fit({w});
  EXPECT_TRUE(t.degenerate);
  EXPECT_TRUE(std::isinf(t.kappa.value));
}

TEST(StepTail, TooFewSteps) {
  EffectiveWalk w;
  w.steps.assign(10, Site{1, 0});
  try {
    step_tail_fit({w});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSteps);
  }
}

TEST(StepTail, GeometricRecovery) {
  const double kappa = 0.7;
  Rng rng(13, 0);
  EffectiveWalk w;
  for (int i = 0; i < 20000; ++i) {
    int g = 0;
    while (rng.uniform() < std::exp(-kappa)) ++g;
    w.steps.push_back(Site{1 + g, 0});
  }
  const auto t = step_tail_fit({w});
  EXPECT_FALSE(t.degenerate);
  EXPECT_TRUE(t.kappa.covers(kappa)) << t.kappa.lo << ' ' << t.kappa.hi;
  EXPECT_GT(t.kappa.lo, 0);
}

TEST(Quantile, OrderStatistics) {
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(i);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.95), 95.0);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.0), 0.0);
  const auto ci = quantile_ci(xs, 0.5);
  EXPECT_TRUE(ci.covers(50.0));
  EXPECT_LT(ci.hi - ci.lo, 25.0);
}

TEST(Hausdorff, PrunedMatchesDenseSampling) {
  ConditionedSamplerConfig cfg;
  cfg.params = {beta_from_probability(0.45), 1.0};
  cfg.x = Site{10, 0};
  cfg.seed = 21;
  ConditionedClusterSampler s(cfg);
  const auto xi = DirectionalNorm::euclidean(2);
  for (int k = 0; k < 30; ++k) {
    const auto c = s.next();
    const auto cones = cluster_cone_points(c, Vec{1.0, 0.0}, 0.1, xi);
    const auto r = polyline_and_hausdorff(c, cones);
    // dense reference: every sample against every segment, both directions
    std::vector<std::pair<Vec, Vec>> body, poly;
    for (const auto& v : c.vertices()) body.emplace_back(Vec(v), Vec(v));
    for (const auto& [a, b] : c.edges()) body.emplace_back(Vec(c.vertex(a)), Vec(c.vertex(b)));
    for (std::size_t i = 0; i + 1 < r.polyline.size(); ++i) poly.emplace_back(r.polyline[i], r.polyline[i + 1]);
    if (poly.empty()) poly.emplace_back(r.polyline[0], r.polyline[0]);
    auto dist = [](const Vec& p, const std::vector<std::pair<Vec, Vec>>& set) {
      double best = 1e300;
      for (const auto& [a, b] : set) best = std::min(best, detail::segment_distance(p, a, b));
      return best;
    };
    double h = 0;
    for (const auto* from : {&body, &poly}) {
      const auto& to = from == &body ? poly : body;
      for (const auto& [a, b] : *from)
        for (int i = 0; i <= 200; ++i) h = std::max(h, dist(a + (i / 200.0) * (b - a), to));
    }
    EXPECT_NEAR(r.distance, h, 0.02);
  }
}
