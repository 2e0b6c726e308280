#include <gtest/gtest.h>

#include <cmath>

#include "fkrc/duality.hpp"

using namespace fkrc;

namespace {

GraphPtr box2(int n1, int n2) {
  return make_graph(Box(Site{0, 0}, Site{n1 - 1, n2 - 1}), CouplingField::nearest_neighbor(2));
}

}  // namespace

TEST(DualLattice, GeometryOfTwoByTwo) {
  DualLattice dl(box2(2, 2));
  EXPECT_EQ(dl.primal()->num_bonds(), 4u);
  EXPECT_EQ(dl.dual()->num_vertices(), 9u);
  EXPECT_EQ(dl.dual()->num_bonds(), 12u);
  std::size_t ring = 0;
  for (std::size_t f = 0; f < dl.dual()->num_bonds(); ++f) ring += dl.primal_bond(f) == DualLattice::kRing;
  EXPECT_EQ(ring, 8u);
}

TEST(DualLattice, EachPrimalBondCrossesItsDual) {
  DualLattice dl(box2(3, 4));
  const Box& pb = dl.primal()->box();
  const Box& db = dl.dual()->box();
  for (std::size_t e = 0; e < dl.primal()->num_bonds(); ++e) {
    const Site a = pb.site(dl.primal()->bond(e).u), b = pb.site(dl.primal()->bond(e).v);
    const auto f = dl.dual()->bond(dl.dual_bond(e));
    const auto pa = dual_site_position(db.site(f.u)), pq = dual_site_position(db.site(f.v));
    // midpoints coincide and the bonds are perpendicular
    EXPECT_DOUBLE_EQ(0.5 * (a[0] + b[0]), 0.5 * (pa[0] + pq[0]));
    EXPECT_DOUBLE_EQ(0.5 * (a[1] + b[1]), 0.5 * (pa[1] + pq[1]));
    EXPECT_DOUBLE_EQ((b[0] - a[0]) * (pq[0] - pa[0]) + (b[1] - a[1]) * (pq[1] - pa[1]), 0.0);
  }
}

TEST(DualConfig, Examples) {
  auto g = box2(3, 3);
  DualLattice dl(g);
  BondConfiguration all(g, BoundaryCondition::free);
  all.open.assign(all.open.size(), 1);
  const auto d = dl.dual_config(all);
  for (std::size_t f = 0; f < d.open.size(); ++f) EXPECT_EQ(d.open[f], dl.primal_bond(f) == DualLattice::kRing);
  // one open horizontal bond: only its vertical dual is closed
  BondConfiguration one(g, BoundaryCondition::free);
  const auto e = g->bond_index(g->box().index(Site{0, 1}), g->box().index(Site{1, 1}));
  one.open[e] = 1;
  const auto d1 = dl.dual_config(one);
  for (std::size_t f = 0; f < d1.open.size(); ++f) EXPECT_EQ(d1.open[f], f != dl.dual_bond(e));
  const auto fb = dl.dual()->bond(dl.dual_bond(e));
  EXPECT_EQ(dl.dual()->box().site(fb.u)[0], dl.dual()->box().site(fb.v)[0]);  // vertical
}

TEST(DualConfig, Involution) {
  auto g = box2(4, 3);
  DualLattice dl(g);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    BondConfiguration w(g, BoundaryCondition::free);
    for (auto& b : w.open) b = rng.bernoulli(0.5);
    EXPECT_EQ(dl.primal_config(dl.dual_config(w)).open, w.open);
  }
}

TEST(DualConfig, RejectsOtherModels) {
  auto g3 = make_graph(Box::cube(3, 1), CouplingField::nearest_neighbor(3));
  EXPECT_THROW(DualLattice{g3}, Error);
  CouplingField far(2, {{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}, {{2, 0}, 1}, {{-2, 0}, 1}});
  try {
    DualLattice bad(make_graph(Box::cube(2, 1), far));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedModel);
  }
}

TEST(DualParameter, Examples) {
  EXPECT_DOUBLE_EQ(dual_parameter(0.5, 1.0), 0.5);
  EXPECT_NEAR(dual_parameter(0.5, 2.0), 2.0 / 3.0, 1e-15);
  for (double q : {1.0, 1.5, 2.0, 4.0})
    for (double p = 0.05; p < 1; p += 0.05) {
      const double ps = dual_parameter(p, q);
      EXPECT_NEAR(ps / (1 - ps), q * (1 - p) / p, 1e-12 * (1 + q * (1 - p) / p));
      EXPECT_NEAR(dual_parameter(ps, q), p, 1e-12);
    }
  EXPECT_THROW(dual_parameter(0.0, 2.0), Error);
  EXPECT_THROW(dual_parameter(1.0, 2.0), Error);
  EXPECT_NEAR(dual_beta(dual_beta(0.3, 2.0), 2.0), 0.3, 1e-12);
}

TEST(SelfDualPoint, Examples) {
  EXPECT_NEAR(self_dual_point(1.0), 0.5, 1e-12);
  EXPECT_NEAR(self_dual_point(2.0), std::sqrt(2.0) / (1 + std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(self_dual_point(2.0), 0.585786, 1e-6);
  EXPECT_NEAR(self_dual_point(4.0), 2.0 / 3.0, 1e-12);
}

TEST(MeasureDuality, FreePrimalEqualsWiredDual) {
  for (double q : {1.0, 2.0, 3.5})
    for (double p : {0.3, 0.6}) {
      DualLattice dl(box2(2, 2));
      const ModelParams primal{beta_from_probability(p), q};
      const ModelParams dual{beta_from_probability(dual_parameter(p, q)), q};
      const auto fp = exact_distribution(dl.primal(), primal, BoundaryCondition::free);
      const auto fd = exact_distribution(dl.dual(), dual, BoundaryCondition::wired);
      // push the primal law forward and marginalize the dual law over ring bonds
      std::vector<double> pushed(std::size_t{1} << 4, 0.0), marginal(std::size_t{1} << 4, 0.0);
      BondConfiguration w(dl.primal(), BoundaryCondition::free), wd(dl.dual(), BoundaryCondition::wired);
      auto key = [&](const BondConfiguration& c) {
        std::size_t k = 0;
        for (std::size_t e = 0; e < 4; ++e) k |= std::size_t{c.open[dl.dual_bond(e)]} << e;
        return k;
      };
      for (std::uint64_t m = 0; m < fp.prob.size(); ++m) {
        w.set_mask(m);
        pushed[key(dl.dual_config(w))] += fp.prob[m];
      }
      for (std::uint64_t m = 0; m < fd.prob.size(); ++m) {
        wd.set_mask(m);
        marginal[key(wd)] += fd.prob[m];
      }
      EXPECT_LT(total_variation(pushed, marginal), 1e-10) << "q=" << q << " p=" << p;
    }
}

TEST(MeasureDuality, HelperMatchesOnSmallBoxes) {
  for (double q : {1.0, 2.0, 4.0}) {
    EXPECT_LT(measure_duality_tv(DualLattice(box2(2, 2)), 0.5, q), 1e-10);
    EXPECT_LT(measure_duality_tv(DualLattice(box2(1, 2)), 0.7, q), 1e-10);
  }
}
