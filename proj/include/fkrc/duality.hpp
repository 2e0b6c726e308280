#pragma once

// Planar duality for the nearest-neighbour model on Z^2.
//
// Dual site (i, j) stands for the point (i + 1/2, j + 1/2). For a primal box
// [a1..b1] x [a2..b2] the dual box is [a1-1..b1] x [a2-1..b2]; its outer
// ring of vertices is the outer face, so the dual carries wired bc and the
// ring bonds (which cross no primal bond) are pinned open.

#include <cmath>
#include <cstdint>
#include <vector>

#include "fkrc/error.hpp"
#include "fkrc/fk.hpp"

namespace fkrc {

/// Real coordinates of a dual site.
inline std::array<double, 2> dual_site_position(const Site& s) { return {s[0] + 0.5, s[1] + 0.5}; }

class DualLattice {
 public:
  static constexpr std::size_t kRing = static_cast<std::size_t>(-1);

  explicit DualLattice(GraphPtr primal) : primal_(std::move(primal)) {
    const Box& box = primal_->box();
    require(box.dim() == 2 && primal_->couplings().is_nearest_neighbor(), ErrorCode::UnsupportedModel,
            "duality needs d = 2 with nearest-neighbour couplings");
    Site lo = box.lower(), hi = box.upper();
    lo[0] -= 1;
    lo[1] -= 1;
    dual_ = make_graph(Box(lo, hi), CouplingField::nearest_neighbor(2));
    dual_of_primal_.resize(primal_->num_bonds());
    primal_of_dual_.assign(dual_->num_bonds(), kRing);
    const Box& dbox = dual_->box();
    for (std::size_t e = 0; e < primal_->num_bonds(); ++e) {
      const Site a = box.site(primal_->bond(e).u), b = box.site(primal_->bond(e).v);
      Site da = a, db = a;
      if (b[0] != a[0]) {
        da[1] -= 1;  // horizontal bond (i,j)-(i+1,j) crosses (i,j-1)-(i,j)
      } else {
        da[0] -= 1;  // vertical bond (i,j)-(i,j+1) crosses (i-1,j)-(i,j)
      }
      const auto u = static_cast<std::uint32_t>(dbox.index(da)), v = static_cast<std::uint32_t>(dbox.index(db));
      const std::size_t f = dual_->bond_index(std::min(u, v), std::max(u, v));
      dual_of_primal_[e] = f;
      primal_of_dual_[f] = e;
    }
  }

  const GraphPtr& primal() const { return primal_; }
  const GraphPtr& dual() const { return dual_; }
  std::size_t dual_bond(std::size_t primal_bond) const { return dual_of_primal_[primal_bond]; }
  /// Primal bond crossed by dual bond f, or kRing.
  std::size_t primal_bond(std::size_t dual_bond) const { return primal_of_dual_[dual_bond]; }

  /// omega*(e*) = 1 - omega(e); ring bonds open; wired.
  BondConfiguration dual_config(const BondConfiguration& omega) const {
    require(omega.graph->box() == primal_->box(), ErrorCode::InvalidArgument, "configuration is on another box");
    require(!omega.wired(), ErrorCode::UnsupportedModel, "the primal side of the duality carries free bc");
    BondConfiguration out(dual_, BoundaryCondition::wired);
    out.open.assign(dual_->num_bonds(), 1);
    for (std::size_t e = 0; e < omega.open.size(); ++e) out.open[dual_of_primal_[e]] = !omega.open[e];
    return out;
  }

  /// Inverse of dual_config; ring bonds are ignored.
  BondConfiguration primal_config(const BondConfiguration& dual_omega) const {
    require(dual_omega.graph->box() == dual_->box(), ErrorCode::InvalidArgument, "configuration is on another box");
    BondConfiguration out(primal_, BoundaryCondition::free);
    for (std::size_t e = 0; e < out.open.size(); ++e) out.open[e] = !dual_omega.open[dual_of_primal_[e]];
    return out;
  }

 private:
  GraphPtr primal_, dual_;
  std::vector<std::size_t> dual_of_primal_, primal_of_dual_;
};

inline BondConfiguration dual_config(const BondConfiguration& omega) { return DualLattice(omega.graph).dual_config(omega); }

/// p* = q (1 - p) / (p + q (1 - p)).
inline double dual_parameter(double p, double q) {
  require(p > 0 && p < 1, ErrorCode::DegenerateP, "p must lie in (0, 1)");
  require(q >= 1, ErrorCode::InvalidArgument, "q must be >= 1");
  return q * (1 - p) / (p + q * (1 - p));
}

/// beta* with 1 - exp(-2 beta*) = dual_parameter(1 - exp(-2 beta), q).
inline double dual_beta(double beta, double q) {
  return beta_from_probability(dual_parameter(bond_probability(1.0, beta), q));
}

/// Fixed point of dual_parameter by bisection.
inline double self_dual_point(double q) {
  require(q >= 1, ErrorCode::InvalidArgument, "q must be >= 1");
  double lo = 0.0, hi = 1.0;  // dual_parameter(p) - p decreases from 1 to -1
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (dual_parameter(mid, q) > mid) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// TV distance between the free primal law at p pushed through dual_config
/// and the wired dual law at dual_parameter(p, q), both exact and compared on
/// the dual bonds that cross a primal bond.
inline double measure_duality_tv(const DualLattice& dl, double p, double q) {
  const auto nb = dl.primal()->num_bonds();
  require(dl.dual()->num_bonds() <= kEnumerationCap, ErrorCode::TooManyBonds,
          "dual box has too many bonds to enumerate");
  const ModelParams primal{beta_from_probability(p), q}, dual{beta_from_probability(dual_parameter(p, q)), q};
  const auto fp = exact_distribution(dl.primal(), primal, BoundaryCondition::free);
  const auto fd = exact_distribution(dl.dual(), dual, BoundaryCondition::wired);
  std::vector<double> pushed(std::size_t{1} << nb, 0.0), marginal(std::size_t{1} << nb, 0.0);
  BondConfiguration w(dl.primal(), BoundaryCondition::free), wd(dl.dual(), BoundaryCondition::wired);
  auto key = [&](const BondConfiguration& c) {
    std::size_t k = 0;
    for (std::size_t e = 0; e < nb; ++e) k |= std::size_t{c.open[dl.dual_bond(e)]} << e;
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
  return total_variation(pushed, marginal);
}

}  // namespace fkrc
