#pragma once

#include <bit>
#include <cmath>
#include <iostream>
#include <sstream>

#include "cluster_io.hpp"
#include "common.hpp"
#include "fkrc/conditioned.hpp"
#include "fkrc/duality.hpp"

namespace fkrc::cli {

namespace detail {

inline std::string numbered(const std::string& dir, std::size_t i, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return dir + "/" + buf + ext;
}

inline std::string site_text(const Site& s) {
  std::string out = "(";
  for (int i = 0; i < s.dim; ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out + ")";
}

}  // namespace detail

inline int cmd_sample(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto mode = cfg.choice("mode", "chain", {"chain", "conditioned"});
  const auto params = model_params(cfg);
  const auto seed = cfg.u64("seed");
  if (mode == "chain") {
    const int d = static_cast<int>(cfg.integer("d", 1, kMaxDim));
    const int n = static_cast<int>(cfg.integer("N", 1, 1000));
    const auto bc = boundary(cfg);
    ChainSettings s;
    s.sampler = parse_sampler(cfg.choice("sampler", "heat_bath", {"heat_bath", "swendsen_wang"}));
    s.burn_in = static_cast<std::size_t>(cfg.integer("burn_in", 1000, 0, 1LL << 40));
    s.n_samples = static_cast<std::size_t>(cfg.integer("samples", 1, 1000000));
    s.thinning = static_cast<std::size_t>(cfg.integer("thinning", 1, 1, 1LL << 30));
    s.seed = seed;
    cfg.reject_unused();
    auto g = make_graph(Box::cube(d, n), CouplingField::nearest_neighbor(d));
    std::ostringstream dat;
    dat << "# sample open_bonds\n";
    std::size_t k = 0;
    sample_chain(g, params, bc, s, [&](const BondConfiguration& w) {
      ctx.out.write(detail::numbered("configurations", k, ".fk"), dump_configuration(w, params, seed));
      std::size_t open = 0;
      for (auto b : w.open) open += b;
      dat << k++ << ' ' << open << '\n';
    });
    ctx.out.write("open_bonds.dat", dat.str());
    std::cout << "wrote " << k << " configurations\n";
    return 0;
  }
  ConditionedSamplerConfig sc;
  sc.params = params;
  sc.x = cfg.site("x");
  sc.half_width = static_cast<int>(cfg.integer("half_width", 0, 0, 100000));
  sc.max_rejects = static_cast<std::size_t>(cfg.integer("max_rejects", 100000, 1, 1LL << 40));
  sc.burn_in = static_cast<std::size_t>(cfg.integer("burn_in", 1000, 0, 1LL << 40));
  sc.thinning = static_cast<std::size_t>(cfg.integer("thinning", 10, 1, 1LL << 30));
  sc.seed = seed;
  const auto count = static_cast<std::size_t>(cfg.integer("samples", 1, 1000000));
  cfg.reject_unused();
  ConditionedClusterSampler sampler(sc);
  std::ostringstream dat;
  dat << "# sample vertices edges\n";
  for (std::size_t k = 0; k < count; ++k) {
    const auto c = sampler.next();
    ctx.out.write(detail::numbered("clusters", k, ".json"), cluster_json(c).dump() + "\n");
    dat << k << ' ' << c.size() << ' ' << c.edges().size() << '\n';
  }
  ctx.out.write("cluster_sizes.dat", dat.str());
  std::ostringstream csv;
  csv << "quantity,value\nattempts," << sampler.attempts() << "\naccepted," << sampler.accepted()
      << "\nacceptance_rate," << format_double(sampler.acceptance_rate()) << "\n";
  ctx.out.write("acceptance.csv", csv.str());
  std::cout << "wrote " << count << " clusters, acceptance " << sampler.acceptance_rate() << "\n";
  return 0;
}

inline int cmd_enumerate(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto params = model_params(cfg);
  const auto bc = boundary(cfg);
  Box box = Box::cube(1, 1);
  if (cfg.has("lower") || cfg.has("upper")) {
    const Site lo = cfg.site("lower"), hi = cfg.site("upper");
    if (lo.dim != hi.dim) throw ConfigError("upper", "upper: dimension differs from lower");
    for (int i = 0; i < lo.dim; ++i)
      if (hi[i] < lo[i]) throw ConfigError("upper", "upper: below lower");
    box = Box(lo, hi);
  } else {
    box = Box::cube(static_cast<int>(cfg.integer("d", 1, kMaxDim)), static_cast<int>(cfg.integer("N", 0, 100)));
  }
  cfg.reject_unused();
  auto g = make_graph(box, CouplingField::nearest_neighbor(box.dim()));
  const auto ex = exact_distribution(g, params, bc);
  const auto nb = g->num_bonds();
  std::ostringstream dist;
  dist << "config,open_bonds,probability\n";
  for (std::uint64_t m = 0; m < ex.prob.size(); ++m) {
    std::string bits(nb, '0');
    for (std::size_t e = 0; e < nb; ++e) bits[e] = (m >> e) & 1u ? '1' : '0';
    dist << (nb ? bits : "-") << ',' << std::popcount(m) << ',' << format_double(ex.prob[m]) << '\n';
  }
  ctx.out.write("distribution.csv", dist.str());
  std::ostringstream marg;
  marg << "bond,u,v,p_open\n";
  for (std::size_t e = 0; e < nb; ++e) {
    const auto& b = g->bond(e);
    marg << e << ',' << detail::site_text(box.site(b.u)) << ',' << detail::site_text(box.site(b.v)) << ','
         << format_double(ex.bond_marginal(e)) << '\n';
  }
  ctx.out.write("marginals.csv", marg.str());
  std::cout << "enumerated " << ex.prob.size() << " configurations on " << nb << " bonds\n";
  for (std::size_t e = 0; e < nb && e < 8; ++e) std::cout << "  P(bond " << e << " open) = " << ex.bond_marginal(e) << "\n";
  return 0;
}

inline int cmd_duality(Context& ctx) {
  auto& cfg = ctx.cfg;
  const double p = fk_probability(cfg);
  const double q = cfg.real("q", 1.0, 1e9);
  std::vector<int> dims{2, 2};
  if (cfg.has("box")) {
    dims = cfg.int_list("box");
    if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1) throw ConfigError("box", "box: expected two positive sides");
  }
  cfg.reject_unused();
  if (p <= 0) throw ConfigError("p", "p: duality needs p > 0");
  DualLattice dl(make_graph(Box(Site{0, 0}, Site{dims[0] - 1, dims[1] - 1}), CouplingField::nearest_neighbor(2)));
  const double ps = dual_parameter(p, q);
  const double back = dual_parameter(ps, q);
  const double sd = self_dual_point(q);
  bool config_involution = true;
  BondConfiguration w(dl.primal(), BoundaryCondition::free);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << dl.primal()->num_bonds()); ++m) {
    w.set_mask(m);
    config_involution = config_involution && dl.primal_config(dl.dual_config(w)).open == w.open;
  }
  const double tv = measure_duality_tv(dl, p, q);
  std::ostringstream csv;
  csv << "quantity,value\n"
      << "p," << format_double(p) << "\nq," << format_double(q) << "\np_dual," << format_double(ps)
      << "\nbeta," << format_double(beta_from_probability(p)) << "\nbeta_dual," << format_double(beta_from_probability(ps))
      << "\ninvolution_error," << format_double(std::abs(back - p)) << "\nconfig_involution,"
      << (config_involution ? "exact" : "broken") << "\nself_dual_p," << format_double(sd)
      << "\nself_dual_closed_form," << format_double(std::sqrt(q) / (1 + std::sqrt(q))) << "\ntv_pushforward_vs_dual,"
      << format_double(tv) << "\n";
  ctx.out.write("duality.csv", csv.str());
  std::cout << "p* = " << ps << ", TV(pushforward, dual exact) = " << tv << ", self-dual p = " << sd << "\n";
  return 0;
}

}  // namespace fkrc::cli
