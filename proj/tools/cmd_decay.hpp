#pragma once

#include <iostream>
#include <optional>
#include <sstream>

#include "common.hpp"
#include "fkrc/analysis.hpp"
#include "fkrc/decay.hpp"
#include "fkrc/geometry.hpp"

namespace fkrc::cli {

namespace detail {

/// Seed of sub-run `tag`: the first draw of stream (seed, tag).
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t tag) { return Rng(seed, tag)(); }

/// P(0 <-> n s) for every step s. `method = bridge` chains bridge ratios in
/// free boxes (step i seeded from stream 0x5000 + i); `method = direct`
/// counts connections in one heat-bath chain on Lambda_N.
inline std::vector<DecaySeries> decay_series(Context& ctx, const std::vector<Site>& steps) {
  auto& cfg = ctx.cfg;
  const auto params = model_params(cfg);
  const auto seed = cfg.u64("seed");
  const auto method = cfg.choice("method", "bridge", {"bridge", "direct"});
  const int d = steps.front().dim;
  for (const auto& s : steps)
    if (s.dim != d || s.is_zero()) throw ConfigError("steps", "steps: nonzero vectors of one dimension required");
  std::vector<DecaySeries> out;
  if (method == "bridge") {
    BridgeConfig bc;
    bc.params = params;
    bc.k_max = static_cast<int>(cfg.integer("k_max", 40, 1, 10000));
    bc.margin = static_cast<int>(cfg.integer("margin", 8, 1, 10000));
    bc.spread = cfg.real("spread", 3.0, 0.0, 1000.0);
    bc.budget = chain_budget(cfg);
    bc.threads = ctx.threads;
    const int n_lo = static_cast<int>(cfg.integer("n_lo", 1, 1, bc.k_max));
    const int n_hi = static_cast<int>(cfg.integer("n_hi", bc.k_max, n_lo, bc.k_max));
    cfg.reject_unused();
    for (std::size_t i = 0; i < steps.size(); ++i) {
      bc.step = steps[i];
      bc.seed = derived_seed(seed, 0x5000 + i);
      out.push_back(bridge_series(run_bridge_chains(bc), n_lo, n_hi));
      out.back().label = site_label(steps[i]);
    }
    return out;
  }
  ChainSettings s;
  s.sampler = parse_sampler(cfg.choice("sampler", "heat_bath", {"heat_bath", "swendsen_wang"}));
  s.burn_in = static_cast<std::size_t>(cfg.integer("burn_in", 1000, 0, 1LL << 40));
  s.n_samples = static_cast<std::size_t>(cfg.integer("samples", 100, 1LL << 30));
  s.thinning = static_cast<std::size_t>(cfg.integer("thinning", 1, 1, 1LL << 30));
  s.seed = seed;
  const int n = static_cast<int>(cfg.integer("N", 1, 1000));
  const auto bc = boundary(cfg);
  const int n_hi = static_cast<int>(cfg.integer("n_hi", 1, 1000));
  cfg.reject_unused();
  const auto samples = sample_chain(make_graph(Box::cube(d, n), CouplingField::nearest_neighbor(d)), params, bc, s);
  for (const auto& st : steps) {
    std::vector<std::pair<Site, Site>> pairs;
    DecaySeries series;
    series.label = site_label(st);
    for (int k = 1; k <= n_hi; ++k) {
      Site x = Site::zero(d);
      for (int i = 0; i < d; ++i) x[i] = k * st[i];
      if (x.sup_norm() > n) throw ConfigError("n_hi", "n_hi: n_hi * step leaves Lambda_N");
      pairs.emplace_back(Site::zero(d), x);
      series.scales.push_back(k * st.norm());
    }
    series.p = estimate_connectivity(samples, pairs);
    out.push_back(std::move(series));
  }
  return out;
}

inline void write_series(const OutputDir& out, const std::vector<DecaySeries>& series) {
  std::vector<CsvRow> rows;
  std::ostringstream dat;
  dat << "# per direction block: scale log_p log_lo log_hi\n";
  for (const auto& s : series) {
    dat << "# direction " << s.label << "\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
      rows.push_back({"P[" + s.label + "]", s.scales[k], s.p[k]});
      if (s.p[k].value > 0)
        dat << num(s.scales[k]) << ' ' << num(std::log(s.p[k].value)) << ' ' << num(std::log(std::max(s.p[k].lo, 1e-300)))
            << ' ' << num(std::log(s.p[k].hi)) << '\n';
    }
    dat << "\n\n";
  }
  std::ostringstream csv;
  write_estimates_csv(csv, rows);
  out.write("decay.csv", csv.str());
  out.write("decay.dat", dat.str());
}

}  // namespace detail

inline int cmd_xi(Context& ctx) {
  const auto steps = ctx.cfg.has("steps") ? ctx.cfg.site_list("steps") : std::vector<Site>{Site{1, 0}};
  const auto series = detail::decay_series(ctx, steps);
  detail::write_series(ctx.out, series);
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto fit = fit_inverse_correlation_length(series[i], steps[i].dim);
    rows.push_back({"xi[" + series[i].label + "]", steps[i].norm(), fit.xi});
    std::cout << "xi" << steps[i].str() << " per unit length = " << fit.xi.value << " [" << fit.xi.lo << ", "
              << fit.xi.hi << "]\n";
  }
  std::ostringstream csv;
  write_estimates_csv(csv, rows);
  ctx.out.write("xi.csv", csv.str());
  return 0;
}

inline int cmd_oz(Context& ctx) {
  const auto step = ctx.cfg.has("step") ? ctx.cfg.site("step") : Site{1, 0};
  const auto series = detail::decay_series(ctx, {step});
  detail::write_series(ctx.out, series);
  const auto fit = oz_exponent_fit(series.front(), step.dim);
  std::ostringstream csv;
  write_estimates_csv(csv, {{"xi", step.norm(), fit.xi}, {"alpha", step.norm(), fit.alpha}, {"log_psi", step.norm(), fit.log_psi}});
  csv << "# expected_alpha=" << format_double(fit.expected_alpha) << " covers_expected=" << (fit.covers_expected ? 1 : 0)
      << " chi2=" << format_double(fit.chi2) << " dof=" << fit.dof << "\n";
  ctx.out.write("oz.csv", csv.str());
  std::cout << "alpha = " << fit.alpha.value << " [" << fit.alpha.lo << ", " << fit.alpha.hi << "], expected "
            << fit.expected_alpha << (fit.covers_expected ? " (covered)" : " (not covered)") << "\n";
  return 0;
}

inline int cmd_exit(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto params = model_params(cfg);
  const auto seed = cfg.u64("seed");
  const int d = static_cast<int>(cfg.integer("d", 2, 1, kMaxDim));
  const auto ns = cfg.int_list("N");
  for (int n : ns)
    if (n < 1) throw ConfigError("N", "N: values must be >= 1");
  const int margin = static_cast<int>(cfg.integer("margin", 8, 1, 10000));
  const auto budget = chain_budget(cfg);
  const bool wired = cfg.boolean("wired", true);
  const double r2_min = cfg.real("r2_threshold", 0.98, 0.0, 1.0);
  cfg.reject_unused();
  const int n_lo = *std::min_element(ns.begin(), ns.end()), n_hi = *std::max_element(ns.begin(), ns.end());

  const auto chains = run_exit_chains(params, d, n_hi, margin, budget, seed, ctx.threads);
  const auto series = exit_series(chains, n_lo, n_hi);
  const auto rates = exit_rates(chains, n_lo, n_hi);
  std::vector<CsvRow> rows;
  std::ostringstream dat;
  dat << "# N log_p_exit log_lo log_hi rate rate_lo rate_hi" << (wired ? " log_p_wired" : "") << "\n";
  std::vector<EstimateWithCI> w;
  if (wired) w = wired_escape_series(params, d, ns, budget, detail::derived_seed(seed, 0x6000), ctx.threads);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto k = static_cast<std::size_t>(ns[i] - n_lo);
    const auto& p = series.p[k];
    rows.push_back({"P_exit", static_cast<double>(ns[i]), p});
    rows.push_back({"rate", static_cast<double>(ns[i]), rates[k]});
    if (d == 1 && params.q == 1.0) {
      const double e = exit_probability_1d(bond_probability(1.0, params.beta), ns[i]);
      rows.push_back({"P_exit_exact", static_cast<double>(ns[i]), {e, e, e, 0, "closed-form"}});
    }
    dat << ns[i] << ' ' << num(std::log(p.value)) << ' ' << num(std::log(std::max(p.lo, 1e-300))) << ' '
        << num(std::log(p.hi)) << ' ' << num(rates[k].value) << ' ' << num(rates[k].lo) << ' ' << num(rates[k].hi);
    if (wired) {
      rows.push_back({"P_wired", static_cast<double>(ns[i]), w[i]});
      dat << ' ' << num(std::log(w[i].value));
      xs.push_back(ns[i]);
      ys.push_back(std::log(w[i].value));
    }
    dat << '\n';
  }
  std::ostringstream csv;
  write_estimates_csv(csv, rows);
  ctx.out.write("exit.csv", csv.str());
  ctx.out.write("exit.dat", dat.str());
  std::cout << "final rate at N=" << n_hi << ": " << rates.back().value << " [" << rates.back().lo << ", "
            << rates.back().hi << "]\n";
  if (wired && xs.size() >= 3) {
    const auto fit = linear_fit(xs, ys);
    std::ostringstream rep;
    rep << "quantity,value\nwired_log_slope," << format_double(fit.slope) << "\nwired_log_intercept,"
        << format_double(fit.intercept) << "\nwired_r2," << format_double(fit.r2) << "\nr2_threshold,"
        << format_double(r2_min) << "\nlog_linear," << (fit.r2 >= r2_min ? "yes" : "no") << "\n";
    ctx.out.write("assumption.csv", rep.str());
    std::cout << "wired escape: log slope " << fit.slope << ", R^2 " << fit.r2 << "\n";
  }
  return 0;
}

inline int cmd_wulff(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto source = cfg.choice("source", "euclidean", {"euclidean", "l1", "quadratic", "table"});
  const auto resolution = static_cast<std::size_t>(cfg.integer("resolution", 720, 8, 1000000));
  const auto points = static_cast<int>(cfg.integer("curvature_points", 16, 1, 100000));
  const double window = cfg.real("curvature_window", std::numbers::pi / 4, 1e-3, std::numbers::pi);
  std::optional<DirectionalNorm> xi;
  if (source == "euclidean") {
    xi = DirectionalNorm::euclidean(2, cfg.real("norm_scale", 1.0, 1e-12, 1e12));
  } else if (source == "l1") {
    xi = DirectionalNorm::l1(2, cfg.real("norm_scale", 1.0, 1e-12, 1e12));
  } else if (source == "quadratic") {
    const auto a = cfg.real_list("matrix");
    if (a.size() != 3) throw ConfigError("matrix", "matrix: expected a11,a12,a22");
    Eigen::Matrix2d m;
    m << a[0], a[1], a[1], a[2];
    xi = DirectionalNorm::quadratic(m);
  } else {
    const auto dirs = cfg.site_list("directions");
    const auto values = cfg.real_list("values");
    if (values.size() != dirs.size()) throw ConfigError("values", "values: one per direction");
    const double tol = cfg.real("rel_tol", 0.0, 0.0, 1.0);
    std::vector<std::pair<Vec, double>> samples;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (dirs[i].dim != 2 || dirs[i].is_zero()) throw ConfigError("directions", "directions: nonzero 2-vectors");
      if (!(values[i] > 0)) throw ConfigError("values", "values: must be positive");
      samples.emplace_back(Vec(dirs[i]), values[i]);
    }
    xi = symmetric_tabulated_norm(samples, tol);
  }
  cfg.reject_unused();
  const auto u = equi_decay_set(*xi, resolution);
  const auto k = wulff_shape(*xi, resolution);
  std::ostringstream uc, kc;
  write_body_csv(uc, u);
  write_body_csv(kc, k);
  ctx.out.write("U.csv", uc.str());
  ctx.out.write("K.csv", kc.str());
  std::ostringstream ud, kd;
  ud << "# x y\n";
  kd << "# x y\n";
  for (const auto& v : u.vertices) ud << num(v[0]) << ' ' << num(v[1]) << '\n';
  for (const auto& v : k.vertices) kd << num(v[0]) << ' ' << num(v[1]) << '\n';
  ud << num(u.vertices.front()[0]) << ' ' << num(u.vertices.front()[1]) << '\n';
  kd << num(k.vertices.front()[0]) << ' ' << num(k.vertices.front()[1]) << '\n';
  ctx.out.write("U.dat", ud.str());
  ctx.out.write("K.dat", kd.str());

  std::ostringstream cc;
  cc << "theta,t_x,t_y,curvature,positive\n";
  double min_curv = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double th = kTwoPi * i / points;
    const Vec t = dual_vector(Vec::polar(th), *xi);
    const auto c = boundary_curvature(k, t, window);
    min_curv = std::min(min_curv, c.value());
    cc << format_double(th) << ',' << format_double(t[0]) << ',' << format_double(t[1]) << ','
       << format_double(c.value()) << ',' << (c.positive ? 1 : 0) << '\n';
  }
  ctx.out.write("curvature.csv", cc.str());
  const double defect = polarity_defect(u, k);
  std::ostringstream rep;
  rep << "quantity,value\nconvexity_defect_U," << format_double(u.convexity_defect()) << "\nconvexity_defect_K,"
      << format_double(k.convexity_defect()) << "\npolarity_defect," << format_double(defect) << "\nmin_curvature,"
      << format_double(min_curv) << "\n";
  ctx.out.write("wulff.csv", rep.str());
  std::cout << "polarity defect " << defect << ", min curvature " << min_curv << "\n";
  return 0;
}

}  // namespace fkrc::cli
