#pragma once

// Decay of connection probabilities far below Monte Carlo resolution, built
// from products of conditional probabilities that are each of order one.
// Every factor comes from its own conditioned heat-bath chain.
//
//  bridge: P(0 <-> n s) = prod_{j<n} P(A_{j+1} | A_j) / P(A_j | A_{j+1}),
//          A_j = {0 <-> j s}; chain j runs conditioned on A_j.
//  exit:   P(0 <-> Z^d \ Lambda_N) = prod_{j<=N} P(E_j | E_{j-1}), with the
//          nested events E_j = {0 <-> {|v|_inf >= j + 1}}.
//  wired:  P^w_{Lambda_N}(0 <-> exterior), the same nesting inside one
//          wired box.

#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "fkrc/analysis.hpp"
#include "fkrc/fk.hpp"
#include "fkrc/parallel.hpp"
#include "fkrc/rng.hpp"

namespace fkrc {

struct ChainBudget {
  std::size_t burn_in = 500;
  std::size_t sweeps = 10000;
  std::size_t batches = 50;
};

/// Means of two indicator series from one chain, with the batch-means
/// covariance of the two means.
struct PairedMeans {
  double a = 0, b = 0;
  double var_a = 0, var_b = 0, cov_ab = 0;
  std::size_t sweeps = 0;
};

namespace detail {

inline PairedMeans paired_batch_means(const std::vector<std::uint8_t>& xa, const std::vector<std::uint8_t>& xb,
                                      std::size_t batches) {
  require(batches >= 2 && xa.size() >= batches && xa.size() == xb.size(), ErrorCode::InvalidArgument,
          "need at least one sweep per batch");
  const std::size_t len = xa.size() / batches;
  std::vector<double> ma(batches), mb(batches);
  for (std::size_t k = 0; k < batches; ++k) {
    double sa = 0, sb = 0;
    for (std::size_t i = k * len; i < (k + 1) * len; ++i) {
      sa += xa[i];
      sb += xb[i];
    }
    ma[k] = sa / static_cast<double>(len);
    mb[k] = sb / static_cast<double>(len);
  }
  PairedMeans out;
  out.sweeps = len * batches;
  const double nb = static_cast<double>(batches);
  for (std::size_t k = 0; k < batches; ++k) {
    out.a += ma[k] / nb;
    out.b += mb[k] / nb;
  }
  for (std::size_t k = 0; k < batches; ++k) {
    out.var_a += (ma[k] - out.a) * (ma[k] - out.a);
    out.var_b += (mb[k] - out.b) * (mb[k] - out.b);
    out.cov_ab += (ma[k] - out.a) * (mb[k] - out.b);
  }
  const double norm = nb * (nb - 1);
  out.var_a /= norm;
  out.var_b /= norm;
  out.cov_ab /= norm;
  return out;
}

// Opens an axis-by-axis lattice path from a to b.
inline void open_path(BondConfiguration& omega, Site a, const Site& b) {
  const auto& g = *omega.graph;
  const Box& box = g.box();
  for (int i = 0; i < a.dim; ++i)
    while (a[i] != b[i]) {
      Site n = a;
      n[i] += a[i] < b[i] ? 1 : -1;
      const auto u = static_cast<std::uint32_t>(box.index(a)), v = static_cast<std::uint32_t>(box.index(n));
      omega.open[g.bond_index(std::min(u, v), std::max(u, v))] = 1;
      a = n;
    }
}

inline std::vector<std::uint8_t> shell_mask(const LatticeGraph& g, int radius, bool with_exterior) {
  std::vector<std::uint8_t> m(g.num_vertices() + 1, 0);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) m[v] = g.box().site(v).sup_norm() >= radius;
  m[g.num_vertices()] = with_exterior;
  return m;
}

}  // namespace detail

using ChainProgress = std::function<void(const std::string&)>;

struct BridgeConfig {
  ModelParams params;
  Site step;       ///< lattice vector s
  int k_max = 40;  ///< chains 0..k_max; series up to n = k_max
  int margin = 8;
  /// extra margin spread * sqrt(k |s|). A box of fixed width turns into a
  /// strip for long bridges and strips have no |x|^{-1/2} prefactor.
  double spread = 3.0;
  ChainBudget budget;
  std::uint64_t seed = 1;
  std::size_t threads = 1;  ///< chains run concurrently; results do not depend on it
};

inline int bridge_margin(const BridgeConfig& cfg, int k) {
  return cfg.margin + static_cast<int>(std::ceil(cfg.spread * std::sqrt(k * cfg.step.norm())));
}

struct BridgeChains {
  BridgeConfig config;
  /// chain k: a = P(A_{k+1} | A_k), b = P(A_{k-1} | A_k)
  std::vector<PairedMeans> chains;
  std::size_t total_sweeps = 0;
};

inline GraphPtr bridge_box(const Site& step, int k, int margin) {
  Site lo = Site::zero(step.dim), hi = Site::zero(step.dim);
  for (int i = 0; i < step.dim; ++i) {
    const int a = (k - 1) * step[i], b = (k + 1) * step[i];
    lo[i] = std::min({0, a, b}) - margin;
    hi[i] = std::max({0, a, b}) + margin;
  }
  return make_graph(Box(lo, hi), CouplingField::nearest_neighbor(step.dim));
}

/// One conditioned chain per k = 0..k_max, in a free box around
/// {0, (k - 1) s, (k + 1) s} widened by bridge_margin(cfg, k).
inline BridgeChains run_bridge_chains(const BridgeConfig& cfg, const ChainProgress& progress = {}) {
  require(cfg.k_max >= 1 && cfg.margin >= 1 && cfg.spread >= 0 && !cfg.step.is_zero(), ErrorCode::InvalidArgument,
          "need k_max >= 1, margin >= 1, spread >= 0 and a nonzero step");
  BridgeChains out;
  out.config = cfg;
  out.chains.resize(static_cast<std::size_t>(cfg.k_max) + 1);
  std::mutex report;
  parallel_for(out.chains.size(), cfg.threads, [&](std::size_t idx) {
    const int k = static_cast<int>(idx);
    auto g = bridge_box(cfg.step, k, bridge_margin(cfg, k));
    const Box& box = g->box();
    Site xk = Site::zero(cfg.step.dim), up = xk, down = xk;
    for (int i = 0; i < cfg.step.dim; ++i) {
      xk[i] = k * cfg.step[i];
      up[i] = (k + 1) * cfg.step[i];
      down[i] = (k - 1) * cfg.step[i];
    }
    const auto s = static_cast<std::uint32_t>(box.index(Site::zero(cfg.step.dim)));
    const auto iu = box.index(up), id = box.index(down);
    HeatBath hb(g, cfg.params);
    BondConfiguration omega(g, BoundaryCondition::free);
    detail::open_path(omega, Site::zero(cfg.step.dim), xk);
    const ConnectionEvent ev = ConnectionEvent::between(*g, s, static_cast<std::uint32_t>(box.index(xk)));
    const ConnectionEvent* cond = k > 0 ? &ev : nullptr;
    Rng rng(cfg.seed, static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < cfg.budget.burn_in; ++i) hb.sweep(omega, rng, cond);
    std::vector<std::uint8_t> hit_up(cfg.budget.sweeps), hit_down(cfg.budget.sweeps);
    const std::vector<std::uint8_t> none(g->num_vertices() + 1, 0);
    auto& probe = hb.probe();
    for (std::size_t i = 0; i < cfg.budget.sweeps; ++i) {
      hb.sweep(omega, rng, cond);
      probe.reaches(s, none, std::numeric_limits<std::size_t>::max(), omega.open, false, false);
      for (auto v : probe.component()) {
        hit_up[i] |= v == iu;
        hit_down[i] |= v == id;
      }
    }
    out.chains[idx] = detail::paired_batch_means(hit_up, hit_down, cfg.budget.batches);
    if (progress) {
      std::lock_guard<std::mutex> lock(report);
      progress("bridge chain k=" + std::to_string(k));
    }
  });
  out.total_sweeps = out.chains.size() * (cfg.budget.burn_in + cfg.budget.sweeps);
  return out;
}

/// P(0 <-> n s) for n = n_lo..n_hi with the full covariance of the logs.
/// Scales are Euclidean lengths n |s|.
inline DecaySeries bridge_series(const BridgeChains& bc, int n_lo, int n_hi) {
  require(n_lo >= 1 && n_hi >= n_lo && n_hi <= static_cast<int>(bc.chains.size()) - 1, ErrorCode::InvalidArgument,
          "series range exceeds the chains");
  // z = (log a_0, log b_0, log a_1, log b_1, ...), independent across chains
  const auto nz = static_cast<Eigen::Index>(2 * bc.chains.size());
  Eigen::MatrixXd zc = Eigen::MatrixXd::Zero(nz, nz);
  Eigen::VectorXd z(nz);
  for (std::size_t j = 0; j < bc.chains.size(); ++j) {
    const auto& c = bc.chains[j];
    const auto i = static_cast<Eigen::Index>(2 * j);
    const double a = std::max(c.a, 1e-300), b = std::max(c.b, 1e-300);
    z(i) = std::log(a);
    z(i + 1) = std::log(b);
    zc(i, i) = c.var_a / (a * a);
    zc(i + 1, i + 1) = c.var_b / (b * b);
    zc(i, i + 1) = zc(i + 1, i) = c.cov_ab / (a * b);
  }
  const auto m = static_cast<Eigen::Index>(n_hi - n_lo + 1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, nz);
  for (Eigen::Index r = 0; r < m; ++r) {
    const int n = n_lo + static_cast<int>(r);
    for (int j = 0; j < n; ++j) {
      t(r, 2 * j) += 1.0;
      t(r, 2 * (j + 1) + 1) -= 1.0;
    }
  }
  const Eigen::VectorXd l = t * z;
  DecaySeries s;
  s.label = "bridge";
  s.log_cov = t * zc * t.transpose();
  const double len = bc.config.step.norm();
  for (Eigen::Index r = 0; r < m; ++r) {
    const double sd = std::sqrt(s.log_cov(r, r));
    s.scales.push_back((n_lo + static_cast<double>(r)) * len);
    s.p.push_back({std::exp(l(r)), std::exp(l(r) - kZ95 * sd), std::exp(l(r) + kZ95 * sd), bc.total_sweeps,
                   "bridge-ratio"});
  }
  return s;
}

struct NestedChains {
  std::vector<PairedMeans> chains;  ///< chain j: a = P(next event | current event)
  std::size_t total_sweeps = 0;
};

/// Product series from nested factors: entry N = prod_{j <= N - offset} a_j,
/// for N in [n_lo, n_hi].
inline DecaySeries nested_series(const NestedChains& nc, int first_index, int n_lo, int n_hi, std::string label) {
  const auto m = static_cast<Eigen::Index>(n_hi - n_lo + 1);
  DecaySeries s;
  s.label = std::move(label);
  s.log_cov = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> lsum, vsum;
  double l = 0, v = 0;
  for (const auto& c : nc.chains) {
    const double a = std::max(c.a, 1e-300);
    l += std::log(a);
    v += c.var_a / (a * a);
    lsum.push_back(l);
    vsum.push_back(v);
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto last = static_cast<std::size_t>(n_lo + r - first_index);
    require(last < lsum.size(), ErrorCode::InvalidArgument, "series range exceeds the chains");
    for (Eigen::Index c = 0; c <= r; ++c) s.log_cov(r, c) = s.log_cov(c, r) = vsum[static_cast<std::size_t>(n_lo + c - first_index)];
    const double sd = std::sqrt(vsum[last]);
    s.scales.push_back(static_cast<double>(n_lo + r));
    s.p.push_back({std::exp(lsum[last]), std::exp(lsum[last] - kZ95 * sd), std::exp(lsum[last] + kZ95 * sd),
                   nc.total_sweeps, "nested-ratio"});
  }
  return s;
}

/// -log of factor j as a rate estimate (delta method CI).
inline EstimateWithCI factor_rate(const PairedMeans& c) {
  const double a = std::max(c.a, 1e-300);
  return normal_ci(-std::log(a), std::sqrt(c.var_a) / a, c.sweeps, "nested-ratio");
}

namespace detail {

// Chain conditioned on {source <-> cond} (when cond is non-null), recording
// {source <-> next} after each sweep.
inline PairedMeans nested_chain(const GraphPtr& g, BoundaryCondition bc, const ModelParams& params,
                                const ConnectionEvent* cond, const std::vector<std::uint8_t>& next, const Site& seed_end,
                                const ChainBudget& budget, Rng rng) {
  HeatBath hb(g, params);
  BondConfiguration omega(g, bc);
  const auto s = static_cast<std::uint32_t>(g->box().index(Site::zero(g->box().dim())));
  open_path(omega, Site::zero(g->box().dim()), seed_end);
  for (std::size_t i = 0; i < budget.burn_in; ++i) hb.sweep(omega, rng, cond);
  std::vector<std::uint8_t> hit(budget.sweeps);
  for (std::size_t i = 0; i < budget.sweeps; ++i) {
    hb.sweep(omega, rng, cond);
    hit[i] = hb.probe().reaches(s, next, std::numeric_limits<std::size_t>::max(), omega.open, omega.wired());
  }
  return paired_batch_means(hit, hit, budget.batches);
}

inline Site axis_point(int d, int r) {
  Site x = Site::zero(d);
  x[0] = r;
  return x;
}

}  // namespace detail

/// Chains j = 0..n_max for P(E_j | E_{j-1}) in the free box Lambda_{j+1+margin}.
inline NestedChains run_exit_chains(const ModelParams& params, int d, int n_max, int margin, const ChainBudget& budget,
                                    std::uint64_t seed, std::size_t threads = 1, const ChainProgress& progress = {}) {
  require(n_max >= 0 && margin >= 1, ErrorCode::InvalidArgument, "need n_max >= 0 and margin >= 1");
  NestedChains out;
  out.chains.resize(static_cast<std::size_t>(n_max) + 1);
  std::mutex report;
  parallel_for(out.chains.size(), threads, [&](std::size_t idx) {
    const int j = static_cast<int>(idx);
    auto g = make_graph(Box::cube(d, j + 1 + margin), CouplingField::nearest_neighbor(d));
    ConnectionEvent ev{static_cast<std::uint32_t>(g->box().index(Site::zero(d))), detail::shell_mask(*g, j, false), 0};
    const auto next = detail::shell_mask(*g, j + 1, false);
    out.chains[idx] = detail::nested_chain(g, BoundaryCondition::free, params, j > 0 ? &ev : nullptr, next,
                                           detail::axis_point(d, j), budget,
                                           Rng(seed, 0x1000u + static_cast<std::uint64_t>(j)));
    if (progress) {
      std::lock_guard<std::mutex> lock(report);
      progress("exit chain j=" + std::to_string(j));
    }
  });
  out.total_sweeps = out.chains.size() * (budget.burn_in + budget.sweeps);
  return out;
}

/// P(0 <-> Z^d \ Lambda_N) for N = n_lo..n_hi.
inline DecaySeries exit_series(const NestedChains& nc, int n_lo, int n_hi) {
  return nested_series(nc, 0, n_lo, n_hi, "exit");
}

/// Successive-ratio rates -log(P_N / P_{N-1}) for N = n_lo..n_hi.
inline std::vector<EstimateWithCI> exit_rates(const NestedChains& nc, int n_lo, int n_hi) {
  std::vector<EstimateWithCI> out;
  for (int n = n_lo; n <= n_hi; ++n) out.push_back(factor_rate(nc.chains.at(static_cast<std::size_t>(n))));
  return out;
}

/// P^w_{Lambda_N}(0 <-> exterior) for each N in `ns`, each as a product over
/// the nested shells j = 1..N of one wired box. All chains of all boxes share
/// one worker pool.
inline std::vector<EstimateWithCI> wired_escape_series(const ModelParams& params, int d, const std::vector<int>& ns,
                                                       const ChainBudget& budget, std::uint64_t seed,
                                                       std::size_t threads = 1, std::size_t* sweeps = nullptr) {
  std::vector<std::pair<std::size_t, int>> jobs;  // (box, shell)
  std::vector<GraphPtr> graphs;
  for (std::size_t b = 0; b < ns.size(); ++b) {
    require(ns[b] >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
    graphs.push_back(make_graph(Box::cube(d, ns[b]), CouplingField::nearest_neighbor(d)));
    for (int j = 1; j <= ns[b]; ++j) jobs.emplace_back(b, j);
  }
  std::vector<PairedMeans> results(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto [b, j] = jobs[i];
    const auto& g = graphs[b];
    const auto n = static_cast<std::uint64_t>(ns[b]);
    ConnectionEvent ev{static_cast<std::uint32_t>(g->box().index(Site::zero(d))), detail::shell_mask(*g, j - 1, true),
                       0};
    const auto next = detail::shell_mask(*g, j, true);
    results[i] = detail::nested_chain(g, BoundaryCondition::wired, params, j > 1 ? &ev : nullptr, next,
                                      detail::axis_point(d, j - 1), budget,
                                      Rng(seed, (n << 16) + static_cast<std::uint64_t>(j)));
  });
  std::vector<EstimateWithCI> out;
  std::size_t at = 0;
  for (std::size_t b = 0; b < ns.size(); ++b) {
    NestedChains nc;
    for (int j = 1; j <= ns[b]; ++j) nc.chains.push_back(results[at++]);
    nc.total_sweeps = nc.chains.size() * (budget.burn_in + budget.sweeps);
    if (sweeps) *sweeps += nc.total_sweeps;
    out.push_back(nested_series(nc, 1, ns[b], ns[b], "wired-escape").p.front());
  }
  return out;
}

inline EstimateWithCI wired_escape(const ModelParams& params, int d, int n, const ChainBudget& budget,
                                   std::uint64_t seed, std::size_t* sweeps = nullptr) {
  return wired_escape_series(params, d, {n}, budget, seed, 1, sweeps).front();
}

/// d = 1, q = 1: P(0 <-> Z \ {-N..N}) = 2 p^{N+1} - p^{2(N+1)}.
inline double exit_probability_1d(double p, int n) {
  require(p >= 0 && p <= 1 && n >= 0, ErrorCode::InvalidArgument, "need p in [0, 1] and N >= 0");
  const double a = std::pow(p, n + 1);
  return 2 * a - a * a;
}

/// The same event in d = 1 by exact enumeration on {-N-1..N+1}, any q.
inline double exit_probability_1d_enumerated(const ModelParams& params, int n) {
  auto g = make_graph(Box::cube(1, n + 1), CouplingField::nearest_neighbor(1));
  const auto dist = exact_distribution(g, params, BoundaryCondition::free);
  const auto s = static_cast<std::uint32_t>(g->box().index(Site{0}));
  const auto l = static_cast<std::uint32_t>(g->box().index(Site{-n - 1})),
             r = static_cast<std::uint32_t>(g->box().index(Site{n + 1}));
  BondConfiguration omega(g, BoundaryCondition::free);
  double total = 0;
  for (std::uint64_t mask = 0; mask < dist.prob.size(); ++mask) {
    if (dist.prob[mask] == 0) continue;
    omega.set_mask(mask);
    if (connected(omega, s, l) || connected(omega, s, r)) total += dist.prob[mask];
  }
  return total;
}

}  // namespace fkrc
