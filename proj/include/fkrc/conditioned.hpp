#pragma once

// Clusters conditioned on {0 <-> x} by rejection, and the renewal statistics
// read off their decompositions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "fkrc/analysis.hpp"
#include "fkrc/clustergeo.hpp"
#include "fkrc/fk.hpp"
#include "fkrc/rng.hpp"

namespace fkrc {

struct ConditionedSamplerConfig {
  ModelParams params;
  Site x;                          ///< target; the origin is 0
  int half_width = 0;              ///< free box Lambda_n; 0 picks a default from |x|
  std::size_t max_rejects = 100000;
  std::size_t burn_in = 1000;      ///< q > 1 only
  std::size_t thinning = 10;       ///< q > 1 only: sweeps between attempts
  std::uint64_t seed = 1;
};

/// Rejection sampler for P(. | 0 <-> x) in a free nearest-neighbour box. For
/// q = 1 each attempt grows the open cluster of 0 with lazily revealed bonds,
/// which is an exact independent draw; for q > 1 attempts are successive
/// states of a heat-bath chain.
class ConditionedClusterSampler {
 public:
  explicit ConditionedClusterSampler(const ConditionedSamplerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.params.validate();
    require(cfg_.max_rejects >= 1, ErrorCode::InvalidArgument, "max_rejects must be >= 1");
    const int d = cfg_.x.dim;
    const int n = cfg_.half_width > 0 ? cfg_.half_width
                                      : (cfg_.params.q == 1.0 ? std::max(64, 4 * cfg_.x.sup_norm() + 32)
                                                              : 2 * cfg_.x.sup_norm() + 16);
    graph_ = make_graph(Box::cube(d, n), CouplingField::nearest_neighbor(d));
    require(graph_->box().contains(cfg_.x), ErrorCode::InvalidArgument, "x lies outside the box");
    p_ = bond_probability(1.0, cfg_.params.beta);
    origin_ = static_cast<std::uint32_t>(graph_->box().index(Site::zero(d)));
    target_ = static_cast<std::uint32_t>(graph_->box().index(cfg_.x));
    if (cfg_.params.q == 1.0) {
      state_.assign(graph_->num_bonds(), 0);
      local_.assign(graph_->num_vertices(), kNone);
    } else {
      hb_ = std::make_unique<HeatBath>(graph_, cfg_.params);
      omega_ = std::make_unique<BondConfiguration>(graph_, BoundaryCondition::free);
    }
  }

  /// Next accepted cluster. Throws AcceptanceTooLow after max_rejects
  /// consecutive rejections, and at once when p = 0 and x != 0.
  Cluster next() {
    require(p_ > 0 || cfg_.x.is_zero(), ErrorCode::AcceptanceTooLow, "p = 0: 0 <-> x is impossible");
    std::size_t rejects = 0;
    while (true) {
      ++attempts_;
      auto c = cfg_.params.q == 1.0 ? grow() : chain_attempt();
      if (c) {
        ++accepted_;
        return std::move(*c);
      }
      ++rejects;
      require(rejects < cfg_.max_rejects, ErrorCode::AcceptanceTooLow,
              std::to_string(rejects) + " consecutive rejections");
    }
  }

  std::size_t attempts() const { return attempts_; }
  std::size_t accepted() const { return accepted_; }
  double acceptance_rate() const {
    return attempts_ ? static_cast<double>(accepted_) / static_cast<double>(attempts_) : 0.0;
  }
  const LatticeGraph& graph() const { return *graph_; }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  std::optional<Cluster> grow() {
    const auto& g = *graph_;
    std::vector<std::uint32_t> order{origin_};
    std::vector<Cluster::Edge> edges;
    local_[origin_] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const auto u = order[head];
      auto [lo, hi] = g.arcs(u);
      for (const auto* a = lo; a != hi; ++a) {
        auto& s = state_[a->bond];
        if (s) continue;  // revealed from the other side
        s = rng_.uniform() < p_ ? 1 : 2;
        touched_.push_back(a->bond);
        if (s == 2) continue;
        if (local_[a->to] == kNone) {
          local_[a->to] = static_cast<std::uint32_t>(order.size());
          order.push_back(a->to);
        }
        edges.emplace_back(local_[u], local_[a->to]);
      }
    }
    std::optional<Cluster> out;
    if (local_[target_] != kNone) {
      std::vector<Site> sites;
      sites.reserve(order.size());
      for (auto v : order) sites.push_back(g.box().site(v));
      out.emplace(std::move(sites), std::move(edges), Site::zero(cfg_.x.dim), cfg_.x);
    }
    for (auto v : order) local_[v] = kNone;
    for (auto e : touched_) state_[e] = 0;
    touched_.clear();
    return out;
  }

  std::optional<Cluster> chain_attempt() {
    const std::size_t sweeps = burned_ ? std::max<std::size_t>(1, cfg_.thinning) : cfg_.burn_in + 1;
    burned_ = true;
    for (std::size_t i = 0; i < sweeps; ++i) hb_->sweep(*omega_, rng_);
    if (!hb_->probe().joined(origin_, target_, std::numeric_limits<std::size_t>::max(), omega_->open, false))
      return std::nullopt;
    return extract_cluster(*omega_, Site::zero(cfg_.x.dim), cfg_.x);
  }

  ConditionedSamplerConfig cfg_;
  Rng rng_;
  GraphPtr graph_;
  double p_ = 0;
  std::uint32_t origin_ = 0, target_ = 0;
  std::vector<std::uint8_t> state_;  // 0 unrevealed, 1 open, 2 closed
  std::vector<std::uint32_t> local_;
  std::vector<std::uint32_t> touched_;
  std::unique_ptr<HeatBath> hb_;
  std::unique_ptr<BondConfiguration> omega_;
  bool burned_ = false;
  std::size_t attempts_ = 0, accepted_ = 0;
};

struct ConeDensity {
  std::vector<double> scales;
  std::vector<EstimateWithCI> density;  ///< mean cone-point count / |x|
  LinearFit fit;                        ///< counts against |x|, all clusters pooled
};

/// counts[i] holds the cone-point counts of the clusters sampled at scale
/// scales[i].
inline ConeDensity cone_density(const std::vector<double>& scales,
                                const std::vector<std::vector<double>>& counts) {
  require(scales.size() == counts.size() && scales.size() >= 2, ErrorCode::InvalidArgument,
          "need counts for at least two scales");
  ConeDensity out;
  out.scales = scales;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    require(counts[i].size() >= 2, ErrorCode::InvalidArgument, "need two clusters per scale");
    const auto mv = mean_var(counts[i]);
    out.density.push_back(normal_ci(mv.mean / scales[i], mv.se() / scales[i], mv.n, "mean"));
    for (double c : counts[i]) {
      xs.push_back(scales[i]);
      ys.push_back(c);
    }
  }
  out.fit = linear_fit(xs, ys);
  return out;
}

/// Cone-point count of a cluster along t.
inline std::size_t cone_point_count(const Cluster& c, const Vec& t, double delta, const DirectionalNorm& xi) {
  return cluster_cone_points(c, t, delta, xi, ConeSearch::accelerated).size();
}

struct StepTail {
  EstimateWithCI kappa;  ///< +inf with a degenerate flag when the tail is empty
  bool degenerate = false;
  double threshold = 0;  ///< |V|_1 value where the tail starts
  std::size_t steps = 0;
};

/// Exponential tail of the step lengths |V|_1, pooled over walks. Above the
/// median length the excess is fitted as geometric:
/// P(|V|_1 >= s0 + k) = exp(-kappa k).
inline StepTail step_tail_fit(const std::vector<EffectiveWalk>& walks, std::size_t min_steps = 1000) {
  std::vector<double> len;
  for (const auto& w : walks)
    for (const auto& v : w.steps) {
      int l1 = 0;
      for (int i = 0; i < v.dim; ++i) l1 += std::abs(v[i]);
      len.push_back(l1);
    }
  require(len.size() >= min_steps, ErrorCode::TooFewSteps,
          std::to_string(len.size()) + " steps pooled, need " + std::to_string(min_steps));
  std::sort(len.begin(), len.end());
  StepTail out;
  out.steps = len.size();
  out.threshold = len[len.size() / 2];
  std::vector<double> excess;
  for (double l : len)
    if (l >= out.threshold) excess.push_back(l - out.threshold);
  const auto mv = mean_var(excess);
  if (mv.mean == 0) {
    const double inf = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    out.kappa = {inf, inf, inf, excess.size(), "geometric-tail-mle"};
    return out;
  }
  const double y = mv.mean;
  const double k = std::log1p(1.0 / y);
  const double se = mv.se() / (y * (1 + y));
  out.kappa = normal_ci(k, se, excess.size(), "geometric-tail-mle");
  return out;
}

/// Empirical quantile (linear interpolation between order statistics).
inline double quantile(std::vector<double> xs, double q) {
  require(!xs.empty() && q >= 0 && q <= 1, ErrorCode::InvalidArgument, "need data and q in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  return xs[i] + (pos - static_cast<double>(i)) * (xs[i + 1] - xs[i]);
}

/// Order-statistic 95% CI for a quantile (normal approximation to the
/// binomial rank).
inline EstimateWithCI quantile_ci(std::vector<double> xs, double q) {
  require(xs.size() >= 2, ErrorCode::InvalidArgument, "need at least two values");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double half = kZ95 * std::sqrt(n * q * (1 - q));
  auto at = [&](double r) {
    const auto i = static_cast<std::size_t>(std::clamp(r, 0.0, n - 1));
    return xs[i];
  };
  return {quantile(xs, q), at(std::floor(n * q - half)), at(std::ceil(n * q + half)), xs.size(), "order-statistic"};
}

}  // namespace fkrc
