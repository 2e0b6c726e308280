#pragma once

// Two-point function of the high-temperature planar Ising model, which is
// FK connectivity at q = 2: P_p(0 <-> x) = <s_0 s_x> at tanh K = p/(2 - p)
// (equivalently 1 - p = exp(-2K)). It is sampled on high-temperature graphs:
// edge sets E of a free box with odd vertices {0, head}, weight (tanh K)^|E|,
// and a site bias W(head) tuned until the head visits every site about
// equally often. Then <s_0 s_x> = (H(x) / W(x)) / (H(0) / W(0)) for visit
// counts H.

#include <cmath>
#include <set>
#include <vector>

#include "fkrc/analysis.hpp"
#include "fkrc/lattice.hpp"
#include "fkrc/rng.hpp"

namespace fkrc {

/// tanh K for the Ising coupling whose FK representation has bond
/// probability p.
inline double ising_tanh_from_fk(double p) {
  require(p >= 0 && p < 1, ErrorCode::InvalidArgument, "p must lie in [0, 1)");
  return p / (2 - p);
}

/// Exact on-axis rate -log tanh K - 2K of the high-temperature phase.
inline double onsager_axis_rate(double tanh_k) {
  require(tanh_k > 0 && tanh_k < std::sqrt(2.0) - 1, ErrorCode::InvalidArgument, "need 0 < tanh K < sqrt 2 - 1");
  return -std::log(tanh_k) - 2 * std::atanh(tanh_k);
}

class IsingTwoPointWorm {
 public:
  IsingTwoPointWorm(int half_width, double tanh_k)
      : n_(half_width), side_(2 * half_width + 1), t_(tanh_k) {
    require(half_width >= 1, ErrorCode::InvalidArgument, "half-width must be >= 1");
    require(tanh_k > 0 && tanh_k < 1, ErrorCode::InvalidArgument, "need 0 < tanh K < 1");
    const auto cells = static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
    horiz_.assign(cells, 0);
    vert_.assign(cells, 0);
    log_w_.assign(cells, 0.0);
    for (int y = -n_; y <= n_; ++y)
      for (int x = -n_; x <= n_; ++x) log_w_[cell(x, y)] = -std::log(t_) * (std::abs(x) + std::abs(y));
    hx_ = hy_ = 0;
  }

  int half_width() const { return n_; }
  Site head() const { return Site{hx_, hy_}; }
  double log_weight(int x, int y) const { return log_w_[cell(x, y)]; }

  void move(Rng& rng) {
    const std::uint64_t bits = rng();
    const int dir = static_cast<int>(bits & 3u);
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    int x = hx_, y = hy_;
    std::uint8_t* edge;
    switch (dir) {
      case 0:
        if (x == n_) return;
        edge = &horiz_[cell(x, y)];
        ++x;
        break;
      case 1:
        if (x == -n_) return;
        edge = &horiz_[cell(x - 1, y)];
        --x;
        break;
      case 2:
        if (y == n_) return;
        edge = &vert_[cell(x, y)];
        ++y;
        break;
      default:
        if (y == -n_) return;
        edge = &vert_[cell(x, y - 1)];
        --y;
        break;
    }
    const double ratio = (*edge ? 1.0 / t_ : t_) * std::exp(log_w_[cell(x, y)] - log_w_[cell(hx_, hy_)]);
    if (ratio >= 1.0 || u < ratio) {
      *edge ^= 1u;
      hx_ = x;
      hy_ = y;
    }
  }

  /// Flattens the head's site histogram by repeated reweighting.
  void tune(Rng& rng, int stages = 20, double sweeps_per_stage = 200.0) {
    const auto cells = log_w_.size();
    const auto moves = static_cast<std::uint64_t>(sweeps_per_stage * static_cast<double>(cells));
    std::vector<double> hist(cells);
    for (int s = 0; s < stages; ++s) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (std::uint64_t k = 0; k < moves; ++k) {
        move(rng);
        hist[cell(hx_, hy_)] += 1.0;
      }
      for (std::size_t c = 0; c < cells; ++c) log_w_[c] -= std::log(hist[c] + 1.0);
      const double ref = log_w_[cell(0, 0)];
      for (auto& w : log_w_) w -= ref;
    }
  }

  /// Visit counts of the head per site over `moves` moves.
  std::vector<double> run(Rng& rng, std::uint64_t moves) {
    std::vector<double> hist(log_w_.size(), 0.0);
    for (std::uint64_t k = 0; k < moves; ++k) {
      move(rng);
      hist[cell(hx_, hy_)] += 1.0;
    }
    return hist;
  }

  std::size_t cell(int x, int y) const {
    return static_cast<std::size_t>(y + n_) * static_cast<std::size_t>(side_) + static_cast<std::size_t>(x + n_);
  }

 private:
  int n_, side_;
  double t_;
  std::vector<std::uint8_t> horiz_, vert_;  // edge (x, y)-(x+1, y) and (x, y)-(x, y+1)
  std::vector<double> log_w_;
  int hx_, hy_;
};

struct IsingWormConfig {
  double tanh_k = 0.1716;
  int half_width = 14;
  int tune_stages = 20;
  double tune_sweeps = 200;
  std::uint64_t moves = 200000000;  ///< production moves
  std::size_t batches = 50;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<Site> square_images(const Site& s) {
  std::set<Site> out;
  for (int swap = 0; swap < 2; ++swap)
    for (int sx : {-1, 1})
      for (int sy : {-1, 1}) out.insert(Site{sx * (swap ? s[1] : s[0]), sy * (swap ? s[0] : s[1])});
  return {out.begin(), out.end()};
}

}  // namespace detail

/// <s_0 s_{n s}> for every step s and n = 1..n_max[i], averaged over the
/// lattice images of n s, from one worm run. Covariances of the logs come
/// from batch means of the ratio estimator.
inline std::vector<DecaySeries> ising_two_point_series(const IsingWormConfig& cfg, const std::vector<Site>& steps,
                                                       const std::vector<int>& n_max) {
  require(steps.size() == n_max.size(), ErrorCode::InvalidArgument, "one n_max per step");
  require(cfg.batches >= 2 && cfg.moves >= cfg.batches, ErrorCode::InvalidArgument, "need moves >= batches >= 2");
  Rng rng(cfg.seed);
  IsingTwoPointWorm worm(cfg.half_width, cfg.tanh_k);
  worm.tune(rng, cfg.tune_stages, cfg.tune_sweeps);

  // the targets: every (step, n) with its images
  struct Target {
    std::size_t series;
    int n;
    std::vector<std::size_t> cells;
  };
  std::vector<Target> targets;
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (int n = 1; n <= n_max[i]; ++n) {
      Target t{i, n, {}};
      for (const auto& y : detail::square_images(Site{n * steps[i][0], n * steps[i][1]})) {
        require(y.sup_norm() <= cfg.half_width, ErrorCode::InvalidArgument, "target " + y.str() + " outside the box");
        t.cells.push_back(worm.cell(y[0], y[1]));
      }
      targets.push_back(std::move(t));
    }
  const auto origin = worm.cell(0, 0);
  const std::size_t nb = cfg.batches;
  // batch b: numerator per target (sum H/W over images / #images) and the
  // origin's H/W
  Eigen::MatrixXd num(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(targets.size()));
  Eigen::VectorXd den(static_cast<Eigen::Index>(nb));
  for (std::size_t b = 0; b < nb; ++b) {
    const auto hist = worm.run(rng, cfg.moves / nb);
    auto weighted = [&](std::size_t c) {
      const auto cols = static_cast<int>(2 * cfg.half_width + 1);
      const int x = static_cast<int>(c % static_cast<std::size_t>(cols)) - cfg.half_width;
      const int y = static_cast<int>(c / static_cast<std::size_t>(cols)) - cfg.half_width;
      return hist[c] * std::exp(-worm.log_weight(x, y));
    };
    den(static_cast<Eigen::Index>(b)) = weighted(origin);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      double s = 0;
      for (auto c : targets[k].cells) s += weighted(c);
      num(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) = s / static_cast<double>(targets[k].cells.size());
    }
  }
  // ratio estimator G_k = mean(num_k) / mean(den); its log has influence
  // (num_k - G_k den) / (G_k mean(den)) per batch
  const double dbar = den.mean();
  require(dbar > 0, ErrorCode::AcceptanceTooLow, "the head never returned to the origin");
  const Eigen::RowVectorXd g = num.colwise().mean() / dbar;
  Eigen::MatrixXd infl(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(targets.size()));
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double gk = std::max(g(k), 1e-300);
    infl.col(k) = (num.col(k) - gk * den) / (gk * dbar);
  }
  const double nbd = static_cast<double>(nb);
  const Eigen::MatrixXd cov = infl.transpose() * infl / (nbd * (nbd - 1));

  std::vector<DecaySeries> out(steps.size());
  std::vector<std::vector<std::size_t>> members(steps.size());
  for (std::size_t k = 0; k < targets.size(); ++k) members[targets[k].series].push_back(k);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto& s = out[i];
    s.label = "ising-two-point " + steps[i].str();
    const auto m = static_cast<Eigen::Index>(members[i].size());
    s.log_cov.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto ka = static_cast<Eigen::Index>(members[i][static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < m; ++b)
        s.log_cov(a, b) = cov(ka, static_cast<Eigen::Index>(members[i][static_cast<std::size_t>(b)]));
      const double sd = std::sqrt(cov(ka, ka));
      s.scales.push_back(targets[static_cast<std::size_t>(ka)].n * steps[i].norm());
      s.p.push_back({g(ka), g(ka) * std::exp(-kZ95 * sd), g(ka) * std::exp(kZ95 * sd), cfg.moves, "biased-worm"});
    }
  }
  return out;
}

}  // namespace fkrc
