#pragma once

// Brownian-bridge statistics of interface profiles.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "fkrc/analysis.hpp"
#include "fkrc/parallel.hpp"
#include "fkrc/potts.hpp"
#include "fkrc/rng.hpp"

namespace fkrc {

struct BridgeTest {
  EstimateWithCI chi;            ///< Var phi(r) = chi r (1 - r)
  double r2 = 0;                 ///< of the variance fit over interior grid points
  double kurtosis = 0;           ///< m4 / m2^2 of phi at the grid point nearest 1/2
  double max_cov_deviation = 0;  ///< max |Cov - chi (r ^ r' - r r')| / (chi / 4)
  double endpoint_variance = 0;  ///< largest variance at r = 0 or 1
  std::vector<double> r, variance;
  std::optional<double> reference;     ///< curvature-derived chi, if given
  std::optional<double> relative_gap;  ///< |chi - reference| / reference
};

/// Fits the bridge covariance to profiles sharing one grid. `column` selects
/// the column-mean profile instead of the cone-point one.
inline BridgeTest bridge_covariance_test(const std::vector<InterfaceProfile>& profiles,
                                         std::optional<double> reference = std::nullopt, bool column = false,
                                         std::size_t min_profiles = 1000) {
  require(profiles.size() >= min_profiles, ErrorCode::InvalidArgument,
          "need at least " + std::to_string(min_profiles) + " profiles");
  const auto& grid = profiles.front().r;
  require(grid.size() >= 3, ErrorCode::GridMismatch, "grid needs an interior point");
  for (const auto& p : profiles) {
    const auto& phi = column ? p.column_phi : p.phi;
    require(p.r == grid && phi.size() == grid.size(), ErrorCode::GridMismatch, "profiles use different grids");
  }
  const auto n = static_cast<Eigen::Index>(profiles.size()), m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& phi = column ? profiles[static_cast<std::size_t>(i)].column_phi : profiles[static_cast<std::size_t>(i)].phi;
    for (Eigen::Index k = 0; k < m; ++k) x(i, k) = phi[static_cast<std::size_t>(k)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const double nn = static_cast<double>(n);
  const Eigen::MatrixXd cov = x.transpose() * x / (nn - 1);

  BridgeTest out;
  out.r = grid;
  Eigen::VectorXd g(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double r = grid[static_cast<std::size_t>(k)];
    g(k) = r * (1 - r);
    out.variance.push_back(cov(k, k));
  }
  out.endpoint_variance = std::max(cov(0, 0), cov(m - 1, m - 1));

  // chi = sum_k g_k Var_k / sum g^2 is an average of per-profile terms, which
  // gives its standard error directly
  const double gg = g.squaredNorm();
  const Eigen::VectorXd s = x.array().square().matrix() * g / gg;
  const double chi = s.sum() / (nn - 1);
  const double sd = std::sqrt((s.array() - s.mean()).square().sum() / (nn - 1));
  out.chi = normal_ci(chi, sd / std::sqrt(nn), profiles.size(), "least-squares");

  double ss_res = 0, ss_tot = 0, vbar = 0;
  int interior = 0;
  for (Eigen::Index k = 0; k < m; ++k)
    if (g(k) > 0) {
      vbar += cov(k, k);
      ++interior;
    }
  vbar /= interior;
  for (Eigen::Index k = 0; k < m; ++k)
    if (g(k) > 0) {
      ss_res += std::pow(cov(k, k) - chi * g(k), 2);
      ss_tot += std::pow(cov(k, k) - vbar, 2);
    }
  out.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);

  Eigen::Index mid = 0;
  for (Eigen::Index k = 1; k < m; ++k)
    if (std::abs(grid[static_cast<std::size_t>(k)] - 0.5) < std::abs(grid[static_cast<std::size_t>(mid)] - 0.5)) mid = k;
  const double m2 = x.col(mid).array().square().mean(), m4 = x.col(mid).array().pow(4).mean();
  out.kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;

  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      const double ra = grid[static_cast<std::size_t>(a)], rb = grid[static_cast<std::size_t>(b)];
      const double model = chi * (std::min(ra, rb) - ra * rb);
      out.max_cov_deviation = std::max(out.max_cov_deviation, std::abs(cov(a, b) - model) / (chi / 4));
    }
  if (reference) {
    out.reference = reference;
    out.relative_gap = std::abs(chi - *reference) / *reference;
  }
  return out;
}

/// Exact samples of sqrt(chi) B(r) for a standard Brownian bridge B on the
/// grid r = k / m.
inline std::vector<InterfaceProfile> simulate_brownian_bridges(std::size_t count, std::size_t m, double chi,
                                                               std::uint64_t seed) {
  require(m >= 2 && chi >= 0, ErrorCode::InvalidArgument, "need m >= 2 and chi >= 0");
  Rng rng(seed);
  std::vector<InterfaceProfile> out(count);
  const double dt = 1.0 / static_cast<double>(m);
  for (auto& p : out) {
    std::vector<double> w(m + 1, 0.0);
    for (std::size_t k = 1; k <= m; ++k) w[k] = w[k - 1] + std::sqrt(dt) * rng.normal();
    for (std::size_t k = 0; k <= m; ++k) {
      const double r = static_cast<double>(k) / static_cast<double>(m);
      p.r.push_back(r);
      p.phi.push_back(std::sqrt(chi) * (w[k] - r * w[m]));
    }
    p.column_phi = p.phi;
  }
  return out;
}

struct InterfaceSamplerConfig {
  int n = 32;
  double beta = 0;        ///< Potts inverse temperature, exp(beta delta) convention
  std::size_t profiles = 10000;
  std::size_t m = 16;     ///< grid r = k/m
  double delta = 0.5;
  std::size_t chains = 8;  ///< independent worms; profiles are split evenly
  int tune_stages = 16;
  double tune_sweeps = 40;
  double pilot_sweeps = 400;  ///< pilot run for the visits per round trip, in units of (2N+2)^2 moves
  std::uint64_t seed = 1;
};

/// Interface profiles of the e2-Dobrushin q = 2 model. Worm c uses stream
/// (seed, c), so the result does not depend on `threads`.
inline std::vector<InterfaceProfile> sample_interface_profiles(const InterfaceSamplerConfig& cfg,
                                                               std::size_t threads = 1) {
  require(cfg.chains >= 1 && cfg.profiles >= cfg.chains, ErrorCode::InvalidArgument,
          "need profiles >= chains >= 1");
  std::vector<std::vector<InterfaceProfile>> parts(cfg.chains);
  parallel_for(cfg.chains, threads, [&](std::size_t c) {
    Rng rng(cfg.seed, c);
    DobrushinWorm worm(cfg.n, cfg.beta);
    worm.tune(rng, cfg.tune_stages, cfg.tune_sweeps);
    const double side = 2.0 * cfg.n + 2;
    const auto pilot = static_cast<std::uint64_t>(cfg.pilot_sweeps * side * side);
    const auto k = static_cast<std::uint64_t>(std::ceil(worm.visits_per_round_trip(rng, pilot)));
    const std::size_t count = cfg.profiles / cfg.chains + (c < cfg.profiles % cfg.chains ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      worm.advance_visits(rng, k);
      parts[c].push_back(interface_profile(extract_interface(worm.spins()), cfg.m, cfg.delta));
    }
  });
  std::vector<InterfaceProfile> out;
  for (auto& part : parts)
    for (auto& p : part) out.push_back(std::move(p));
  return out;
}

}  // namespace fkrc
