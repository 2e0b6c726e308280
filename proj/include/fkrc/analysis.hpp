#pragma once

// Estimators turning samples into decay rates, exponents, tails and profile
// statistics. Everything here is a pure function of its inputs.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fkrc/error.hpp"
#include "fkrc/fk.hpp"

namespace fkrc {

inline constexpr double kZ95 = 1.959963984540054;

struct EstimateWithCI {
  double value = 0, lo = 0, hi = 0;
  std::size_t n = 0;
  std::string method;

  double half_width() const { return 0.5 * (hi - lo); }
  double se() const { return half_width() / kZ95; }
  bool covers(double v) const { return lo <= v && v <= hi; }
  bool overlaps(const EstimateWithCI& o) const { return lo <= o.hi && o.lo <= hi; }
};

inline EstimateWithCI normal_ci(double value, double se, std::size_t n, std::string method) {
  return {value, value - kZ95 * se, value + kZ95 * se, n, std::move(method)};
}

/// Wilson score interval for k successes out of n.
inline EstimateWithCI wilson(std::size_t k, std::size_t n, double z = kZ95) {
  require(n > 0 && k <= n, ErrorCode::InvalidArgument, "need 0 <= k <= n and n > 0");
  const double nn = static_cast<double>(n), ph = static_cast<double>(k) / nn, z2 = z * z;
  const double centre = (ph + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z / (1 + z2 / nn) * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn));
  return {ph, std::max(0.0, centre - half), std::min(1.0, centre + half), n, "wilson"};
}

struct MeanVar {
  double mean = 0, var = 0;  ///< var is the sample variance
  std::size_t n = 0;
  double se() const { return n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0; }
};

inline MeanVar mean_var(const std::vector<double>& xs) {
  MeanVar m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double s = 0;
    for (double x : xs) s += (x - m.mean) * (x - m.mean);
    m.var = s / static_cast<double>(xs.size() - 1);
  }
  return m;
}

/// Batch means of a scalar series: the mean and the variance of that mean.
inline MeanVar batch_means(const std::vector<double>& xs, std::size_t batches) {
  require(batches >= 2 && xs.size() >= batches, ErrorCode::InvalidArgument, "need at least one sample per batch");
  const std::size_t len = xs.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b)
    means[b] = std::accumulate(xs.begin() + static_cast<std::ptrdiff_t>(b * len),
                               xs.begin() + static_cast<std::ptrdiff_t>((b + 1) * len), 0.0) /
               static_cast<double>(len);
  const auto m = mean_var(means);
  return {m.mean, m.var / static_cast<double>(batches), xs.size()};
}

/// P(x <-> y) per pair, with Wilson intervals.
inline std::vector<EstimateWithCI> estimate_connectivity(const std::vector<BondConfiguration>& samples,
                                                         const std::vector<std::pair<Site, Site>>& pairs) {
  require(samples.size() >= 100, ErrorCode::InvalidArgument, "need at least 100 samples");
  const auto& g = *samples.front().graph;
  ConnectivityProbe probe(g);
  std::vector<EstimateWithCI> out;
  for (const auto& [a, b] : pairs) {
    require(g.box().contains(a) && g.box().contains(b), ErrorCode::InvalidArgument, "pair outside the box");
    const auto u = static_cast<std::uint32_t>(g.box().index(a)), v = static_cast<std::uint32_t>(g.box().index(b));
    std::size_t k = 0;
    for (const auto& w : samples) k += probe.joined(u, v, std::numeric_limits<std::size_t>::max(), w.open, w.wired());
    out.push_back(wilson(k, samples.size()));
  }
  return out;
}

/// Probabilities P_k at scales k, with the covariance of log P_k. An empty
/// covariance means independent points whose spread is read off the CIs.
struct DecaySeries {
  std::string label;
  std::vector<double> scales;
  std::vector<EstimateWithCI> p;
  Eigen::MatrixXd log_cov;

  std::size_t size() const { return scales.size(); }
  void check() const {
    require(scales.size() == p.size(), ErrorCode::InvalidArgument, "one estimate per scale");
    for (std::size_t i = 1; i < scales.size(); ++i)
      require(scales[i] > scales[i - 1], ErrorCode::InvalidArgument, "scales must increase");
  }
};

struct GlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;
  double chi2 = 0;
  std::size_t dof = 0;
};

/// Generalized least squares y = X b with Cov(y) = sigma. When sigma is empty
/// (or identically zero) this is ordinary least squares with the residual
/// variance as noise estimate.
inline GlsFit gls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::MatrixXd& sigma) {
  const auto n = x.rows(), k = x.cols();
  require(n > k, ErrorCode::InvalidArgument, "need more points than parameters");
  GlsFit f;
  f.dof = static_cast<std::size_t>(n - k);
  if (sigma.size() == 0 || sigma.cwiseAbs().maxCoeff() == 0) {
    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    f.beta = ldlt.solve(x.transpose() * y);
    const Eigen::VectorXd r = y - x * f.beta;
    f.chi2 = r.squaredNorm();
    f.cov = f.chi2 / static_cast<double>(f.dof) * ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    return f;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, ErrorCode::IllConditioned, "covariance is not positive definite");
  const Eigen::MatrixXd wx = llt.matrixL().solve(x);
  const Eigen::VectorXd wy = llt.matrixL().solve(y);
  const Eigen::MatrixXd a = wx.transpose() * wx;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  f.beta = ldlt.solve(wx.transpose() * wy);
  f.cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  f.chi2 = (wy - wx * f.beta).squaredNorm();
  return f;
}

namespace detail {

// Usable points (P > 0) as log values with their covariance.
inline std::pair<std::vector<std::size_t>, Eigen::MatrixXd> log_points(const DecaySeries& s, Eigen::VectorXd& y) {
  s.check();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.p[i].value > 0) idx.push_back(i);
  const auto m = static_cast<Eigen::Index>(idx.size());
  y.resize(m);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& e = s.p[idx[static_cast<std::size_t>(a)]];
    y(a) = std::log(e.value);
    if (s.log_cov.size() == 0) {
      const double lo = std::log(std::max(e.lo, e.value * 1e-300)), hi = std::log(std::max(e.hi, e.value));
      const double sd = (hi - lo) / (2 * kZ95);
      cov(a, a) = sd * sd;
    } else {
      for (Eigen::Index b = 0; b < m; ++b)
        cov(a, b) = s.log_cov(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                              static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]));
    }
  }
  // exact points mixed with noisy ones get a tiny floor so the weights exist
  if (cov.diagonal().maxCoeff() > 0)
    for (Eigen::Index a = 0; a < m; ++a) cov(a, a) = std::max(cov(a, a), 1e-24);
  return {idx, cov};
}

}  // namespace detail

struct XiFit {
  EstimateWithCI xi;
  double log_prefactor = 0;
  std::vector<double> naive;  ///< -log P_k / k
  double chi2 = 0;
  std::size_t dof = 0;
};

/// log P_k = c - xi k - ((d - 1) / 2) log k, fitted by GLS.
inline XiFit fit_inverse_correlation_length(const DecaySeries& s, int d) {
  Eigen::VectorXd y;
  auto [idx, cov] = detail::log_points(s, y);
  require(idx.size() >= 4, ErrorCode::InsufficientDecades, "need at least 4 scales with nonzero estimates");
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd x(m, 2);
  XiFit out;
  for (Eigen::Index a = 0; a < m; ++a) {
    const double k = s.scales[idx[static_cast<std::size_t>(a)]];
    x(a, 0) = 1.0;
    x(a, 1) = -k;
    out.naive.push_back(-y(a) / k);
    y(a) += 0.5 * (d - 1) * std::log(k);
  }
  const auto f = gls(x, y, cov);
  out.xi = normal_ci(f.beta(1), std::sqrt(std::max(0.0, f.cov(1, 1))), idx.size(), "gls-oz-fixed");
  out.log_prefactor = f.beta(0);
  out.chi2 = f.chi2;
  out.dof = f.dof;
  return out;
}

struct OzFit {
  EstimateWithCI xi, alpha, log_psi;
  double expected_alpha = 0;
  bool covers_expected = false;
  double chi2 = 0;
  std::size_t dof = 0;
};

/// log P_k = log Psi - xi k - alpha log k with alpha free.
inline OzFit oz_exponent_fit(const DecaySeries& s, int d) {
  Eigen::VectorXd y;
  auto [idx, cov] = detail::log_points(s, y);
  require(idx.size() >= 6, ErrorCode::InsufficientDecades, "need at least 6 scales with nonzero estimates");
  const double span = s.scales[idx.back()] / s.scales[idx.front()];
  require(span >= 4.0, ErrorCode::IllConditioned, "scales must span a factor of at least 4");
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd x(m, 3);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double k = s.scales[idx[static_cast<std::size_t>(a)]];
    x(a, 0) = 1.0;
    x(a, 1) = -k;
    x(a, 2) = -std::log(k);
  }
  const auto f = gls(x, y, cov);
  OzFit out;
  auto ci = [&](int i, const char* tag) {
    return normal_ci(f.beta(i), std::sqrt(std::max(0.0, f.cov(i, i))), idx.size(), tag);
  };
  out.log_psi = ci(0, "gls-oz");
  out.xi = ci(1, "gls-oz");
  out.alpha = ci(2, "gls-oz");
  out.expected_alpha = 0.5 * (d - 1);
  // an exact series gives a zero-width interval; allow rounding
  out.covers_expected = std::abs(out.alpha.value - out.expected_alpha) <= out.alpha.half_width() + 1e-9;
  out.chi2 = f.chi2;
  out.dof = f.dof;
  return out;
}

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
  EstimateWithCI slope_ci;
};

/// Ordinary least squares y = a + b x with R^2 and a normal CI on b.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& weights = {}) {
  require(x.size() == y.size() && x.size() >= 3, ErrorCode::InvalidArgument, "need at least 3 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  Eigen::MatrixXd sigma;
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  if (!weights.empty()) {
    sigma = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) sigma(i, i) = 1.0 / weights[static_cast<std::size_t>(i)];
  }
  const auto f = gls(a, b, sigma);
  LinearFit out;
  out.intercept = f.beta(0);
  out.slope = f.beta(1);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (b - a * f.beta).squaredNorm();
  out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.slope_ci = normal_ci(out.slope, std::sqrt(std::max(0.0, f.cov(1, 1))), x.size(), "ols");
  return out;
}

struct CsvRow {
  std::string quantity;
  double scale = 0;
  EstimateWithCI estimate;
};

inline void write_estimates_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << "quantity,scale,estimate,lo,hi,n\n";
  for (const auto& r : rows)
    os << r.quantity << ',' << format_double(r.scale) << ',' << format_double(r.estimate.value) << ','
       << format_double(r.estimate.lo) << ',' << format_double(r.estimate.hi) << ',' << r.estimate.n << '\n';
}

}  // namespace fkrc
