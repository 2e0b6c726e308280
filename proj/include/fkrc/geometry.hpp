#pragma once

// Directional norms and the convex bodies they induce: the equi-decay set
// U = {xi <= 1}, its polar K (the Wulff shape), dual vectors, surcharge,
// cones and boundary curvature.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <memory>
#include <numbers>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "fkrc/error.hpp"
#include "fkrc/lattice.hpp"

namespace fkrc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_angle(double theta) {
  theta = std::fmod(theta, kTwoPi);
  return theta < 0 ? theta + kTwoPi : theta;
}

struct Vec {
  std::array<double, kMaxDim> c{};
  int dim = 0;

  Vec() = default;
  Vec(std::initializer_list<double> xs) : dim(static_cast<int>(xs.size())) {
    require(xs.size() <= kMaxDim, ErrorCode::InvalidArgument, "dimension too large");
    std::copy(xs.begin(), xs.end(), c.begin());
  }
  explicit Vec(const Site& s) : dim(s.dim) {
    for (int i = 0; i < dim; ++i) c[i] = s[i];
  }
  static Vec zero(int d) {
    Vec v;
    v.dim = d;
    return v;
  }
  static Vec unit(int d, int axis, double sign = 1.0) {
    Vec v = zero(d);
    v.c[axis] = sign;
    return v;
  }
  static Vec polar(double theta) { return {std::cos(theta), std::sin(theta)}; }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend Vec operator+(Vec a, const Vec& b) {
    for (int i = 0; i < a.dim; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend Vec operator-(Vec a, const Vec& b) {
    for (int i = 0; i < a.dim; ++i) a.c[i] -= b.c[i];
    return a;
  }
  friend Vec operator-(Vec a) {
    for (int i = 0; i < a.dim; ++i) a.c[i] = -a.c[i];
    return a;
  }
  friend Vec operator*(double s, Vec a) {
    for (int i = 0; i < a.dim; ++i) a.c[i] *= s;
    return a;
  }
  friend Vec operator*(Vec a, double s) { return s * a; }
  friend Vec operator/(Vec a, double s) { return (1.0 / s) * a; }

  double dot(const Vec& b) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += c[i] * b.c[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool is_zero() const { return dot(*this) == 0.0; }
  double angle() const { return wrap_angle(std::atan2(c[1], c[0])); }

  friend std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << '(';
    for (int i = 0; i < v.dim; ++i) os << (i ? "," : "") << v.c[i];
    return os << ')';
  }
};

inline double dot(const Vec& a, const Vec& b) { return a.dot(b); }

/// A positively homogeneous, symmetric norm on R^d.
class DirectionalNorm {
 public:
  enum class Kind { euclidean, l1, quadratic, tabulated };

  static DirectionalNorm euclidean(int d, double scale = 1.0) {
    require(scale > 0, ErrorCode::DegenerateNorm, "scale must be positive");
    DirectionalNorm n(Kind::euclidean, d);
    n.scale_ = scale;
    return n;
  }

  /// scale * sum |v_i|.
  static DirectionalNorm l1(int d, double scale = 1.0) {
    require(scale > 0, ErrorCode::DegenerateNorm, "scale must be positive");
    DirectionalNorm n(Kind::l1, d);
    n.scale_ = scale;
    return n;
  }

  /// sqrt(v^T A v) for symmetric positive definite A.
  static DirectionalNorm quadratic(const Eigen::MatrixXd& a) {
    require(a.rows() == a.cols() && a.rows() >= 1 && a.rows() <= kMaxDim, ErrorCode::InvalidArgument,
            "A must be square, dimension 1..4");
    require((a - a.transpose()).norm() <= 1e-12 * a.norm(), ErrorCode::InvalidArgument, "A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    require(es.eigenvalues().minCoeff() > 0, ErrorCode::DegenerateNorm, "A must be positive definite");
    DirectionalNorm n(Kind::quadratic, static_cast<int>(a.rows()));
    n.a_ = a;
    return n;
  }

  /// d = 2 norm given by its values on unit vectors at the (sorted, distinct,
  /// [0, 2pi)) angles; linear in angle in between. rel_tol is the relative
  /// uncertainty of the values and becomes the tolerance of every check.
  static DirectionalNorm tabulated(std::vector<double> angles, std::vector<double> values, double rel_tol = 0.0) {
    require(angles.size() == values.size() && angles.size() >= 3, ErrorCode::InvalidArgument,
            "need >= 3 matching angles and values");
    for (std::size_t i = 0; i < angles.size(); ++i) {
      require(angles[i] >= 0 && angles[i] < kTwoPi, ErrorCode::InvalidArgument, "angles must lie in [0, 2pi)");
      require(i == 0 || angles[i] > angles[i - 1], ErrorCode::InvalidArgument, "angles must be increasing");
      require(values[i] > 0 && std::isfinite(values[i]), ErrorCode::DegenerateNorm, "tabulated values must be > 0");
    }
    DirectionalNorm n(Kind::tabulated, 2);
    n.angles_ = std::move(angles);
    n.values_ = std::move(values);
    n.rel_tol_ = rel_tol;
    return n;
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double scale() const { return scale_; }
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& values() const { return values_; }

  /// Relative tolerance for identities involving this norm.
  double tolerance() const { return kind_ == Kind::tabulated ? std::max(rel_tol_, 1e-9) : 1e-6; }

  double operator()(const Vec& v) const {
    switch (kind_) {
      case Kind::euclidean: return scale_ * v.norm();
      case Kind::l1: {
        double s = 0;
        for (int i = 0; i < v.dim; ++i) s += std::abs(v[i]);
        return scale_ * s;
      }
      case Kind::quadratic: {
        double s = 0;
        for (int i = 0; i < dim_; ++i)
          for (int j = 0; j < dim_; ++j) s += v[i] * a_(i, j) * v[j];
        return std::sqrt(std::max(s, 0.0));
      }
      case Kind::tabulated: {
        const double r = v.norm();
        return r == 0 ? 0.0 : r * at_angle(v.angle());
      }
    }
    return 0;
  }
  double operator()(const Site& s) const { return (*this)(Vec(s)); }

  /// xi(cos theta, sin theta); d = 2.
  double at_angle(double theta) const {
    if (kind_ != Kind::tabulated) return (*this)(Vec::polar(theta));
    auto [k, frac] = locate(theta);
    const std::size_t k1 = (k + 1) % values_.size();
    return values_[k] + frac * (values_[k1] - values_[k]);
  }

  /// Gradient of xi at x where xi is differentiable; at a kink, the centroid
  /// of the subdifferential (the maximizing face of K).
  Vec dual_vector(const Vec& x) const {
    require(!x.is_zero(), ErrorCode::ZeroVector, "dual_vector needs x != 0");
    switch (kind_) {
      case Kind::euclidean: return scale_ * x / x.norm();
      case Kind::l1: {
        Vec t = Vec::zero(x.dim);
        for (int i = 0; i < x.dim; ++i) t[i] = x[i] > 0 ? scale_ : x[i] < 0 ? -scale_ : 0.0;
        return t;
      }
      case Kind::quadratic: {
        Vec t = Vec::zero(dim_);
        for (int i = 0; i < dim_; ++i)
          for (int j = 0; j < dim_; ++j) t[i] += a_(i, j) * x[j];
        return t / (*this)(x);
      }
      case Kind::tabulated: {
        const double theta = x.angle();
        auto [left, right] = angular_derivatives(theta);
        const double h = at_angle(theta);
        const double slope = 0.5 * (left + right);
        return Vec{h * std::cos(theta) - slope * std::sin(theta), h * std::sin(theta) + slope * std::cos(theta)};
      }
    }
    return x;
  }

  /// One-sided derivatives of theta -> at_angle(theta); tabulated norms only.
  std::pair<double, double> angular_derivatives(double theta) const {
    require(kind_ == Kind::tabulated, ErrorCode::InvalidArgument, "angular_derivatives is for tabulated norms");
    const std::size_t m = angles_.size();
    auto slope = [&](std::size_t k) {
      const std::size_t k1 = (k + 1) % m;
      double span = angles_[k1] - angles_[k];
      if (span <= 0) span += kTwoPi;
      return (values_[k1] - values_[k]) / span;
    };
    auto [k, frac] = locate(theta);
    if (frac < 1e-12) return {slope((k + m - 1) % m), slope(k)};  // on a node
    return {slope(k), slope(k)};
  }

  /// xi(v) = xi(-v) on the nodes of a tabulated norm.
  bool symmetric(double rel_tol) const {
    if (kind_ != Kind::tabulated) return true;
    for (std::size_t k = 0; k < angles_.size(); ++k)
      if (std::abs(at_angle(angles_[k] + std::numbers::pi) - values_[k]) > rel_tol * values_[k]) return false;
    return true;
  }

 private:
  DirectionalNorm(Kind k, int d) : kind_(k), dim_(d) {
    require(d >= 1 && d <= kMaxDim, ErrorCode::InvalidArgument, "dimension must be 1..4");
  }

  // Segment index k and fraction in [0, 1) of theta between node k and k+1.
  std::pair<std::size_t, double> locate(double theta) const {
    theta = wrap_angle(theta);
    const std::size_t m = angles_.size();
    auto it = std::upper_bound(angles_.begin(), angles_.end(), theta);
    std::size_t k = it == angles_.begin() ? m - 1 : static_cast<std::size_t>(it - angles_.begin()) - 1;
    const std::size_t k1 = (k + 1) % m;
    double span = angles_[k1] - angles_[k];
    double off = theta - angles_[k];
    if (span <= 0) span += kTwoPi;
    if (off < 0) off += kTwoPi;
    double frac = off / span;
    if (std::abs(off) < 1e-13) frac = 0.0;
    return {k, frac};
  }

  Kind kind_;
  int dim_;
  double scale_ = 1.0;
  Eigen::MatrixXd a_;
  std::vector<double> angles_, values_;
  double rel_tol_ = 0.0;
};

/// d = 2: an ordered counter-clockwise boundary polygon. d >= 3: boundary
/// points and support-function samples over unit directions. When
/// `support` is set it is the exact support function of the body.
struct ConvexBody {
  int dim = 2;
  std::vector<Vec> vertices;
  std::vector<Vec> directions;
  std::vector<double> support_values;
  std::shared_ptr<const DirectionalNorm> support;

  /// h(n) = max over the body of (t, n).
  double support_at(const Vec& n) const {
    if (support) return (*support)(n);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) best = std::max(best, v.dot(n));
    return best;
  }

  /// Largest violation of the one-sign cross product test (d = 2), relative
  /// to the body's size; <= 0 means convex.
  double convexity_defect() const {
    double scale = 0, worst = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) scale = std::max(scale, v.norm());
    const std::size_t m = vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec& a = vertices[i];
      const Vec& b = vertices[(i + 1) % m];
      const Vec& c = vertices[(i + 2) % m];
      const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
      worst = std::max(worst, -cross / (scale * scale));
    }
    return worst;
  }

  bool contains(const Vec& t, double tol = 1e-12) const {
    if (dim == 2 && !support) {
      const std::size_t m = vertices.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Vec& a = vertices[i];
        const Vec& b = vertices[(i + 1) % m];
        if ((b[0] - a[0]) * (t[1] - a[1]) - (b[1] - a[1]) * (t[0] - a[0]) < -tol) return false;
      }
      return true;
    }
    for (std::size_t i = 0; i < directions.size(); ++i)
      if (t.dot(directions[i]) > support_values[i] + tol) return false;
    return true;
  }
};

inline std::vector<Vec> unit_directions(int d, std::size_t resolution) {
  std::vector<Vec> out;
  out.reserve(resolution);
  if (d == 2) {
    for (std::size_t k = 0; k < resolution; ++k) out.push_back(Vec::polar(kTwoPi * k / resolution));
    return out;
  }
  require(d == 3, ErrorCode::InvalidArgument, "direction grids exist for d = 2, 3");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));  // Fibonacci sphere
  for (std::size_t k = 0; k < resolution; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / resolution;
    const double r = std::sqrt(1.0 - z * z);
    out.push_back(Vec{r * std::cos(golden * k), r * std::sin(golden * k), z});
  }
  return out;
}

inline void check_positive(const DirectionalNorm& xi, const std::vector<Vec>& dirs) {
  for (const auto& n : dirs) {
    const double v = xi(n);
    require(v > 0 && std::isfinite(v), ErrorCode::DegenerateNorm, "xi is not positive on a unit direction");
  }
}

/// U = {x : xi(x) <= 1}: boundary points v / xi(v) over the direction grid.
/// A tabulated norm whose unit ball comes out non-convex beyond its
/// tolerance raises NonConvex.
inline ConvexBody equi_decay_set(const DirectionalNorm& xi, std::size_t resolution) {
  require(resolution >= 8, ErrorCode::InvalidArgument, "resolution must be >= 8");
  ConvexBody body;
  body.dim = xi.dim();
  const auto dirs = unit_directions(xi.dim(), resolution);
  check_positive(xi, dirs);
  for (const auto& n : dirs) body.vertices.push_back(n / xi(n));
  if (body.dim == 2) {
    const double defect = body.convexity_defect();
    require(defect <= xi.tolerance(), ErrorCode::NonConvex,
            "unit ball of xi is not convex (defect " + std::to_string(defect) + ")");
  }
  return body;
}

namespace detail {

// Keeps the part of a CCW polygon with (t, n) <= h.
inline std::vector<Vec> clip(const std::vector<Vec>& poly, const Vec& n, double h) {
  std::vector<Vec> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % m];
    const double fa = a.dot(n) - h, fb = b.dot(n) - h;
    if (fa <= 0) out.push_back(a);
    if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) out.push_back(a + (fa / (fa - fb)) * (b - a));
  }
  return out;
}

// Drops consecutive vertices closer than eps.
inline std::vector<Vec> dedupe(const std::vector<Vec>& poly, double eps) {
  std::vector<Vec> out;
  for (const auto& v : poly)
    if (out.empty() || (v - out.back()).norm() > eps) out.push_back(v);
  while (out.size() > 1 && (out.front() - out.back()).norm() <= eps) out.pop_back();
  return out;
}

}  // namespace detail

/// K = intersection over grid directions n of {t : (t, n) <= xi(n)}.
inline ConvexBody wulff_shape(const DirectionalNorm& xi, std::size_t resolution) {
  require(resolution >= 8, ErrorCode::InvalidArgument, "resolution must be >= 8");
  const int d = xi.dim();
  auto dirs = unit_directions(d, resolution);
  check_positive(xi, dirs);
  ConvexBody body;
  body.dim = d;
  body.support = std::make_shared<const DirectionalNorm>(xi);
  if (d == 2 && xi.kind() == DirectionalNorm::Kind::tabulated)
    for (double a : xi.angles()) dirs.push_back(Vec::polar(a));  // resolve the kinks exactly
  for (const auto& n : dirs) {
    body.directions.push_back(n);
    body.support_values.push_back(xi(n));
  }
  if (d != 2) return body;
  double big = 0;
  for (double h : body.support_values) big = std::max(big, h);
  big *= 4.0;
  std::vector<Vec> poly{{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  // clip in angular order so the result stays well conditioned
  std::vector<std::size_t> order(dirs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dirs[a].angle() < dirs[b].angle(); });
  for (auto i : order) poly = detail::clip(poly, dirs[i], body.support_values[i]);
  body.vertices = detail::dedupe(poly, 1e-13 * big);
  return body;
}

/// Tabulated d = 2 norm from xi at a few directions, extended to every image
/// under the symmetries of Z^2 (reflections in the axes and the diagonal).
/// Each sample is (direction, xi of the unit vector along it).
inline DirectionalNorm symmetric_tabulated_norm(const std::vector<std::pair<Vec, double>>& samples,
                                                double rel_tol = 0.0) {
  std::vector<std::pair<double, double>> nodes;
  for (const auto& [v, value] : samples) {
    require(v.dim == 2 && !v.is_zero(), ErrorCode::InvalidArgument, "directions must be nonzero 2-vectors");
    for (int swap = 0; swap < 2; ++swap)
      for (int sx : {-1, 1})
        for (int sy : {-1, 1}) {
          const double a = sx * (swap ? v[1] : v[0]), b = sy * (swap ? v[0] : v[1]);
          nodes.emplace_back(wrap_angle(std::atan2(b, a)), value);
        }
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> angles, values;
  for (const auto& [a, v] : nodes) {
    if (!angles.empty() && a - angles.back() < 1e-12) {
      require(std::abs(values.back() - v) <= 1e-12 * v, ErrorCode::InvalidArgument,
              "symmetric directions carry different values");
      continue;
    }
    angles.push_back(a);
    values.push_back(v);
  }
  if (angles.size() > 1 && kTwoPi - angles.back() + angles.front() < 1e-12) {
    angles.pop_back();
    values.pop_back();
  }
  return DirectionalNorm::tabulated(std::move(angles), std::move(values), rel_tol);
}

/// Polar body {x : h_K(x) <= 1}, sampled on the direction grid.
inline ConvexBody polar(const ConvexBody& k, std::size_t resolution) {
  ConvexBody out;
  out.dim = k.dim;
  for (const auto& n : unit_directions(k.dim, resolution)) {
    const double h = k.support_at(n);
    require(h > 0, ErrorCode::DegenerateNorm, "origin must be interior to the body");
    out.vertices.push_back(n / h);
  }
  return out;
}

/// Worst deviation from 1 of max_{t in K} (t, x) over boundary points x of U,
/// and of max_{x in U} (t, x) over boundary points t of K.
inline double polarity_defect(const ConvexBody& u, const ConvexBody& k) {
  double worst = 0;
  ConvexBody u_poly = u;
  u_poly.support.reset();
  ConvexBody k_poly = k;
  k_poly.support.reset();
  for (const auto& x : u.vertices) worst = std::max(worst, std::abs(k_poly.support_at(x) - 1.0));
  for (const auto& t : k.vertices) worst = std::max(worst, std::abs(u_poly.support_at(t) - 1.0));
  return worst;
}

/// Dual vector of x: the maximizer of (t, x) over K, with (t, x) = xi(x).
inline Vec dual_vector(const Vec& x, const DirectionalNorm& xi) { return xi.dual_vector(x); }

/// As above, with the maximizing face taken over the polygon of K. Ties are
/// resolved by the centroid of the maximizing face.
inline Vec dual_vector(const Vec& x, const DirectionalNorm& xi, const ConvexBody& k) {
  if (k.support || k.dim != 2) return xi.dual_vector(x);
  require(!x.is_zero(), ErrorCode::ZeroVector, "dual_vector needs x != 0");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : k.vertices) best = std::max(best, v.dot(x));
  const double tol = xi.tolerance() * std::abs(best);
  Vec sum = Vec::zero(2);
  int count = 0;
  for (const auto& v : k.vertices)
    if (v.dot(x) >= best - tol) {
      sum = sum + v;
      ++count;
    }
  return sum / count;
}

/// s_t(y) = xi(y) - (t, y), clamped at 0.
inline double surcharge(const Vec& t, const Vec& y, const DirectionalNorm& xi) {
  return std::max(0.0, xi(y) - t.dot(y));
}

/// y in the forward cone {s_t(y) < delta xi(y)}.
inline bool in_forward_cone(const Vec& y, const Vec& t, double delta, const DirectionalNorm& xi) {
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  const double x = xi(y);
  return x - t.dot(y) < delta * x;  // strict, so y = 0 is excluded
}

inline bool in_backward_cone(const Vec& y, const Vec& t, double delta, const DirectionalNorm& xi) {
  return in_forward_cone(-y, t, delta, xi);
}

/// Range of delta for which some +-e_i lies inside the open cone Y_{3 delta}(t)
/// for every sampled t, with 3 delta < 1.
struct DeltaRange {
  double lo = 0;  ///< exclusive
  double hi = 1.0 / 3.0;
  bool admits(double delta) const { return delta > lo && delta < hi; }
};

inline DeltaRange admissible_delta(const DirectionalNorm& xi, const std::vector<Vec>& ts) {
  DeltaRange r;
  for (const auto& t : ts) {
    double need = std::numeric_limits<double>::infinity();
    for (int i = 0; i < xi.dim(); ++i)
      for (double sign : {1.0, -1.0}) {
        const Vec e = Vec::unit(xi.dim(), i, sign);
        need = std::min(need, surcharge(t, e, xi) / (3.0 * xi(e)));
      }
    r.lo = std::max(r.lo, need);
  }
  return r;
}

struct Curvature {
  std::vector<double> values;  ///< d = 2: one entry; d = 3: principal curvatures
  double normal_angle = 0;     ///< d = 2 only
  bool positive = false;
  double value() const { return values.front(); }
};

namespace detail {

// d = 2: the outward normal angle at boundary point t, i.e. the minimizer of
// h(theta) - (t, u(theta)) >= 0; also returns that minimum.
template <class H>
std::pair<double, double> normal_at(const Vec& t, H&& h) {
  const int grid = 2048;
  double best = std::numeric_limits<double>::infinity(), arg = 0;
  for (int k = 0; k < grid; ++k) {
    const double th = kTwoPi * k / grid;
    const double g = h(th) - t.dot(Vec::polar(th));
    if (g < best) best = g, arg = th;
  }
  double a = arg - kTwoPi / grid, b = arg + kTwoPi / grid;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double th) { return h(th) - t.dot(Vec::polar(th)); };
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 100; ++it) {
    if (gc < gd) b = d, d = c, gd = gc, c = b - phi * (b - a), gc = g(c);
    else a = c, c = d, gc = gd, d = a + phi * (b - a), gd = g(d);
  }
  const double th = 0.5 * (a + b);
  return {wrap_angle(th), g(th)};
}

// Least-squares quartic through samples (dtheta, h); returns h + h'' at 0.
inline double radius_from_samples(const std::vector<std::pair<double, double>>& s) {
  Eigen::MatrixXd a(s.size(), 5);
  Eigen::VectorXd b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double p = 1;
    for (int j = 0; j < 5; ++j, p *= s[i].first) a(i, j) = p;
    b(i) = s[i].second;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return c(0) + 2 * c(2);
}

inline Curvature finish(std::vector<double> radii, double tol) {
  Curvature out;
  out.positive = true;
  for (double r : radii) {
    const double k = r <= 0 ? std::numeric_limits<double>::infinity() : 1.0 / r;
    out.values.push_back(k);
    out.positive = out.positive && k > tol;
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kMinCurvaturePoints = 5;

/// Curvature of the boundary of K at boundary point t, from the support
/// function h: radius of curvature h + h'' at the normal (d = 2), or the
/// eigenvalues of the tangential Hessian of h (d = 3). Analytic supports use
/// a central stencil; tabulated supports fit a quartic to the table nodes
/// within `window` radians of the normal and need at least 5 of them.
inline Curvature boundary_curvature(const ConvexBody& k, const Vec& t, double window = std::numbers::pi / 4) {
  const double tol_rel = k.support ? k.support->tolerance() : 1e-6;
  if (k.dim == 2) {
    auto h = [&](double th) { return k.support_at(Vec::polar(th)); };
    auto [theta, gap] = detail::normal_at(t, h);
    const bool tabulated = k.support && k.support->kind() == DirectionalNorm::Kind::tabulated;
    double radius;
    if (k.support && !tabulated) {
      const double eps = 2e-4;
      radius = h(theta) + (h(theta + eps) - 2 * h(theta) + h(theta - eps)) / (eps * eps);
    } else {
      std::vector<std::pair<double, double>> samples;
      if (tabulated) {
        const auto& angs = k.support->angles();
        const auto& vals = k.support->values();
        for (std::size_t i = 0; i < angs.size(); ++i) {
          double dth = wrap_angle(angs[i] - theta + std::numbers::pi) - std::numbers::pi;
          if (std::abs(dth) <= window) samples.emplace_back(dth, vals[i]);
        }
      } else {
        for (const auto& v : k.vertices) {
          double dth = wrap_angle(v.angle() - theta + std::numbers::pi) - std::numbers::pi;
          if (std::abs(dth) <= window) samples.emplace_back(dth, h(theta + dth));
        }
      }
      require(samples.size() >= kMinCurvaturePoints, ErrorCode::InsufficientResolution,
              "only " + std::to_string(samples.size()) + " boundary points within the curvature window");
      radius = detail::radius_from_samples(samples);
    }
    require(std::abs(gap) <= std::max(1e-6, tol_rel) * std::max(1.0, t.norm()) * 10, ErrorCode::InvalidArgument,
            "t is not on the boundary of K");
    auto out = detail::finish({radius}, 1e-9);
    out.normal_angle = theta;
    return out;
  }
  require(k.dim == 3 && k.support && k.support->kind() != DirectionalNorm::Kind::tabulated,
          ErrorCode::InsufficientResolution, "d >= 3 curvature needs an analytic support function");
  const DirectionalNorm& xi = *k.support;
  // normal: minimize h(n) - (t, n) on the sphere by projected gradient
  Vec n = t / t.norm();
  for (int it = 0; it < 500; ++it) {
    Vec grad = xi.dual_vector(n) - t;
    grad = grad - grad.dot(n) * n;
    if (grad.norm() < 1e-13) break;
    n = n - 0.5 * grad / std::max(1.0, xi(n));
    n = n / n.norm();
  }
  require(std::abs(xi(n) - t.dot(n)) <= 1e-6 * xi(n), ErrorCode::InvalidArgument, "t is not on the boundary of K");
  Vec e1 = std::abs(n[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
  e1 = e1 - e1.dot(n) * n;
  e1 = e1 / e1.norm();
  const Vec e2{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]};
  const double eps = 2e-4;
  auto hs = [&](double a, double b) { return xi(n + a * e1 + b * e2); };
  const double h0 = hs(0, 0);
  Eigen::Matrix2d hess;
  hess(0, 0) = (hs(eps, 0) - 2 * h0 + hs(-eps, 0)) / (eps * eps);
  hess(1, 1) = (hs(0, eps) - 2 * h0 + hs(0, -eps)) / (eps * eps);
  hess(0, 1) = hess(1, 0) = (hs(eps, eps) - hs(eps, -eps) - hs(-eps, eps) + hs(-eps, -eps)) / (4 * eps * eps);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
  return detail::finish({es.eigenvalues()(1), es.eigenvalues()(0)}, 1e-9);
}

/// Boundary CSV with header `theta,x,y` (d = 2).
inline void write_body_csv(std::ostream& os, const ConvexBody& body) {
  require(body.dim == 2, ErrorCode::InvalidArgument, "CSV export is for d = 2 bodies");
  os << "theta,x,y\n";
  char buf[128];
  for (const auto& v : body.vertices) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", v.angle(), v[0], v[1]);
    os << buf;
  }
}

}  // namespace fkrc
