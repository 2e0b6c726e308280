#pragma once

// Cone points of a finite point set: v is a cone point when every other point
// lies in v + (forward cone) or v + (backward cone).

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "fkrc/geometry.hpp"

namespace fkrc {

inline bool in_double_cone(const Vec& w, const Vec& t, double delta, const DirectionalNorm& xi) {
  const double x = xi(w);
  return x - std::abs(t.dot(w)) < delta * x;
}

/// O(n^2) reference implementation. Indices come back in increasing (t, .) order.
inline std::vector<std::size_t> cone_points_bruteforce(const std::vector<Vec>& pts, const Vec& t, double delta,
                                                       const DirectionalNorm& xi) {
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < pts.size() && ok; ++j)
      if (j != i) ok = in_double_cone(pts[j] - pts[i], t, delta, xi);
    if (ok) out.push_back(i);
  }
  std::stable_sort(out.begin(), out.end(), [&](auto a, auto b) { return t.dot(pts[a]) < t.dot(pts[b]); });
  return out;
}

/// Same result as the brute-force version. Points are scanned outward in
/// (t, .) order. Write w = l a + u with a = x / (t, x), so (t, w) = l and
/// xi(w) <= |l| xi(a) + xi(u). Once |l| exceeds the reach below, w lies in the
/// double cone whatever its transverse part u. Needs (t, x) > 0.
inline std::vector<std::size_t> cone_points(const std::vector<Vec>& pts, const Vec& x, const Vec& t, double delta,
                                            const DirectionalNorm& xi) {
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  require(t.dot(x) > 0, ErrorCode::InvalidArgument, "x must satisfy (t, x) > 0");
  const std::size_t n = pts.size();
  if (n == 0) return {};
  const Vec a = x / t.dot(x);
  std::vector<double> level(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n; ++i) level[i] = t.dot(pts[i]);
  std::stable_sort(order.begin(), order.end(), [&](auto p, auto q) { return level[p] < level[q]; });
  Vec centre = Vec::zero(pts[0].dim);
  for (const auto& p : pts) centre = centre + (p - t.dot(p) * a);
  centre = centre / static_cast<double>(n);
  double spread = 0;
  for (const auto& p : pts) spread = std::max(spread, xi(p - t.dot(p) * a - centre));
  const double slack = 1.0 - (1.0 - delta) * xi(a);
  const double reach = slack > 1e-12 ? (1.0 - delta) * 2.0 * spread / slack * (1.0 + 1e-9) + 1e-9
                                     : std::numeric_limits<double>::infinity();
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    bool ok = true;
    for (std::size_t m = k + 1; m < n && ok; ++m) {
      if (level[order[m]] - level[i] > reach) break;
      ok = in_double_cone(pts[order[m]] - pts[i], t, delta, xi);
    }
    for (std::size_t m = k; m-- > 0 && ok;) {
      if (level[i] - level[order[m]] > reach) break;
      ok = in_double_cone(pts[order[m]] - pts[i], t, delta, xi);
    }
    if (ok) out.push_back(i);
  }
  return out;
}

}  // namespace fkrc
