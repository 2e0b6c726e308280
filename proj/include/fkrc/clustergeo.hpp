#pragma once

// Geometry of a single cluster C_{0,x}: the skeleton tree on scale K, its
// trunk and branches, cone points at the trunk (delta), tree (2 delta) and
// cluster (3 delta) levels, and the irreducible decomposition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "fkrc/cones.hpp"
#include "fkrc/error.hpp"
#include "fkrc/fk.hpp"
#include "fkrc/geometry.hpp"
#include "fkrc/lattice.hpp"

namespace fkrc {

/// Finite R-connected subgraph of Z^d with two distinguished vertices.
class Cluster {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Cluster(std::vector<Site> vertices, std::vector<Edge> edges, const Site& origin, const Site& target,
          double range = 1.0)
      : vertices_(std::move(vertices)), edges_(std::move(edges)), range_(range) {
    require(!vertices_.empty(), ErrorCode::InvalidArgument, "empty cluster");
    require(range_ >= 1.0, ErrorCode::InvalidArgument, "range must be >= 1");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      require(vertices_[i].dim == vertices_[0].dim, ErrorCode::InvalidArgument, "mixed dimensions");
      require(index_.emplace(vertices_[i], i).second, ErrorCode::InvalidArgument, "duplicate vertex");
    }
    adj_.resize(vertices_.size());
    for (const auto& [a, b] : edges_) {
      require(a < vertices_.size() && b < vertices_.size() && a != b, ErrorCode::InvalidArgument, "bad edge");
      require((vertices_[a] - vertices_[b]).norm() <= range_ + 1e-12, ErrorCode::InvalidArgument,
              "edge longer than the range");
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    auto o = find(origin), x = find(target);
    require(o && x, ErrorCode::InvalidArgument, "endpoints must belong to the cluster");
    origin_ = *o;
    target_ = *x;
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto w : adj_[u])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    require(count == vertices_.size(), ErrorCode::InvalidArgument, "cluster is not connected");
  }

  int dim() const { return vertices_[0].dim; }
  std::size_t size() const { return vertices_.size(); }
  double range() const { return range_; }
  const std::vector<Site>& vertices() const { return vertices_; }
  const Site& vertex(std::size_t i) const { return vertices_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_[i]; }
  std::size_t origin_index() const { return origin_; }
  std::size_t target_index() const { return target_; }
  const Site& origin() const { return vertices_[origin_]; }
  const Site& target() const { return vertices_[target_]; }

  std::optional<std::size_t> find(const Site& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const Site& s) const { return index_.count(s) != 0; }

 private:
  std::vector<Site> vertices_;
  std::vector<Edge> edges_;
  double range_;
  std::unordered_map<Site, std::size_t, SiteHash> index_;
  std::vector<std::vector<std::size_t>> adj_;
  std::size_t origin_ = 0, target_ = 0;
};

/// Open cluster of `a` in the box (exterior links are not followed); `b` must
/// be in it.
inline Cluster extract_cluster(const BondConfiguration& omega, const Site& a, const Site& b) {
  const LatticeGraph& g = *omega.graph;
  const Box& box = g.box();
  require(box.contains(a) && box.contains(b), ErrorCode::InvalidArgument, "endpoints must lie in the box");
  std::unordered_map<std::uint32_t, std::size_t> local;
  std::vector<Site> sites;
  std::vector<Cluster::Edge> edges;
  std::deque<std::uint32_t> queue;
  const auto root = static_cast<std::uint32_t>(box.index(a));
  local.emplace(root, 0);
  sites.push_back(a);
  queue.push_back(root);
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    auto [lo, hi] = g.arcs(u);
    for (const auto* arc = lo; arc != hi; ++arc) {
      if (!omega.open[arc->bond] || arc->to == g.exterior()) continue;
      auto [it, fresh] = local.emplace(arc->to, sites.size());
      if (fresh) {
        sites.push_back(box.site(arc->to));
        queue.push_back(arc->to);
      }
      if (u < arc->to) edges.emplace_back(local.at(u), it->second);
    }
  }
  require(local.count(static_cast<std::uint32_t>(box.index(b))) != 0, ErrorCode::InvalidArgument,
          "the endpoints are not connected");
  return Cluster(std::move(sites), std::move(edges), a, b, std::max(1.0, g.couplings().range()));
}

namespace detail {

inline std::vector<Site> offsets_within(int d, double radius) {
  const int m = static_cast<int>(std::floor(radius + 1e-12));
  std::vector<Site> out;
  Site s = Site::zero(d);
  std::function<void(int)> rec = [&](int i) {
    if (i == d) {
      if (!s.is_zero() && s.norm() <= radius + 1e-12) out.push_back(s);
      return;
    }
    for (int v = -m; v <= m; ++v) {
      s[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

/// Balls {z : xi(z - y) <= rho} of Z^d, enumerated through a sup-norm box
/// large enough to contain them.
class NormBalls {
 public:
  explicit NormBalls(const DirectionalNorm& xi) : xi_(xi) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& u : unit_directions(xi.dim(), xi.dim() == 2 ? 720 : 2000)) m = std::min(m, xi(u));
    require(m > 0, ErrorCode::DegenerateNorm, "norm vanishes on a direction");
    inv_min_ = 1.0 / (0.9 * m);
    tol_ = xi.tolerance();
  }

  bool contains(const Site& centre, double rho, const Site& z) const {
    const Site w = z - centre;
    return w.is_zero() || xi_(Vec(w)) <= rho * (1.0 + tol_);
  }

  template <class F>
  void for_each(const Site& centre, double rho, F&& f) const {
    const int d = centre.dim;
    const int ext = static_cast<int>(std::ceil(rho * inv_min_)) + 1;
    Site z = centre;
    std::function<void(int)> rec = [&](int i) {
      if (i == d) {
        if (contains(centre, rho, z)) f(z);
        return;
      }
      for (int v = -ext; v <= ext; ++v) {
        z[i] = centre[i] + v;
        rec(i + 1);
      }
    };
    rec(0);
  }

 private:
  const DirectionalNorm& xi_;
  double inv_min_ = 1.0, tol_ = 0.0;
};

}  // namespace detail

struct Branch {
  std::size_t root = 0;               ///< trunk position the branch hangs from
  std::vector<std::size_t> vertices;  ///< tree vertex indices, increasing
};

struct SkeletonTree {
  std::vector<Site> vertices;         ///< x_0 .. x_{N(T)}
  std::vector<std::ptrdiff_t> parent; ///< -1 for x_0
  std::vector<std::size_t> trunk;     ///< tree indices along x_0 -> x_F
  std::vector<Branch> branches;
  double K = 0, r = 0;

  std::size_t size() const { return vertices.size(); }
  std::size_t branch_vertex_count() const {
    std::size_t n = 0;
    for (const auto& b : branches) n += b.vertices.size();
    return n;
  }
  std::vector<Site> trunk_sites() const {
    std::vector<Site> out;
    for (auto i : trunk) out.push_back(vertices[i]);
    return out;
  }
};

inline constexpr double kMinScale = 1.0;

/// Radius of B-bar_K = B_{K + r log K}.
inline double padded_radius(double K, double r) { return K + r * std::log(K); }

/// Trunk x_0 -> x_F, with x_F the first tree vertex whose B-bar_{2K} holds x,
/// and the remaining vertices grouped by the trunk vertex they hang from.
inline std::pair<std::vector<std::size_t>, std::vector<Branch>> split_trunk_branches(const SkeletonTree& tree,
                                                                                      const Site& x,
                                                                                      const DirectionalNorm& xi) {
  const detail::NormBalls balls(xi);
  const double rho2 = padded_radius(2.0 * tree.K, tree.r);
  std::optional<std::size_t> xf;
  for (std::size_t i = 0; i < tree.size() && !xf; ++i)
    if (balls.contains(tree.vertices[i], rho2, x)) xf = i;
  require(xf.has_value(), ErrorCode::TargetNotCovered, "no skeleton vertex covers the target");
  std::vector<std::size_t> trunk;
  for (auto v = static_cast<std::ptrdiff_t>(*xf); v >= 0; v = tree.parent[static_cast<std::size_t>(v)])
    trunk.push_back(static_cast<std::size_t>(v));
  std::reverse(trunk.begin(), trunk.end());

  std::vector<std::ptrdiff_t> pos(tree.size(), -1);
  for (std::size_t k = 0; k < trunk.size(); ++k) pos[trunk[k]] = static_cast<std::ptrdiff_t>(k);
  // Parents always carry smaller indices, so one forward pass finds the
  // trunk ancestor of every vertex.
  std::vector<std::ptrdiff_t> anchor(tree.size(), -1);
  std::vector<Branch> branches;
  std::vector<std::ptrdiff_t> branch_of(trunk.size(), -1);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (pos[i] >= 0) {
      anchor[i] = pos[i];
      continue;
    }
    anchor[i] = anchor[static_cast<std::size_t>(tree.parent[i])];
    const auto k = static_cast<std::size_t>(anchor[i]);
    if (branch_of[k] < 0) {
      branch_of[k] = static_cast<std::ptrdiff_t>(branches.size());
      branches.push_back({k, {}});
    }
    branches[static_cast<std::size_t>(branch_of[k])].vertices.push_back(i);
  }
  std::sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) { return a.root < b.root; });
  return {std::move(trunk), std::move(branches)};
}

/// Skeleton of C on scale K with padding r. x_0 is the cluster origin.
inline SkeletonTree skeleton(const Cluster& c, double K, double r, const DirectionalNorm& xi) {
  require(K >= kMinScale, ErrorCode::InvalidArgument, "K must be >= 1");
  require(r >= 0, ErrorCode::InvalidArgument, "r must be >= 0");
  require(xi.dim() == c.dim(), ErrorCode::InvalidArgument, "norm and cluster dimensions differ");
  const detail::NormBalls balls(xi);
  const double rho = padded_radius(K, r);
  const auto offsets = detail::offsets_within(c.dim(), c.range());

  SkeletonTree tree;
  tree.K = K;
  tree.r = r;
  std::unordered_set<Site, SiteHash> covered;
  auto add_ball = [&](const Site& y) {
    balls.for_each(y, rho, [&](const Site& z) { covered.insert(z); });
  };
  tree.vertices.push_back(c.origin());
  tree.parent.push_back(-1);
  add_ball(c.origin());

  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.vertex(a) < c.vertex(b); });

  // y connects to the R-boundary of B_K(y) through C minus the covered set.
  std::vector<std::uint32_t> mark(c.size(), 0);
  std::uint32_t stamp = 0;
  auto escapes = [&](std::size_t y) {
    ++stamp;
    std::vector<std::size_t> stack{y};
    mark[y] = stamp;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto w : c.neighbors(u)) {
        if (mark[w] == stamp || covered.count(c.vertex(w))) continue;
        if (!balls.contains(c.vertex(y), K, c.vertex(w))) return true;
        mark[w] = stamp;
        stack.push_back(w);
      }
    }
    return false;
  };

  for (;;) {
    std::optional<std::size_t> pick;
    for (auto v : order) {
      const Site& y = c.vertex(v);
      if (covered.count(y)) continue;
      bool on_boundary = false;
      for (const auto& o : offsets)
        if (covered.count(y + o)) {
          on_boundary = true;
          break;
        }
      if (on_boundary && escapes(v)) {
        pick = v;
        break;
      }
    }
    if (!pick) break;
    const Site& y = c.vertex(*pick);
    std::ptrdiff_t parent = -1;
    for (std::size_t j = 0; j < tree.size() && parent < 0; ++j) {
      if (balls.contains(tree.vertices[j], rho, y)) continue;
      for (const auto& o : offsets)
        if (balls.contains(tree.vertices[j], rho, y + o)) {
          parent = static_cast<std::ptrdiff_t>(j);
          break;
        }
    }
    require(parent >= 0, ErrorCode::CoveringViolation, "new skeleton vertex touches no earlier ball");
    tree.vertices.push_back(y);
    tree.parent.push_back(parent);
    add_ball(y);
  }

  const double rho2 = padded_radius(2.0 * K, r);
  for (const auto& v : c.vertices()) {
    bool ok = false;
    for (const auto& x : tree.vertices)
      if (balls.contains(x, rho2, v)) {
        ok = true;
        break;
      }
    require(ok, ErrorCode::CoveringViolation, "cluster vertex " + v.str() + " escapes the skeleton cover");
  }
  std::tie(tree.trunk, tree.branches) = split_trunk_branches(tree, c.target(), xi);
  return tree;
}

struct TrunkConePoints {
  std::vector<std::size_t> cone;    ///< trunk positions, increasing
  std::vector<std::size_t> marked;  ///< trunk positions, increasing
};

/// Cone and marked points of a trunk with opening delta.
inline TrunkConePoints trunk_cone_points(const std::vector<Site>& trunk, const Vec& t, double delta,
                                         const DirectionalNorm& xi) {
  const std::size_t n = trunk.size();
  auto fwd_in = [&](std::size_t from, std::size_t to) {
    return in_forward_cone(Vec(trunk[to] - trunk[from]), t, delta, xi);
  };
  std::vector<char> forward(n, 1), backward(n, 1);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k + 1; j < n && forward[k]; ++j) forward[k] = fwd_in(k, j);
    for (std::size_t j = 0; j < k && backward[k]; ++j) backward[k] = fwd_in(j, k);
  }
  TrunkConePoints out;
  for (std::size_t k = 0; k < n; ++k)
    if (forward[k] && backward[k]) out.cone.push_back(k);

  std::vector<char> marked(n, 0);
  for (std::size_t j = 0;;) {
    std::size_t l = j;
    while (l < n && forward[l]) ++l;
    if (l >= n) break;
    std::size_t r = l + 1;
    while (r < n && fwd_in(l, r)) ++r;  // r < n since l is not a forward cone point
    for (std::size_t i = l; i < r; ++i) marked[i] = 1;
    j = r;
  }
  for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(n) - 1;;) {
    std::ptrdiff_t l = j;
    while (l >= 0 && backward[static_cast<std::size_t>(l)]) --l;
    if (l < 0) break;
    std::ptrdiff_t r = l - 1;
    while (r >= 0 && fwd_in(static_cast<std::size_t>(r), static_cast<std::size_t>(l))) --r;
    for (std::ptrdiff_t i = r + 1; i <= l; ++i) marked[static_cast<std::size_t>(i)] = 1;
    j = r;
  }
  for (std::size_t k = 0; k < n; ++k)
    if (marked[k]) out.marked.push_back(k);
  return out;
}

/// Trunk positions j with the whole tree inside t_j + (Y_{2 delta} u -Y_{2 delta}).
inline std::vector<std::size_t> tree_cone_points(const SkeletonTree& tree, const Vec& t, double delta,
                                                 const DirectionalNorm& xi) {
  const auto trunk = tree.trunk_sites();
  std::vector<std::size_t> out;
  for (auto j : trunk_cone_points(trunk, t, 2.0 * delta, xi).cone) {
    bool blocked = false;
    for (const auto& b : tree.branches) {
      for (auto v : b.vertices)
        if (!in_double_cone(Vec(tree.vertices[v] - trunk[j]), t, 2.0 * delta, xi)) {
          blocked = true;
          break;
        }
      if (blocked) break;
    }
    if (!blocked) out.push_back(j);
  }
  return out;
}

enum class ConeSearch { brute_force, accelerated };

/// Cluster vertices y with C inside y + (Y_{3 delta} u -Y_{3 delta}), in
/// increasing (t, y) order. The accelerated search needs (t, x - 0) > 0 and
/// falls back to brute force otherwise.
inline std::vector<std::size_t> cluster_cone_points(const Cluster& c, const Vec& t, double delta,
                                                    const DirectionalNorm& xi,
                                                    ConeSearch method = ConeSearch::brute_force) {
  require(3.0 * delta < 1.0, ErrorCode::InvalidArgument, "3 delta must be < 1");
  std::vector<Vec> pts;
  pts.reserve(c.size());
  for (const auto& v : c.vertices()) pts.emplace_back(v);
  const Vec x(c.target() - c.origin());
  if (method == ConeSearch::accelerated && t.dot(x) > 0) return cone_points(pts, x, t, 3.0 * delta, xi);
  return cone_points_bruteforce(pts, t, 3.0 * delta, xi);
}

/// Fraction of cluster cone points lying within B-bar_{2K} of a tree cone
/// point. A diagnostic only.
inline double cone_hierarchy_fraction(const Cluster& c, const SkeletonTree& tree,
                                      const std::vector<std::size_t>& tree_cones,
                                      const std::vector<std::size_t>& cluster_cones, const DirectionalNorm& xi) {
  if (cluster_cones.empty()) return 1.0;
  const detail::NormBalls balls(xi);
  const double rho2 = padded_radius(2.0 * tree.K, tree.r);
  std::size_t hit = 0;
  for (auto v : cluster_cones)
    for (auto j : tree_cones)
      if (balls.contains(tree.vertices[tree.trunk[j]], rho2, c.vertex(v))) {
        ++hit;
        break;
      }
  return static_cast<double>(hit) / static_cast<double>(cluster_cones.size());
}

struct ClusterPiece {
  std::vector<std::size_t> vertices;  ///< cluster vertex indices, increasing
  std::vector<std::size_t> edges;     ///< cluster edge indices, increasing
  std::optional<std::size_t> f, b;    ///< rear and front markers
};

/// C = gamma^b + gamma_1 + ... + gamma_N + gamma^f, glued at cone points.
struct IrreducibleDecomposition {
  ClusterPiece backward;
  std::vector<ClusterPiece> pieces;
  ClusterPiece forward;
  std::vector<std::size_t> cone_points;  ///< c_1 .. c_m, increasing level
  Vec t;
  double delta = 0;

  std::size_t count() const { return pieces.size(); }
};

struct Undecomposable {
  std::size_t cone_points = 0;
};

using DecompositionResult = std::variant<IrreducibleDecomposition, Undecomposable>;

namespace detail {

inline bool confined(const Cluster& c, const ClusterPiece& p, const Vec& t, double opening,
                     const DirectionalNorm& xi) {
  for (auto v : p.vertices) {
    if (p.f && v != *p.f && !in_forward_cone(Vec(c.vertex(v) - c.vertex(*p.f)), t, opening, xi)) return false;
    if (p.b && v != *p.b && !in_forward_cone(Vec(c.vertex(*p.b) - c.vertex(v)), t, opening, xi)) return false;
  }
  return true;
}

inline std::vector<std::size_t> piece_cone_points(const Cluster& c, const ClusterPiece& p, const Vec& t,
                                                  double opening, const DirectionalNorm& xi) {
  std::vector<Vec> pts;
  for (auto v : p.vertices) pts.emplace_back(c.vertex(v));
  std::vector<std::size_t> out;
  for (auto k : cone_points_bruteforce(pts, t, opening, xi)) out.push_back(p.vertices[k]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Irreducible decomposition along t with opening 3 delta. All invariants are
/// checked before returning; a failure raises PartitionViolation.
inline DecompositionResult decompose(const Cluster& c, const Vec& t, double delta, const DirectionalNorm& xi,
                                     ConeSearch method = ConeSearch::brute_force) {
  const auto cones = cluster_cone_points(c, t, delta, xi, method);
  if (cones.size() < 2) return Undecomposable{cones.size()};
  const double opening = 3.0 * delta;
  const std::size_t m = cones.size();
  std::vector<double> levels(m);
  for (std::size_t i = 0; i < m; ++i) levels[i] = t.dot(Vec(c.vertex(cones[i])));

  IrreducibleDecomposition d;
  d.cone_points = cones;
  d.t = t;
  d.delta = delta;
  // Piece k: 0 = gamma^b, 1..m-1 = gamma_k, m = gamma^f.
  std::vector<ClusterPiece> all(m + 1);
  all[0].b = cones[0];
  for (std::size_t k = 1; k < m; ++k) {
    all[k].f = cones[k - 1];
    all[k].b = cones[k];
  }
  all[m].f = cones[m - 1];

  std::vector<std::ptrdiff_t> cone_rank(c.size(), -1);
  for (std::size_t i = 0; i < m; ++i) cone_rank[cones[i]] = static_cast<std::ptrdiff_t>(i);
  std::vector<std::size_t> piece_of(c.size(), 0);
  for (std::size_t v = 0; v < c.size(); ++v) {
    if (cone_rank[v] >= 0) {
      const auto i = static_cast<std::size_t>(cone_rank[v]);
      all[i].vertices.push_back(v);
      all[i + 1].vertices.push_back(v);
      continue;
    }
    const double l = t.dot(Vec(c.vertex(v)));
    const auto k = static_cast<std::size_t>(std::upper_bound(levels.begin(), levels.end(), l) - levels.begin());
    require(k == 0 || levels[k - 1] != l, ErrorCode::PartitionViolation,
            "vertex " + c.vertex(v).str() + " shares the level of a cone point");
    ClusterPiece probe{{v}, {}, all[k].f, all[k].b};
    require(detail::confined(c, probe, t, opening, xi), ErrorCode::PartitionViolation,
            "vertex " + c.vertex(v).str() + " lies outside its piece's cone intersection");
    piece_of[v] = k;
    all[k].vertices.push_back(v);
  }

  auto pieces_of = [&](std::size_t v) -> std::pair<std::size_t, std::size_t> {
    if (cone_rank[v] >= 0) return {static_cast<std::size_t>(cone_rank[v]), static_cast<std::size_t>(cone_rank[v]) + 1};
    return {piece_of[v], piece_of[v]};
  };
  for (std::size_t e = 0; e < c.edges().size(); ++e) {
    const auto [a0, a1] = pieces_of(c.edges()[e].first);
    const auto [b0, b1] = pieces_of(c.edges()[e].second);
    const std::size_t lo = std::max(a0, b0), hi = std::min(a1, b1);
    require(lo <= hi, ErrorCode::PartitionViolation, "an open edge straddles a cone point");
    all[lo].edges.push_back(e);
  }

  std::size_t total = 0;
  for (std::size_t k = 0; k <= m; ++k) {
    auto& p = all[k];
    std::sort(p.vertices.begin(), p.vertices.end());
    total += p.vertices.size();
    require(detail::confined(c, p, t, opening, xi), ErrorCode::PartitionViolation, "piece leaves its cones");
    std::vector<std::size_t> markers;
    if (p.f) markers.push_back(*p.f);
    if (p.b) markers.push_back(*p.b);
    std::sort(markers.begin(), markers.end());
    require(detail::piece_cone_points(c, p, t, opening, xi) == markers, ErrorCode::PartitionViolation,
            "a piece has cone points other than its markers");
  }
  require(total == c.size() + m, ErrorCode::PartitionViolation, "pieces overlap away from the markers");

  d.backward = std::move(all[0]);
  d.forward = std::move(all[m]);
  d.pieces.assign(std::make_move_iterator(all.begin() + 1), std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(m)));
  return d;
}

/// Union of the pieces as sorted vertex and edge index lists.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> reassemble(const IrreducibleDecomposition& d) {
  std::vector<std::size_t> vs, es;
  auto take = [&](const ClusterPiece& p) {
    vs.insert(vs.end(), p.vertices.begin(), p.vertices.end());
    es.insert(es.end(), p.edges.begin(), p.edges.end());
  };
  take(d.backward);
  for (const auto& p : d.pieces) take(p);
  take(d.forward);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  std::sort(es.begin(), es.end());
  return {vs, es};
}

struct EffectiveWalk {
  std::vector<Site> steps;  ///< V_i = b(gamma_i) - f(gamma_i)
  Site start, end;          ///< c_1 and c_m
};

inline EffectiveWalk effective_walk(const Cluster& c, const IrreducibleDecomposition& d) {
  EffectiveWalk w;
  w.start = c.vertex(d.cone_points.front());
  w.end = c.vertex(d.cone_points.back());
  for (const auto& p : d.pieces) w.steps.push_back(c.vertex(*p.b) - c.vertex(*p.f));
  return w;
}

struct HausdorffResult {
  std::vector<Vec> polyline;  ///< 0, cone points, x (consecutive duplicates dropped)
  double distance = 0;
};

namespace detail {

inline double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.dot(ab);
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace detail

/// Euclidean Hausdorff distance between C, read as the union of its vertices
/// and open edges (as segments), and the polyline through the origin, the
/// given anchors and the target. Point-to-set distances are exact; sup over a
/// segment is taken on samples every `step` units.
inline HausdorffResult polyline_and_hausdorff(const Cluster& c, const std::vector<std::size_t>& anchors,
                                              double step = 0.02) {
  require(step > 0, ErrorCode::InvalidArgument, "step must be positive");
  HausdorffResult out;
  auto push = [&](const Site& s) {
    Vec v(s);
    if (out.polyline.empty() || (out.polyline.back() - v).norm() > 0) out.polyline.push_back(v);
  };
  push(c.origin());
  for (auto a : anchors) push(c.vertex(a));
  push(c.target());

  using Segment = std::pair<Vec, Vec>;
  std::vector<Segment> poly, body;
  for (std::size_t k = 0; k + 1 < out.polyline.size(); ++k) poly.emplace_back(out.polyline[k], out.polyline[k + 1]);
  if (poly.empty()) poly.emplace_back(out.polyline[0], out.polyline[0]);
  for (const auto& v : c.vertices()) body.emplace_back(Vec(v), Vec(v));
  for (const auto& [a, b] : c.edges()) body.emplace_back(Vec(c.vertex(a)), Vec(c.vertex(b)));

  auto distance_to = [](const Vec& p, const std::vector<Segment>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : set) best = std::min(best, detail::segment_distance(p, a, b));
    return best;
  };
  // distance to a set is 1-Lipschitz, so a segment whose endpoint distances
  // plus half its length stay below the running maximum cannot raise it
  auto directed = [&](const std::vector<Segment>& from, const std::vector<Segment>& to, double h) {
    for (const auto& [a, b] : from) {
      const double len = (b - a).norm();
      const double da = distance_to(a, to), db = distance_to(b, to);
      h = std::max({h, da, db});
      if (std::max(da, db) + 0.5 * len <= h) continue;
      const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step)));
      for (std::size_t i = 1; i < n; ++i)
        h = std::max(h, distance_to(a + (static_cast<double>(i) / static_cast<double>(n)) * (b - a), to));
    }
    return h;
  };
  double h = 0;
  for (const auto& v : c.vertices()) h = std::max(h, distance_to(Vec(v), poly));
  out.distance = directed(poly, body, directed(body, poly, h));
  return out;
}

}  // namespace fkrc
