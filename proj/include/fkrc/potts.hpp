#pragma once

// Two-dimensional q-state Potts model on Lambda_N with free, uniform or
// Dobrushin boundary spins. Weight prod exp(beta delta(s_i, s_j)) over
// nearest-neighbour pairs meeting the box; the Edwards-Sokal coupling
// therefore opens agreeing pairs with probability 1 - exp(-beta).
//
// Dual sites use integer coordinates (i, j) for the point (i + 1/2, j + 1/2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "fkrc/cones.hpp"
#include "fkrc/error.hpp"
#include "fkrc/fk.hpp"
#include "fkrc/geometry.hpp"
#include "fkrc/lattice.hpp"
#include "fkrc/rng.hpp"
#include "fkrc/union_find.hpp"

namespace fkrc {

/// ln(1 + sqrt q): the self-dual inverse temperature in the exp(beta delta) convention.
inline double potts_self_dual_beta(double q) { return std::log1p(std::sqrt(q)); }

struct PottsBoundary {
  enum class Kind { free, uniform, dobrushin };
  Kind kind = Kind::free;
  std::uint8_t colour = 1;  ///< uniform bc
  Vec n{0.0, 1.0};          ///< Dobrushin normal

  static PottsBoundary free_bc() { return {}; }
  static PottsBoundary uniform(std::uint8_t c) { return {Kind::uniform, c, {0.0, 1.0}}; }
  /// sigma_i = 1 if (n, i) >= 0 and 2 otherwise; requires (n, e2) >= 1/sqrt 2.
  static PottsBoundary dobrushin(Vec n = {0.0, 1.0}) {
    require(n.dim == 2, ErrorCode::InvalidArgument, "Dobrushin normal must be two-dimensional");
    n = n / n.norm();
    require(n[1] >= 1.0 / std::sqrt(2.0) - 1e-12, ErrorCode::InvalidArgument, "Dobrushin normal needs (n, e2) >= 1/sqrt 2");
    return {Kind::dobrushin, 1, n};
  }

  /// Spin of a site outside the box; 0 under free bc.
  std::uint8_t spin_at(const Site& s) const {
    switch (kind) {
      case Kind::free: return 0;
      case Kind::uniform: return colour;
      case Kind::dobrushin: return n[0] * s[0] + n[1] * s[1] >= 0 ? 1 : 2;
    }
    return 0;
  }
};

struct SpinConfiguration {
  Box box;
  int q = 2;
  PottsBoundary bc;
  std::vector<std::uint8_t> spin;  ///< values 1..q, box index order

  SpinConfiguration() = default;
  SpinConfiguration(Box b, int q_, PottsBoundary bc_) : box(std::move(b)), q(q_), bc(bc_), spin(box.size(), 1) {}

  /// Spin anywhere in Z^2 (boundary spins outside the box).
  std::uint8_t at(const Site& s) const { return box.contains(s) ? spin[box.index(s)] : bc.spin_at(s); }
};

namespace detail {

// Calls f(u, v) for every nearest-neighbour pair meeting the box; v is
// outside the box when f's second site fails box.contains.
template <class F>
void for_each_potts_pair(const Box& box, F&& f) {
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site s = box.site(i);
    for (int axis = 0; axis < 2; ++axis)
      for (int step : {1, -1}) {
        Site t = s;
        t[axis] += step;
        if (box.contains(t) && (step < 0)) continue;  // inner pairs once
        f(s, t);
      }
  }
}

}  // namespace detail

inline double log_potts_weight(const SpinConfiguration& sigma, double beta) {
  require(sigma.box.dim() == 2, ErrorCode::InvalidArgument, "Potts model is two-dimensional");
  std::size_t agree = 0;
  detail::for_each_potts_pair(sigma.box, [&](const Site& a, const Site& b) {
    const auto sb = sigma.at(b);
    agree += sb != 0 && sb == sigma.at(a);
  });
  return beta * static_cast<double>(agree);
}

/// prod over pairs meeting the box of exp(beta delta(sigma_i, sigma_j)).
inline double potts_weight(const SpinConfiguration& sigma, double beta) {
  return std::exp(log_potts_weight(sigma, beta));
}

/// Table over all q^|box| spin assignments; entry k has spin of site i equal
/// to 1 + (k / q^i mod q).
struct PottsDistribution {
  Box box;
  int q = 2;
  PottsBoundary bc;
  std::vector<double> prob;

  SpinConfiguration config(std::size_t k) const {
    SpinConfiguration s(box, q, bc);
    for (std::size_t i = 0; i < box.size(); ++i, k /= q) s.spin[i] = static_cast<std::uint8_t>(1 + k % q);
    return s;
  }
  static std::size_t key(const SpinConfiguration& s) {
    std::size_t k = 0, mult = 1;
    for (std::size_t i = 0; i < s.spin.size(); ++i, mult *= s.q) k += (s.spin[i] - 1) * mult;
    return k;
  }
};

inline PottsDistribution exact_potts_distribution(const Box& box, double beta, int q, const PottsBoundary& bc) {
  require(q >= 2, ErrorCode::NonIntegerQ, "Potts needs integer q >= 2");
  const double states = std::pow(static_cast<double>(q), static_cast<double>(box.size()));
  require(states <= 1e7, ErrorCode::TooLarge, "q^|box| exceeds 1e7");
  PottsDistribution out{box, q, bc, {}};
  const auto m = static_cast<std::size_t>(states);
  out.prob.resize(m);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    out.prob[k] = log_potts_weight(out.config(k), beta);
    top = std::max(top, out.prob[k]);
  }
  double z = 0;
  for (auto& p : out.prob) z += (p = std::exp(p - top));
  for (auto& p : out.prob) p /= z;
  return out;
}

/// Edwards-Sokal / Swendsen-Wang chain for integer q. Boundary sites of one
/// colour are merged into a single arc node, so clusters touching an arc
/// take its colour and all other clusters are recoloured uniformly.
class EdwardsSokal {
 public:
  EdwardsSokal(Box box, double beta, int q, PottsBoundary bc) : box_(std::move(box)), q_(q), bc_(bc) {
    require(box_.dim() == 2, ErrorCode::InvalidArgument, "Potts model is two-dimensional");
    require(q >= 2 && q < 255, ErrorCode::NonIntegerQ, "Potts needs integer q >= 2");
    require(beta >= 0, ErrorCode::InvalidArgument, "beta must be >= 0");
    p_ = -std::expm1(-beta);
    const auto n = static_cast<std::uint32_t>(box_.size());
    detail::for_each_potts_pair(box_, [&](const Site& a, const Site& b) {
      const auto u = static_cast<std::uint32_t>(box_.index(a));
      if (box_.contains(b)) {
        pairs_.push_back({u, static_cast<std::uint32_t>(box_.index(b)), 0});
      } else if (const auto c = bc_.spin_at(b); c != 0) {
        pairs_.push_back({u, n + c - 1, c});
      }
    });
    open_.assign(pairs_.size(), 0);
  }

  double bond_probability() const { return p_; }
  std::size_t num_pairs() const { return pairs_.size(); }
  /// Bond states of the last step, one per pair in construction order.
  const std::vector<std::uint8_t>& bonds() const { return open_; }
  /// Endpoints of pair k; v is an arc node (>= box size) for boundary pairs.
  std::pair<std::uint32_t, std::uint32_t> pair(std::size_t k) const { return {pairs_[k].u, pairs_[k].v}; }

  SpinConfiguration initial() const {
    SpinConfiguration s(box_, q_, bc_);
    if (bc_.kind != PottsBoundary::Kind::free)
      for (std::size_t i = 0; i < box_.size(); ++i) s.spin[i] = bc_.spin_at(box_.site(i));  // ground state
    return s;
  }

  void step(SpinConfiguration& s, Rng& rng) {
    const auto n = static_cast<std::uint32_t>(box_.size());
    uf_.reset(n + static_cast<std::size_t>(q_));
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const double u = rng.uniform();
      const auto& pr = pairs_[k];
      const std::uint8_t sv = pr.colour ? pr.colour : s.spin[pr.v];
      open_[k] = s.spin[pr.u] == sv && u < p_;
      if (open_[k]) uf_.unite(pr.u, pr.v);
    }
    colour_.assign(n + static_cast<std::size_t>(q_), 0);
    for (int c = 1; c <= q_; ++c) {
      auto& slot = colour_[uf_.find(n + c - 1)];
      require(slot == 0, ErrorCode::InconsistentBC, "a cluster touches two boundary colours");
      slot = static_cast<std::uint8_t>(c);
    }
    // arc nodes with no boundary sites are isolated and harmless
    for (std::uint32_t v = 0; v < n; ++v) {
      auto& slot = colour_[uf_.find(v)];
      if (slot == 0) slot = static_cast<std::uint8_t>(1 + rng.below(static_cast<std::uint64_t>(q_)));
      s.spin[v] = slot;
    }
  }

 private:
  struct Pair {
    std::uint32_t u, v;
    std::uint8_t colour;  ///< nonzero for a pair with a boundary site
  };
  Box box_;
  int q_;
  PottsBoundary bc_;
  double p_;
  std::vector<Pair> pairs_;
  std::vector<std::uint8_t> open_;
  UnionFind uf_;
  std::vector<std::uint8_t> colour_;
};

/// Runs an ES chain on Lambda_N; sink(const SpinConfiguration&) receives
/// every `thinning`-th state after `burn_in` steps.
template <class Sink>
void es_sample(int n, double beta, int q, const PottsBoundary& bc, std::size_t burn_in, std::size_t samples,
               std::size_t thinning, std::uint64_t seed, Sink&& sink) {
  EdwardsSokal es(Box::cube(2, n), beta, q, bc);
  Rng rng(seed);
  auto s = es.initial();
  for (std::size_t i = 0; i < burn_in; ++i) es.step(s, rng);
  const std::size_t gap = std::max<std::size_t>(thinning, 1);
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < gap; ++i) es.step(s, rng);
    sink(static_cast<const SpinConfiguration&>(s));
  }
}

/// Dual edge between dual sites a and b (integer dual coordinates).
struct DualEdge {
  Site a, b;
  friend bool operator==(const DualEdge&, const DualEdge&) = default;
};

struct Interface {
  int n = 0;
  Site left, right;            ///< odd dual sites the component is attached to
  std::vector<Site> vertices;  ///< dual sites of the component, lex order
  std::vector<DualEdge> edges;
};

namespace detail {

// The primal pair crossed by a dual edge from dual site d along `axis`.
inline std::pair<Site, Site> crossed_pair(const Site& d, int axis) {
  if (axis == 0) return {Site{d[0] + 1, d[1]}, Site{d[0] + 1, d[1] + 1}};
  return {Site{d[0], d[1] + 1}, Site{d[0] + 1, d[1] + 1}};
}

}  // namespace detail

/// Connected component of the disagreement dual edges that carries the two
/// boundary sign changes.
inline Interface extract_interface(const SpinConfiguration& sigma) {
  require(sigma.bc.kind == PottsBoundary::Kind::dobrushin, ErrorCode::InvalidArgument, "interfaces need Dobrushin bc");
  const Box& box = sigma.box;
  Site lo = box.lower(), hi = box.upper();
  lo[0] -= 1;
  lo[1] -= 1;
  const Box dual(lo, hi);
  const std::size_t m = dual.size();
  std::vector<std::vector<std::uint32_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Site d = dual.site(i);
    for (int axis = 0; axis < 2; ++axis) {
      Site e = d;
      e[axis] += 1;
      if (!dual.contains(e)) continue;
      auto [p1, p2] = detail::crossed_pair(d, axis);
      if (!(box.contains(p1) || box.contains(p2)) || sigma.at(p1) == sigma.at(p2)) continue;
      const auto j = static_cast<std::uint32_t>(dual.index(e));
      adj[i].push_back(j);
      adj[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  std::vector<std::uint32_t> odd;
  for (std::size_t i = 0; i < m; ++i)
    if (adj[i].size() % 2) odd.push_back(static_cast<std::uint32_t>(i));
  require(odd.size() == 2, ErrorCode::NoSpanningComponent,
          "expected two boundary sign changes, found " + std::to_string(odd.size()));
  std::vector<std::uint8_t> seen(m, 0);
  std::vector<std::uint32_t> queue{odd[0]};
  seen[odd[0]] = 1;
  for (std::size_t k = 0; k < queue.size(); ++k)
    for (auto w : adj[queue[k]])
      if (!seen[w]) seen[w] = 1, queue.push_back(w);
  require(seen[odd[1]], ErrorCode::NoSpanningComponent, "no disagreement component joins the sign changes");
  Interface out;
  out.n = box.upper()[0];
  out.left = dual.site(odd[0]);
  out.right = dual.site(odd[1]);
  if (out.right[0] < out.left[0]) std::swap(out.left, out.right);
  std::sort(queue.begin(), queue.end());
  for (auto v : queue) {
    out.vertices.push_back(dual.site(v));
    for (auto w : adj[v])
      if (v < w) out.edges.push_back({dual.site(v), dual.site(w)});
  }
  return out;
}

struct InterfaceProfile {
  int n = 0;
  std::vector<double> r;
  std::vector<double> height;         ///< Phi_N(r), cone-point polyline
  std::vector<double> phi;            ///< (Phi_N - chord) / sqrt N
  std::vector<double> column_height;  ///< column-mean fallback
  std::vector<double> column_phi;
  std::size_t cone_points = 0;
};

/// Heights of the interface along the vertical lines at horizontal position
/// -N + 2N r, r = k/m. The primary profile interpolates linearly through the
/// cone points (direction e1, Euclidean cones of opening delta) of the
/// interface, pinned at its two end sites.
inline InterfaceProfile interface_profile(const Interface& iface, std::size_t m, double delta = 0.5) {
  require(m >= 2, ErrorCode::InvalidArgument, "grid size must be >= 2");
  const int n = iface.n;
  require(n >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  auto pos = [](const Site& s) { return Vec{s[0] + 0.5, s[1] + 0.5}; };
  std::vector<Vec> pts;
  pts.reserve(iface.vertices.size());
  for (const auto& v : iface.vertices) pts.push_back(pos(v));
  const auto xi = DirectionalNorm::euclidean(2);
  const Vec e1{1.0, 0.0};
  const auto cones = cone_points(pts, e1, e1, delta, xi);
  std::vector<Vec> poly{pos(iface.left)};
  for (auto i : cones)
    if (!(iface.vertices[i] == iface.left) && !(iface.vertices[i] == iface.right)) poly.push_back(pts[i]);
  poly.push_back(pos(iface.right));
  for (std::size_t i = 1; i < poly.size(); ++i)
    require(poly[i][0] > poly[i - 1][0], ErrorCode::MultipleCrossings, "cone-point polyline is not a graph over e1");

  InterfaceProfile out;
  out.n = n;
  out.cone_points = cones.size();
  // column means: dual sites within half a unit of the sampling line
  std::vector<double> col_sum(2 * static_cast<std::size_t>(n) + 3, 0.0), col_cnt(col_sum.size(), 0.0);
  for (const auto& p : pts) {
    const auto c = static_cast<std::size_t>(std::lround(p[0] + 0.5 + n + 1));  // x + 1/2 in [-N, N+1]
    if (c < col_sum.size()) col_sum[c] += p[1], col_cnt[c] += 1;
  }
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double r = static_cast<double>(k) / m;
    const double x = -n + 2.0 * n * r;
    while (seg + 2 < poly.size() && poly[seg + 1][0] < x) ++seg;
    const Vec& a = poly[seg];
    const Vec& b = poly[seg + 1];
    const double h = a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]);
    double s = 0, c = 0;
    for (double dx : {-0.5, 0.5}) {
      const auto idx = static_cast<std::size_t>(std::lround(x + dx + 0.5 + n + 1));
      if (idx < col_sum.size()) s += col_sum[idx], c += col_cnt[idx];
    }
    out.r.push_back(r);
    out.height.push_back(h);
    out.column_height.push_back(c > 0 ? s / c : h);
  }
  const double root = std::sqrt(static_cast<double>(n));
  for (auto [src, dst] : {std::pair{&out.height, &out.phi}, std::pair{&out.column_height, &out.column_phi}}) {
    const double h0 = src->front(), h1 = src->back();
    for (std::size_t k = 0; k <= m; ++k) dst->push_back((k == 0 || k == m) ? 0.0 : ((*src)[k] - ((1 - out.r[k]) * h0 + out.r[k] * h1)) / root);
  }
  return out;
}

inline void write_profile_csv_header(std::ostream& os) { os << "sample_id,r,phi\n"; }

inline void write_profile_csv(std::ostream& os, std::size_t sample_id, const InterfaceProfile& p) {
  char buf[96];
  for (std::size_t k = 0; k < p.r.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", sample_id, p.r[k], p.phi[k]);
    os << buf;
  }
}

/// Exact sampler for the q = 2 model on Lambda_N with e2-Dobrushin bc.
///
/// A spin configuration is determined by its set E of disagreement dual
/// edges, a subset of the dual box [-N-1, N]^2 whose odd sites are exactly
/// xL = (-N-1, -1) and xR = (N, -1), with weight exp(-beta)^|E|. A worm keeps
/// E with odd sites {xL, head} and moves the head by flipping the edge it
/// crosses, with a column bias W that makes the head roam the whole box.
/// Conditioned on head == xR the state has the target law.
class DobrushinWorm {
 public:
  DobrushinWorm(int n, double beta) : n_(n), side_(2 * n + 2), x_(std::exp(-beta)) {
    require(n >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
    require(beta > 0, ErrorCode::InvalidArgument, "beta must be > 0");
    horiz_.assign(static_cast<std::size_t>(side_) * side_, 0);
    vert_.assign(static_cast<std::size_t>(side_) * side_, 0);
    log_w_.assign(side_, 0.0);
    for (int c = 0; c < side_; ++c) log_w_[c] = -0.8 * std::log(x_) * c;
    // start from the flat interface at height -1/2
    for (int c = 0; c + 1 < side_; ++c) horiz_[cell(c, row_of(-1))] = 1;
    head_c_ = side_ - 1;
    head_r_ = row_of(-1);
    refresh_ratios();
  }

  int n() const { return n_; }
  const std::vector<double>& log_weights() const { return log_w_; }
  void set_log_weights(std::vector<double> w) {
    require(w.size() == static_cast<std::size_t>(side_), ErrorCode::InvalidArgument, "one weight per dual column");
    log_w_ = std::move(w);
    refresh_ratios();
  }
  bool at_target() const { return head_c_ == side_ - 1 && head_r_ == row_of(-1); }
  int head_column() const { return head_c_; }

  /// One proposed head move.
  void move(Rng& rng) {
    const std::uint64_t bits = rng();
    const int dir = static_cast<int>(bits & 3u);
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    int c = head_c_, r = head_r_;
    std::uint8_t* edge;
    double ratio;
    switch (dir) {
      case 0:
        if (c + 1 >= side_) return;
        edge = &horiz_[cell(c, r)];
        ratio = right_[c];
        ++c;
        break;
      case 1:
        if (c == 0) return;
        edge = &horiz_[cell(c - 1, r)];
        ratio = left_[c];
        --c;
        break;
      case 2:
        if (r + 1 >= side_) return;
        edge = &vert_[cell(c, r)];
        ratio = 1.0;
        ++r;
        break;
      default:
        if (r == 0) return;
        edge = &vert_[cell(c, r - 1)];
        ratio = 1.0;
        --r;
        break;
    }
    ratio *= *edge ? 1.0 / x_ : x_;
    if (ratio >= 1.0 || u < ratio) {
      *edge ^= 1u;
      head_c_ = c;
      head_r_ = r;
    }
  }

  /// Flattens the head's column histogram by repeated reweighting.
  void tune(Rng& rng, int stages = 16, double sweeps_per_stage = 40.0) {
    const auto moves = static_cast<std::uint64_t>(sweeps_per_stage * side_ * side_ * 4.0);
    std::vector<double> hist(side_);
    for (int s = 0; s < stages; ++s) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (std::uint64_t k = 0; k < moves; ++k) {
        move(rng);
        hist[head_c_] += 1.0;
      }
      double mean_log = 0;
      for (auto& h : hist) mean_log += std::log(h + 1.0);
      mean_log /= side_;
      for (int c = 0; c < side_; ++c) log_w_[c] -= std::log(hist[c] + 1.0) - mean_log;
      refresh_ratios();
    }
  }

  /// Runs until `k` more time steps have been spent with the head at xR.
  /// A fixed k keeps the emitted states distributed as the target law; a
  /// data-dependent stopping rule would not.
  std::uint64_t advance_visits(Rng& rng, std::uint64_t k) {
    std::uint64_t moves = 0, seen = 0;
    while (seen < k) {
      move(rng);
      ++moves;
      seen += at_target();
    }
    return moves;
  }

  /// Mean number of time steps at xR per round trip (left column to xR),
  /// measured over `moves` moves. Used to choose k.
  double visits_per_round_trip(Rng& rng, std::uint64_t moves) {
    std::uint64_t seen = 0, trips = 0;
    bool from_left = false;
    for (std::uint64_t i = 0; i < moves; ++i) {
      move(rng);
      if (head_c_ == 0) from_left = true;
      if (at_target()) {
        ++seen;
        if (from_left) ++trips, from_left = false;
      }
    }
    require(trips > 0, ErrorCode::InvalidArgument, "no round trip completed; tune the worm or run longer");
    return static_cast<double>(seen) / static_cast<double>(trips);
  }

  /// Spin configuration of the current state; valid when at_target().
  SpinConfiguration spins() const {
    require(at_target(), ErrorCode::InvalidArgument, "head is not at the target site");
    const auto bc = PottsBoundary::dobrushin();
    SpinConfiguration s(Box::cube(2, n_), 2, bc);
    for (int j = -n_; j <= n_; ++j) {
      std::uint8_t cur = bc.spin_at(Site{-n_ - 1, j});
      for (int i = -n_; i <= n_; ++i) {
        // pair (i-1, j)-(i, j) is crossed by the dual edge (i-1, j-1)-(i-1, j)
        if (vert_[cell(i - 1 + n_ + 1, row_of(j - 1))]) cur = static_cast<std::uint8_t>(3 - cur);
        s.spin[s.box.index(Site{i, j})] = cur;
      }
    }
    return s;
  }

  std::size_t edge_count() const {
    std::size_t k = 0;
    for (auto b : horiz_) k += b;
    for (auto b : vert_) k += b;
    return k;
  }

 private:
  int row_of(int j) const { return j + n_ + 1; }
  std::size_t cell(int c, int r) const { return static_cast<std::size_t>(c) * side_ + r; }

  void refresh_ratios() {
    right_.assign(side_, 0.0);
    left_.assign(side_, 0.0);
    for (int c = 0; c < side_; ++c) {
      if (c + 1 < side_) right_[c] = std::exp(log_w_[c + 1] - log_w_[c]);
      if (c > 0) left_[c] = std::exp(log_w_[c - 1] - log_w_[c]);
    }
  }

  int n_, side_;
  double x_;
  std::vector<std::uint8_t> horiz_, vert_;  ///< edge (c,r)-(c+1,r) and (c,r)-(c,r+1)
  std::vector<double> log_w_, right_, left_;
  int head_c_ = 0, head_r_ = 0;
};

}  // namespace fkrc
