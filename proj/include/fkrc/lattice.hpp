#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "fkrc/error.hpp"

namespace fkrc {

inline constexpr int kMaxDim = 4;

/// Integer lattice point (or lattice vector) of Z^d, d <= kMaxDim.
struct Site {
  std::array<int, kMaxDim> c{};
  int dim = 0;

  Site() = default;
  Site(std::initializer_list<int> coords) : dim(static_cast<int>(coords.size())) {
    require(dim <= kMaxDim, ErrorCode::InvalidArgument, "dimension exceeds kMaxDim");
    std::copy(coords.begin(), coords.end(), c.begin());
  }
  static Site zero(int d) {
    Site s;
    s.dim = d;
    return s;
  }

  int& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Site& a, const Site& b) { return a.dim == b.dim && a.c == b.c; }
  /// Lexicographic (coordinate-wise) order.
  friend std::strong_ordering operator<=>(const Site& a, const Site& b) {
    if (auto cmp = a.dim <=> b.dim; cmp != 0) return cmp;
    for (int i = 0; i < a.dim; ++i)
      if (auto cmp = a[i] <=> b[i]; cmp != 0) return cmp;
    return std::strong_ordering::equal;
  }

  friend Site operator+(Site a, const Site& b) {
    for (int i = 0; i < a.dim; ++i) a[i] += b[i];
    return a;
  }
  friend Site operator-(Site a, const Site& b) {
    for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
    return a;
  }
  friend Site operator-(Site a) {
    for (int i = 0; i < a.dim; ++i) a[i] = -a[i];
    return a;
  }

  long long norm2() const {
    long long s = 0;
    for (int i = 0; i < dim; ++i) s += static_cast<long long>(c[i]) * c[i];
    return s;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm2())); }
  int sup_norm() const {
    int m = 0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(c[i]));
    return m;
  }
  bool is_zero() const { return norm2() == 0; }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
  }
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::size_t h = static_cast<std::size_t>(s.dim);
    for (int i = 0; i < s.dim; ++i)
      h = h * 0x9E3779B97F4A7C15ull + static_cast<std::size_t>(static_cast<unsigned>(s[i]));
    return h;
  }
};

/// Axis-aligned box of Z^d. Box::cube(d, N) is Lambda_N = {-N..N}^d; general
/// rectangles are used for the tiny oracle graphs and for dual boxes.
class Box {
 public:
  Box() = default;
  Box(Site lower, Site upper) : lo_(lower), hi_(upper) {
    require(lo_.dim == hi_.dim && lo_.dim >= 1, ErrorCode::InvalidArgument, "box corners must share d >= 1");
    for (int i = 0; i < dim(); ++i)
      require(lo_[i] <= hi_[i], ErrorCode::InvalidArgument, "empty box side");
  }
  static Box cube(int d, int half_width) {
    require(half_width >= 0, ErrorCode::InvalidArgument, "half-width must be >= 0");
    Site lo = Site::zero(d), hi = Site::zero(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = -half_width;
      hi[i] = half_width;
    }
    return Box(lo, hi);
  }

  int dim() const { return lo_.dim; }
  const Site& lower() const { return lo_; }
  const Site& upper() const { return hi_; }
  int extent(int i) const { return hi_[i] - lo_[i] + 1; }

  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(extent(i));
    return n;
  }
  bool contains(const Site& s) const {
    if (s.dim != dim()) return false;
    for (int i = 0; i < dim(); ++i)
      if (s[i] < lo_[i] || s[i] > hi_[i]) return false;
    return true;
  }
  /// Row-major index with the first coordinate most significant, so index
  /// order coincides with lexicographic order of sites.
  std::size_t index(const Site& s) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * static_cast<std::size_t>(extent(i)) + static_cast<std::size_t>(s[i] - lo_[i]);
    return idx;
  }
  Site site(std::size_t idx) const {
    Site s = Site::zero(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      const auto e = static_cast<std::size_t>(extent(i));
      s[i] = lo_[i] + static_cast<int>(idx % e);
      idx /= e;
    }
    return s;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Site lo_, hi_;
};

/// Finite-range symmetric couplings J_x.
class CouplingField {
 public:
  struct Entry {
    Site offset;
    double weight;
  };

  CouplingField(int d, std::vector<Entry> entries) : dim_(d) {
    require(d >= 1 && d <= kMaxDim, ErrorCode::InvalidArgument, "unsupported dimension");
    for (auto& e : entries) {
      require(e.offset.dim == d, ErrorCode::InvalidArgument, "offset dimension mismatch");
      require(e.weight >= 0.0, ErrorCode::InvalidArgument, "couplings must be non-negative");
      if (e.weight > 0.0 && !e.offset.is_zero()) entries_.push_back(e);
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.offset < b.offset; });
    for (std::size_t i = 1; i < entries_.size(); ++i)
      require(!(entries_[i].offset == entries_[i - 1].offset), ErrorCode::InvalidArgument,
              "duplicate offset " + entries_[i].offset.str());
    for (const auto& e : entries_)
      require(weight(-e.offset) == e.weight, ErrorCode::InvalidArgument,
              "couplings must satisfy J_x = J_-x at " + e.offset.str());
    for (int i = 0; i < d; ++i) {
      Site unit = Site::zero(d);
      unit[i] = 1;
      require(weight(unit) > 0.0, ErrorCode::InvalidArgument, "nearest-neighbour couplings must be positive");
    }
    for (const auto& e : entries_) range_ = std::max(range_, e.offset.norm());
  }

  static CouplingField nearest_neighbor(int d, double j = 1.0) {
    std::vector<Entry> entries;
    for (int i = 0; i < d; ++i) {
      Site plus = Site::zero(d);
      plus[i] = 1;
      entries.push_back({plus, j});
      entries.push_back({-plus, j});
    }
    return CouplingField(d, std::move(entries));
  }

  int dim() const { return dim_; }
  double range() const { return range_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool is_nearest_neighbor() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.offset.norm2() == 1; });
  }
  double weight(const Site& offset) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), offset,
                               [](const Entry& e, const Site& s) { return e.offset < s; });
    return (it != entries_.end() && it->offset == offset) ? it->weight : 0.0;
  }

 private:
  int dim_;
  double range_ = 0.0;
  std::vector<Entry> entries_;
};

/// A bond as a pair of box indices, smaller (lexicographically) endpoint first.
struct Bond {
  std::uint32_t u;
  std::uint32_t v;
  double coupling;

  friend bool operator==(const Bond& a, const Bond& b) { return a.u == b.u && a.v == b.v; }
};

/// All bonds with both endpoints in the box, sorted by (smaller, larger)
/// endpoint in lexicographic order.
inline std::vector<Bond> edge_set(const Box& box, const CouplingField& couplings) {
  require(box.dim() == couplings.dim(), ErrorCode::InvalidArgument, "box and couplings dimension differ");
  std::vector<Bond> bonds;
  const std::size_t n = box.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Site x = box.site(i);
    for (const auto& e : couplings.entries()) {
      if (!(Site::zero(x.dim) < e.offset)) continue;  // each unordered pair once
      const Site y = x + e.offset;
      if (!box.contains(y)) continue;
      bonds.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(box.index(y)), e.weight});
    }
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond& a, const Bond& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return bonds;
}

/// {y not in A : d(y, A) <= R}, Euclidean distance, ties included.
inline std::vector<Site> outer_boundary(const std::vector<Site>& a, double radius) {
  if (a.empty()) return {};
  const int d = a.front().dim;
  const int r = static_cast<int>(std::floor(radius + 1e-12));
  const double r2 = radius * radius + 1e-9;
  std::vector<Site> offsets;
  Site o = Site::zero(d);
  // enumerate the cube [-r, r]^d
  std::function<void(int)> rec = [&](int i) {
    if (i == d) {
      if (!o.is_zero() && static_cast<double>(o.norm2()) <= r2) offsets.push_back(o);
      return;
    }
    for (int k = -r; k <= r; ++k) {
      o[i] = k;
      rec(i + 1);
    }
  };
  rec(0);
  std::set<Site> inside(a.begin(), a.end());
  std::set<Site> out;
  for (const auto& x : a)
    for (const auto& off : offsets) {
      Site y = x + off;
      if (!inside.count(y)) out.insert(y);
    }
  return {out.begin(), out.end()};
}

/// Box plus its bond list and adjacency, shared immutably by configurations
/// and samplers. Vertex index n (== size()) is the virtual exterior vertex
/// used for wired boundary conditions.
class LatticeGraph {
 public:
  struct Arc {
    std::uint32_t to;
    std::uint32_t bond;
  };

  LatticeGraph(Box box, CouplingField couplings)
      : box_(std::move(box)), couplings_(std::move(couplings)), bonds_(edge_set(box_, couplings_)) {
    const std::size_t n = box_.size();
    std::vector<std::uint32_t> degree(n, 0);
    for (const auto& b : bonds_) {
      ++degree[b.u];
      ++degree[b.v];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    arcs_.resize(offsets_[n]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t e = 0; e < bonds_.size(); ++e) {
      arcs_[fill[bonds_[e].u]++] = {bonds_[e].v, e};
      arcs_[fill[bonds_[e].v]++] = {bonds_[e].u, e};
    }
    boundary_flag_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Site x = box_.site(i);
      for (const auto& e : couplings_.entries())
        if (!box_.contains(x + e.offset)) {
          boundary_flag_[i] = 1;
          break;
        }
      if (boundary_flag_[i]) boundary_.push_back(static_cast<std::uint32_t>(i));
    }
  }

  const Box& box() const { return box_; }
  const CouplingField& couplings() const { return couplings_; }
  std::size_t num_vertices() const { return box_.size(); }
  std::uint32_t exterior() const { return static_cast<std::uint32_t>(box_.size()); }
  std::size_t num_bonds() const { return bonds_.size(); }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Bond& bond(std::size_t e) const { return bonds_[e]; }

  /// Arcs leaving vertex v (not defined for the exterior vertex).
  std::pair<const Arc*, const Arc*> arcs(std::uint32_t v) const {
    return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
  }
  /// Vertices with a J-bond leaving the box; linked to the exterior under wired bc.
  const std::vector<std::uint32_t>& boundary_vertices() const { return boundary_; }
  bool is_boundary(std::uint32_t v) const { return v < boundary_flag_.size() && boundary_flag_[v]; }

  std::size_t bond_index(std::uint32_t a, std::uint32_t b) const {
    auto [first, last] = arcs(a);
    for (auto it = first; it != last; ++it)
      if (it->to == b) return it->bond;
    throw Error(ErrorCode::InvalidArgument, "no bond between the given vertices");
  }

 private:
  Box box_;
  CouplingField couplings_;
  std::vector<Bond> bonds_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Arc> arcs_;
  std::vector<std::uint8_t> boundary_flag_;
  std::vector<std::uint32_t> boundary_;
};

}  // namespace fkrc
