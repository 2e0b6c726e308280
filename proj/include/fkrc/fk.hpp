#pragma once

// Finite-volume random-cluster measure: configurations, cluster counting,
// the brute-force oracle and the two Markov chain samplers.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fkrc/error.hpp"
#include "fkrc/lattice.hpp"
#include "fkrc/rng.hpp"
#include "fkrc/union_find.hpp"

namespace fkrc {

enum class BoundaryCondition { free, wired };

inline std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::wired ? "wired" : "free"; }

inline BoundaryCondition parse_boundary_condition(const std::string& s) {
  if (s == "wired") return BoundaryCondition::wired;
  if (s == "free") return BoundaryCondition::free;
  throw Error(ErrorCode::InvalidArgument, "bc must be 'wired' or 'free', got '" + s + "'");
}

struct ModelParams {
  double beta = 0.0;
  double q = 1.0;

  void validate() const {
    require(beta >= 0.0 && std::isfinite(beta), ErrorCode::InvalidArgument, "beta must be finite and >= 0");
    require(q >= 1.0 && std::isfinite(q), ErrorCode::InvalidArgument, "q must be >= 1");
  }
  bool integer_q() const { return q == std::floor(q); }
};

/// p_e = 1 - exp(-2 beta J_e).
inline double bond_probability(double coupling, double beta) { return -std::expm1(-2.0 * beta * coupling); }

/// Inverse of bond_probability for unit coupling.
inline double beta_from_probability(double p) {
  require(p >= 0.0 && p < 1.0, ErrorCode::InvalidArgument, "p must lie in [0, 1)");
  return -0.5 * std::log1p(-p);
}

using GraphPtr = std::shared_ptr<const LatticeGraph>;

inline GraphPtr make_graph(const Box& box, const CouplingField& couplings) {
  return std::make_shared<const LatticeGraph>(box, couplings);
}

/// omega: one state per bond of edge_set(box), canonical order, plus the bc tag.
struct BondConfiguration {
  GraphPtr graph;
  BoundaryCondition bc = BoundaryCondition::free;
  std::vector<std::uint8_t> open;

  BondConfiguration() = default;
  BondConfiguration(GraphPtr g, BoundaryCondition b) : graph(std::move(g)), bc(b), open(graph->num_bonds(), 0) {}

  std::size_t num_bonds() const { return open.size(); }
  bool wired() const { return bc == BoundaryCondition::wired; }

  std::uint64_t mask() const {
    require(open.size() <= 64, ErrorCode::TooManyBonds, "mask needs <= 64 bonds");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < open.size(); ++i)
      if (open[i]) m |= std::uint64_t{1} << i;
    return m;
  }
  void set_mask(std::uint64_t m) {
    for (std::size_t i = 0; i < open.size(); ++i) open[i] = (m >> i) & 1u;
  }

  friend bool operator==(const BondConfiguration& a, const BondConfiguration& b) {
    return a.bc == b.bc && a.open == b.open && a.graph->box() == b.graph->box();
  }
};

/// Cluster identifiers for every vertex; index num_vertices() is the exterior
/// vertex (meaningful under wired bc only).
struct ClusterLabeling {
  std::vector<std::uint32_t> label;
  std::size_t count = 0;  ///< clusters intersecting the box
};

inline void link_clusters(const BondConfiguration& omega, UnionFind& uf) {
  const auto& g = *omega.graph;
  uf.reset(g.num_vertices() + 1);
  if (omega.wired())
    for (auto v : g.boundary_vertices()) uf.unite(g.exterior(), v);
  for (std::size_t e = 0; e < omega.open.size(); ++e)
    if (omega.open[e]) uf.unite(g.bond(e).u, g.bond(e).v);
}

inline ClusterLabeling cluster_labeling(const BondConfiguration& omega) {
  const auto& g = *omega.graph;
  UnionFind uf;
  link_clusters(omega, uf);
  const std::size_t n = g.num_vertices();
  ClusterLabeling out;
  out.label.assign(n + 1, 0);
  std::vector<std::uint32_t> id(n + 1, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v <= n; ++v) {
    const auto r = uf.find(v);
    if (id[r] == std::numeric_limits<std::uint32_t>::max()) {
      if (v == n) {
        id[r] = next;  // isolated exterior: labelled but not counted
        out.label[v] = next++;
        continue;
      }
      id[r] = next++;
      ++out.count;
    }
    out.label[v] = id[r];
  }
  return out;
}

/// Unnormalised weight prod p^w (1-p)^(1-w) q^N(omega).
inline double config_weight(const BondConfiguration& omega, const ModelParams& params) {
  params.validate();
  double w = 1.0;
  for (std::size_t e = 0; e < omega.open.size(); ++e) {
    const double p = bond_probability(omega.graph->bond(e).coupling, params.beta);
    w *= omega.open[e] ? p : 1.0 - p;
  }
  return w * std::pow(params.q, static_cast<double>(cluster_labeling(omega).count));
}

/// Probability table over all 2^|E| configurations; entry m is the
/// configuration whose bit i is bond i.
struct ExactDistribution {
  GraphPtr graph;
  BoundaryCondition bc = BoundaryCondition::free;
  std::vector<double> prob;

  std::size_t num_bonds() const { return graph->num_bonds(); }

  /// P(all bonds in `subset` are open).
  double all_open(std::uint64_t subset) const {
    double s = 0.0;
    for (std::uint64_t m = 0; m < prob.size(); ++m)
      if ((m & subset) == subset) s += prob[m];
    return s;
  }
  double bond_marginal(std::size_t e) const { return all_open(std::uint64_t{1} << e); }
};

inline constexpr std::size_t kEnumerationCap = 24;

inline ExactDistribution exact_distribution(GraphPtr graph, const ModelParams& params, BoundaryCondition bc) {
  params.validate();
  const std::size_t m = graph->num_bonds();
  require(m <= kEnumerationCap, ErrorCode::TooManyBonds,
          std::to_string(m) + " bonds exceeds the enumeration cap of " + std::to_string(kEnumerationCap));
  ExactDistribution out{graph, bc, {}};
  const std::size_t states = std::size_t{1} << m;
  out.prob.resize(states);
  std::vector<double> log_p(m), log_q(m);
  for (std::size_t e = 0; e < m; ++e) {
    const double p = bond_probability(graph->bond(e).coupling, params.beta);
    log_p[e] = std::log(p);
    log_q[e] = std::log1p(-p);
  }
  BondConfiguration omega(graph, bc);
  const double log_cluster = std::log(params.q);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < states; ++s) {
    omega.set_mask(s);
    double lw = static_cast<double>(cluster_labeling(omega).count) * log_cluster;
    for (std::size_t e = 0; e < m; ++e) lw += omega.open[e] ? log_p[e] : log_q[e];
    out.prob[s] = lw;
    if (lw > max_log) max_log = lw;
  }
  double z = 0.0;
  for (auto& w : out.prob) {
    w = std::exp(w - max_log);  // exp(-inf) == 0 for p = 0 bonds
    z += w;
  }
  for (auto& w : out.prob) w /= z;
  return out;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), ErrorCode::InvalidArgument, "distributions differ in support size");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

/// Graph searches over the open subgraph of a configuration. Keeps its
/// scratch buffers between calls; one probe per chain.
class ConnectivityProbe {
 public:
  explicit ConnectivityProbe(const LatticeGraph& g) : graph_(&g), mark_(g.num_vertices() + 1, 0) {}

  /// Interleaved search from u and v over open bonds other than `skip`.
  /// When they are not joined, exhausted() lists the component that ran out
  /// first (it contains u or v).
  bool joined(std::uint32_t u, std::uint32_t v, std::size_t skip, const std::vector<std::uint8_t>& open, bool wired) {
    if (u == v) return true;
    next_epoch();
    const std::uint32_t ea = epoch_, eb = epoch_ + 1;
    qa_.clear();
    qb_.clear();
    qa_.push_back(u);
    qb_.push_back(v);
    mark_[u] = ea;
    mark_[v] = eb;
    std::size_t ia = 0, ib = 0;
    while (true) {
      if (ia == qa_.size()) {
        exhausted_ = &qa_;
        exhausted_mark_ = ea;
        return false;
      }
      if (expand(qa_[ia++], ea, eb, qa_, skip, open, wired)) return true;
      if (ib == qb_.size()) {
        exhausted_ = &qb_;
        exhausted_mark_ = eb;
        return false;
      }
      if (expand(qb_[ib++], eb, ea, qb_, skip, open, wired)) return true;
    }
  }

  const std::vector<std::uint32_t>& exhausted() const { return *exhausted_; }
  bool in_exhausted(std::uint32_t v) const { return mark_[v] == exhausted_mark_; }

  /// Breadth-first search from s; true as soon as a vertex with target[v] != 0
  /// is reached. component() holds the visited vertices.
  bool reaches(std::uint32_t s, const std::vector<std::uint8_t>& target, std::size_t skip,
               const std::vector<std::uint8_t>& open, bool wired, bool stop_early = true) {
    next_epoch();
    const std::uint32_t ea = epoch_;
    qa_.clear();
    qa_.push_back(s);
    mark_[s] = ea;
    bool hit = target[s] != 0;
    if (hit && stop_early) return true;
    for (std::size_t i = 0; i < qa_.size(); ++i) {
      const std::size_t before = qa_.size();
      expand(qa_[i], ea, ea, qa_, skip, open, wired);
      for (std::size_t j = before; j < qa_.size(); ++j)
        if (target[qa_[j]]) {
          hit = true;
          if (stop_early) return true;
        }
    }
    return hit;
  }

  const std::vector<std::uint32_t>& component() const { return qa_; }

 private:
  void next_epoch() {
    if (epoch_ > std::numeric_limits<std::uint32_t>::max() - 4) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
    epoch_ += 2;
  }

  // Pushes unvisited neighbours of x; true when a vertex of the other side is met.
  bool expand(std::uint32_t x, std::uint32_t mine, std::uint32_t other, std::vector<std::uint32_t>& queue,
              std::size_t skip, const std::vector<std::uint8_t>& open, bool wired) {
    const auto visit = [&](std::uint32_t w) {
      if (mark_[w] == other && other != mine) return true;
      if (mark_[w] != mine) {
        mark_[w] = mine;
        queue.push_back(w);
      }
      return false;
    };
    if (x == graph_->exterior()) {
      for (auto b : graph_->boundary_vertices())
        if (visit(b)) return true;
      return false;
    }
    auto [first, last] = graph_->arcs(x);
    for (auto a = first; a != last; ++a)
      if (a->bond != skip && open[a->bond] && visit(a->to)) return true;
    if (wired && graph_->is_boundary(x) && visit(graph_->exterior())) return true;
    return false;
  }

  const LatticeGraph* graph_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 1;
  std::uint32_t exhausted_mark_ = 0;
  std::vector<std::uint32_t> qa_, qb_;
  const std::vector<std::uint32_t>* exhausted_ = &qa_;
};

/// x <-> y through open bonds (and the exterior vertex under wired bc).
inline bool connected(const BondConfiguration& omega, std::uint32_t x, std::uint32_t y) {
  ConnectivityProbe probe(*omega.graph);
  return probe.joined(x, y, std::numeric_limits<std::size_t>::max(), omega.open, omega.wired());
}

/// An open path x -> y whose vertices, except possibly y, all lie in `a`
/// (a membership mask over box vertices). Requires x in a.
inline bool restricted_connected(const BondConfiguration& omega, const std::vector<std::uint8_t>& a, std::uint32_t x,
                                 std::uint32_t y) {
  const auto& g = *omega.graph;
  require(x < a.size() && a[x], ErrorCode::InvalidArgument, "x must belong to A");
  if (x == y) return true;
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<std::uint32_t> queue{x};
  seen[x] = 1;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto [first, last] = g.arcs(queue[i]);
    for (auto arc = first; arc != last; ++arc) {
      if (!omega.open[arc->bond] || seen[arc->to]) continue;
      if (arc->to == y) return true;
      seen[arc->to] = 1;
      if (a[arc->to]) queue.push_back(arc->to);
    }
  }
  return false;
}

/// Conditioning event {source <-> target set}; target is a mask over the box
/// vertices plus the exterior vertex.
struct ConnectionEvent {
  std::uint32_t source = 0;
  std::vector<std::uint8_t> target;
  std::size_t targets = 0;  ///< number of set entries in `target`, 0 if not counted

  static ConnectionEvent between(const LatticeGraph& g, std::uint32_t s, std::uint32_t t) {
    ConnectionEvent ev{s, std::vector<std::uint8_t>(g.num_vertices() + 1, 0), 1};
    ev.target[t] = 1;
    return ev;
  }
};

/// Single-bond heat bath for real q >= 1. Each bond is redrawn from its exact
/// conditional law given all other bonds: p_e when its endpoints are joined
/// off e, p_e / (p_e + q (1 - p_e)) otherwise. With a ConnectionEvent the
/// chain targets the measure conditioned on that (increasing) event.
class HeatBath {
 public:
  HeatBath(GraphPtr graph, const ModelParams& params)
      : graph_(std::move(graph)), params_(params), probe_(*graph_) {
    params_.validate();
    p_.reserve(graph_->num_bonds());
    for (const auto& b : graph_->bonds()) p_.push_back(bond_probability(b.coupling, params_.beta));
  }

  double open_probability(const BondConfiguration& omega, std::size_t e) {
    const auto& b = graph_->bond(e);
    const bool joined = probe_.joined(b.u, b.v, e, omega.open, omega.wired());
    return joined ? p_[e] : p_[e] / (p_[e] + params_.q * (1.0 - p_[e]));
  }

  void sweep(BondConfiguration& omega, Rng& rng, const ConnectionEvent* event = nullptr) {
    for (std::size_t e = 0; e < omega.open.size(); ++e) update(omega, e, rng, event);
  }

  void update(BondConfiguration& omega, std::size_t e, Rng& rng, const ConnectionEvent* event = nullptr) {
    const double u = rng.uniform();
    const double pe = p_[e];
    const double lo = pe / (pe + params_.q * (1.0 - pe));
    // the connectivity query only matters when u falls between the two
    // conditional probabilities, or when an open bond under an event closes
    if (u < lo) {
      omega.open[e] = 1;
      return;
    }
    const bool guarded = event && omega.open[e];
    if (u >= pe && !guarded) {
      omega.open[e] = 0;
      return;
    }
    const auto& b = graph_->bond(e);
    const bool joined = probe_.joined(b.u, b.v, e, omega.open, omega.wired());
    bool next = u < (joined ? pe : lo);
    if (!next && guarded && !joined && closing_breaks(omega, e, *event)) next = true;  // forced open
    omega.open[e] = next;
  }

  ConnectivityProbe& probe() { return probe_; }
  const ModelParams& params() const { return params_; }

 private:
  // Called right after an unsuccessful joined() query for bond e, so the
  // probe still holds the exhausted side of the cut.
  bool closing_breaks(const BondConfiguration& omega, std::size_t e, const ConnectionEvent& ev) {
    std::size_t on_side = 0;
    for (auto v : probe_.exhausted()) on_side += ev.target[v] != 0;
    if (probe_.in_exhausted(ev.source)) return on_side == 0;
    if (on_side == 0) return false;
    if (on_side == ev.targets) return true;  // every target is cut off from the source
    return !probe_.reaches(ev.source, ev.target, e, omega.open, omega.wired());
  }

  GraphPtr graph_;
  ModelParams params_;
  std::vector<double> p_;
  ConnectivityProbe probe_;
};

/// Swendsen-Wang through the Edwards-Sokal coupling (integer q). Colours are
/// 0..q-1; under wired bc the exterior cluster always carries colour 0.
class SwendsenWang {
 public:
  SwendsenWang(GraphPtr graph, const ModelParams& params) : graph_(std::move(graph)), params_(params) {
    params_.validate();
    require(params_.integer_q() && params_.q >= 2.0, ErrorCode::NonIntegerQ,
            "Swendsen-Wang needs integer q >= 2, got " + std::to_string(params_.q));
    q_ = static_cast<std::uint32_t>(params_.q);
    for (const auto& b : graph_->bonds()) p_.push_back(bond_probability(b.coupling, params_.beta));
  }

  std::uint32_t colours() const { return q_; }

  /// One bonds|spins then spins|bonds step. `spins` has one entry per box vertex.
  void step(BondConfiguration& omega, std::vector<std::uint8_t>& spins, Rng& rng) {
    const auto& g = *graph_;
    for (std::size_t e = 0; e < omega.open.size(); ++e) {
      const double u = rng.uniform();
      const auto& b = g.bond(e);
      omega.open[e] = spins[b.u] == spins[b.v] && u < p_[e];
    }
    recolour(omega, spins, rng);
  }

  void recolour(const BondConfiguration& omega, std::vector<std::uint8_t>& spins, Rng& rng) {
    const auto& g = *graph_;
    link_clusters(omega, uf_);
    const std::size_t n = g.num_vertices();
    colour_of_root_.assign(n + 1, kUnset);
    if (omega.wired()) colour_of_root_[uf_.find(g.exterior())] = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      const auto r = uf_.find(v);
      if (colour_of_root_[r] == kUnset) colour_of_root_[r] = static_cast<std::uint8_t>(rng.below(q_));
      spins[v] = colour_of_root_[r];
    }
  }

 private:
  static constexpr std::uint8_t kUnset = 0xff;
  GraphPtr graph_;
  ModelParams params_;
  std::uint32_t q_ = 2;
  std::vector<double> p_;
  UnionFind uf_;
  std::vector<std::uint8_t> colour_of_root_;
};

enum class Sampler { heat_bath, swendsen_wang };

inline Sampler parse_sampler(const std::string& s) {
  if (s == "heat_bath") return Sampler::heat_bath;
  if (s == "swendsen_wang") return Sampler::swendsen_wang;
  throw Error(ErrorCode::InvalidArgument, "sampler must be heat_bath or swendsen_wang, got '" + s + "'");
}

struct ChainSettings {
  Sampler sampler = Sampler::heat_bath;
  std::size_t burn_in = 0;
  std::size_t n_samples = 0;
  std::size_t thinning = 1;  ///< sweeps between emitted samples (0 is read as 1)
  std::uint64_t seed = 0;
};

/// Runs one chain from the all-closed configuration and hands every emitted
/// configuration to `sink` (called as sink(const BondConfiguration&)).
template <class Sink>
void sample_chain(GraphPtr graph, const ModelParams& params, BoundaryCondition bc, const ChainSettings& s, Sink&& sink) {
  Rng rng(s.seed);
  BondConfiguration omega(graph, bc);
  const std::size_t gap = s.thinning == 0 ? 1 : s.thinning;
  if (s.sampler == Sampler::heat_bath) {
    HeatBath hb(graph, params);
    for (std::size_t i = 0; i < s.burn_in; ++i) hb.sweep(omega, rng);
    for (std::size_t k = 0; k < s.n_samples; ++k) {
      for (std::size_t i = 0; i < gap; ++i) hb.sweep(omega, rng);
      sink(static_cast<const BondConfiguration&>(omega));
    }
  } else {
    SwendsenWang sw(graph, params);
    std::vector<std::uint8_t> spins(graph->num_vertices(), 0);
    sw.recolour(omega, spins, rng);
    for (std::size_t i = 0; i < s.burn_in; ++i) sw.step(omega, spins, rng);
    for (std::size_t k = 0; k < s.n_samples; ++k) {
      for (std::size_t i = 0; i < gap; ++i) sw.step(omega, spins, rng);
      sink(static_cast<const BondConfiguration&>(omega));
    }
  }
}

inline std::vector<BondConfiguration> sample_chain(GraphPtr graph, const ModelParams& params, BoundaryCondition bc,
                                                   const ChainSettings& s) {
  std::vector<BondConfiguration> out;
  out.reserve(s.n_samples);
  sample_chain(std::move(graph), params, bc, s, [&](const BondConfiguration& w) { out.push_back(w); });
  return out;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Dump: header line, then the bond states as hex; hex digit j holds bonds
/// 4j..4j+3 with bond 4j in the least significant bit.
inline std::string dump_configuration(const BondConfiguration& omega, const ModelParams& params, std::uint64_t seed) {
  const Box& box = omega.graph->box();
  const int half = box.upper()[0];
  require(box == Box::cube(box.dim(), half), ErrorCode::InvalidArgument, "dumps are defined for Lambda_N boxes");
  std::string out = "fk d=" + std::to_string(box.dim()) + " N=" + std::to_string(half) + " q=" + format_double(params.q) +
                    " beta=" + format_double(params.beta) + " bc=" + to_string(omega.bc) + " seed=" + std::to_string(seed) +
                    "\n";
  static constexpr char kHex[] = "0123456789abcdef";
  const std::size_t m = omega.open.size();
  for (std::size_t j = 0; j * 4 < m; ++j) {
    unsigned nibble = 0;
    for (std::size_t b = 0; b < 4 && j * 4 + b < m; ++b) nibble |= static_cast<unsigned>(omega.open[j * 4 + b]) << b;
    out += kHex[nibble];
  }
  out += "\n";
  return out;
}

struct ParsedDump {
  BondConfiguration omega;
  ModelParams params;
  std::uint64_t seed = 0;
};

/// Reads a dump written by dump_configuration; couplings are nearest-neighbour.
inline ParsedDump parse_configuration(const std::string& text) {
  std::istringstream in(text);
  std::string header, bits;
  std::getline(in, header);
  std::getline(in, bits);
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  require(tag == "fk", ErrorCode::InvalidArgument, "dump must start with 'fk'");
  int d = -1, n = -1;
  ParsedDump out;
  std::string bc = "free";
  std::string kv;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, ErrorCode::InvalidArgument, "malformed header token '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "d") d = std::stoi(val);
    else if (key == "N") n = std::stoi(val);
    else if (key == "q") out.params.q = std::stod(val);
    else if (key == "beta") out.params.beta = std::stod(val);
    else if (key == "bc") bc = val;
    else if (key == "seed") out.seed = std::stoull(val);
  }
  require(d >= 1 && n >= 0, ErrorCode::InvalidArgument, "dump header lacks d or N");
  auto graph = make_graph(Box::cube(d, n), CouplingField::nearest_neighbor(d));
  out.omega = BondConfiguration(graph, parse_boundary_condition(bc));
  const std::size_t m = graph->num_bonds();
  require(bits.size() == (m + 3) / 4, ErrorCode::InvalidArgument, "bit string length does not match the bond count");
  for (std::size_t j = 0; j < bits.size(); ++j) {
    const char c = bits[j];
    const int nibble = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
    require(nibble >= 0, ErrorCode::InvalidArgument, "non-hex character in dump");
    for (std::size_t b = 0; b < 4 && j * 4 + b < m; ++b) out.omega.open[j * 4 + b] = (nibble >> b) & 1;
  }
  return out;
}

}  // namespace fkrc
