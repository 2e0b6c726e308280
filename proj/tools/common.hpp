#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "fkrc/decay.hpp"
#include "fkrc/fk.hpp"
#include "fkrc/geometry.hpp"
#include "fkrc/run_config.hpp"
#include "output.hpp"

namespace fkrc::cli {

struct Context {
  RunConfig& cfg;
  const OutputDir& out;
  std::size_t threads = 1;
};

/// FK bond probability from `p` or `beta` (p = 1 - exp(-2 beta)).
inline double fk_probability(const RunConfig& cfg) {
  if (cfg.has("p") && cfg.has("beta")) throw ConfigError("beta", "beta: give p or beta, not both");
  if (cfg.has("beta")) return bond_probability(1.0, cfg.real("beta", 0.0, 1e6));
  return cfg.real("p", 0.0, 1.0 - 1e-15);
}

inline ModelParams model_params(const RunConfig& cfg) {
  const double q = cfg.real("q", 1.0, 1e9);
  return {beta_from_probability(fk_probability(cfg)), q};
}

inline ChainBudget chain_budget(const RunConfig& cfg) {
  ChainBudget b;
  b.burn_in = static_cast<std::size_t>(cfg.integer("burn_in", 500, 0, 1LL << 40));
  b.sweeps = static_cast<std::size_t>(cfg.integer("sweeps", 10000, 1, 1LL << 40));
  b.batches = static_cast<std::size_t>(cfg.integer("batches", 50, 2, 1LL << 20));
  if (b.sweeps < b.batches) throw ConfigError("sweeps", "sweeps: must be at least batches");
  return b;
}

inline BoundaryCondition boundary(const RunConfig& cfg, const std::string& fallback = "free") {
  return parse_boundary_condition(cfg.choice("bc", fallback, {"free", "wired"}));
}

inline Vec unit(const Site& s) {
  Vec v(s);
  return (1.0 / v.norm()) * v;
}

/// Analytic norm from `norm` (euclidean | l1) and `norm_scale`.
inline DirectionalNorm analytic_norm(const RunConfig& cfg, int d) {
  const auto kind = cfg.choice("norm", "euclidean", {"euclidean", "l1"});
  const double scale = cfg.real("norm_scale", 1.0, 1e-12, 1e12);
  return kind == "l1" ? DirectionalNorm::l1(d, scale) : DirectionalNorm::euclidean(d, scale);
}

/// Fixed-width number for plot-data files.
inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string site_label(const Site& s) {
  std::string out;
  for (int i = 0; i < s.dim; ++i) out += (i ? "_" : "") + std::to_string(s[i]);
  return out;
}

}  // namespace fkrc::cli
