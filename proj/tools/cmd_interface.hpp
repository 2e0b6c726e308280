#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "common.hpp"
#include "fkrc/invariance.hpp"
#include "fkrc/potts.hpp"

namespace fkrc::cli {

namespace detail {

inline InterfaceSamplerConfig interface_config(const RunConfig& cfg) {
  InterfaceSamplerConfig ic;
  if (cfg.real("q", 2.0, 1.0, 1e9) != 2.0) throw ConfigError("q", "q: the interface sampler supports q = 2 only");
  if (cfg.has("beta") && cfg.has("beta_over_sd")) throw ConfigError("beta_over_sd", "beta_over_sd: give beta or beta_over_sd, not both");
  ic.beta = cfg.has("beta") ? cfg.real("beta", 1e-9, 1e6) : cfg.real("beta_over_sd", 1e-9, 1e6) * potts_self_dual_beta(2);
  ic.n = static_cast<int>(cfg.integer("N", 1, 100000));
  ic.profiles = static_cast<std::size_t>(cfg.integer("profiles", 1, 1LL << 30));
  ic.m = static_cast<std::size_t>(cfg.integer("m", 16, 2, 1000000));
  ic.delta = cfg.real("delta", 0.5, 1e-9, 1 - 1e-9);
  ic.chains = static_cast<std::size_t>(cfg.integer("worms", 8, 1, 1 << 20));
  ic.tune_stages = static_cast<int>(cfg.integer("tune_stages", 16, 0, 1000));
  ic.tune_sweeps = cfg.real("tune_sweeps", 40.0, 1.0, 1e9);
  ic.pilot_sweeps = cfg.real("pilot_sweeps", 400.0, 1.0, 1e9);
  ic.seed = cfg.u64("seed");
  if (ic.profiles < ic.chains) throw ConfigError("profiles", "profiles: fewer than worms");
  return ic;
}

inline std::string variance_dat(const std::vector<double>& r, const std::vector<double>& var, double chi) {
  std::ostringstream os;
  os << "# r var_phi chi_r_1mr\n";
  for (std::size_t k = 0; k < r.size(); ++k) os << num(r[k]) << ' ' << num(var[k]) << ' ' << num(chi * r[k] * (1 - r[k])) << '\n';
  return os.str();
}

/// Profiles from a CSV with columns sample_id,r,phi.
inline std::vector<InterfaceProfile> read_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("profiles_file", "profiles_file: cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (fkrc::detail::trim(line) != "sample_id,r,phi") throw ConfigError("profiles_file", "profiles_file: expected header sample_id,r,phi");
  std::map<long long, InterfaceProfile> by_id;
  for (int no = 2; std::getline(in, line); ++no) {
    if (fkrc::detail::trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ConfigError("profiles_file", "profiles_file: bad row at line " + std::to_string(no));
    try {
      auto& p = by_id[std::stoll(a)];
      p.r.push_back(std::stod(b));
      p.phi.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ConfigError("profiles_file", "profiles_file: bad number at line " + std::to_string(no));
    }
  }
  std::vector<InterfaceProfile> out;
  for (auto& [id, p] : by_id) {
    p.column_phi = p.phi;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

inline int cmd_interface(Context& ctx) {
  const auto ic = detail::interface_config(ctx.cfg);
  ctx.cfg.reject_unused();
  const auto profiles = sample_interface_profiles(ic, ctx.threads);
  std::ostringstream csv;
  write_profile_csv_header(csv);
  for (std::size_t i = 0; i < profiles.size(); ++i) write_profile_csv(csv, i, profiles[i]);
  ctx.out.write("profiles.csv", csv.str());
  std::vector<double> var(ic.m + 1, 0.0);
  for (const auto& p : profiles)
    for (std::size_t k = 0; k <= ic.m; ++k) var[k] += p.phi[k] * p.phi[k] / static_cast<double>(profiles.size());
  ctx.out.write("variance.dat", detail::variance_dat(profiles.front().r, var, 0.0));
  std::cout << "wrote " << profiles.size() << " profiles at N=" << ic.n << "\n";
  return 0;
}

inline int cmd_bridge(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto source = cfg.choice("source", "interface", {"interface", "simulate", "file"});
  std::vector<InterfaceProfile> profiles;
  std::optional<double> reference;
  if (cfg.has("reference_chi")) reference = cfg.real("reference_chi", 1e-12, 1e12);
  const bool column = cfg.boolean("column", false);
  const auto min_profiles = static_cast<std::size_t>(cfg.integer("min_profiles", 1000, 2, 1LL << 30));
  if (source == "simulate") {
    const auto count = static_cast<std::size_t>(cfg.integer("profiles", 1, 1LL << 30));
    const auto m = static_cast<std::size_t>(cfg.integer("m", 16, 2, 1000000));
    const double chi = cfg.real("chi", 1.0, 0.0, 1e12);
    const auto seed = cfg.u64("seed");
    cfg.reject_unused();
    profiles = simulate_brownian_bridges(count, m, chi, seed);
  } else if (source == "file") {
    const auto path = cfg.str("profiles_file");
    cfg.reject_unused();
    profiles = detail::read_profiles(path);
  } else {
    const auto ic = detail::interface_config(cfg);
    cfg.reject_unused();
    profiles = sample_interface_profiles(ic, ctx.threads);
  }
  const auto t = bridge_covariance_test(profiles, reference, column, min_profiles);
  std::ostringstream rep;
  rep << "quantity,value\nprofiles," << profiles.size() << "\nchi," << format_double(t.chi.value) << "\nchi_lo,"
      << format_double(t.chi.lo) << "\nchi_hi," << format_double(t.chi.hi) << "\nr2," << format_double(t.r2)
      << "\nkurtosis," << format_double(t.kurtosis) << "\nmax_cov_deviation," << format_double(t.max_cov_deviation)
      << "\nendpoint_variance," << format_double(t.endpoint_variance) << "\n";
  if (t.reference) rep << "reference_chi," << format_double(*t.reference) << "\nrelative_gap," << format_double(*t.relative_gap) << "\n";
  ctx.out.write("bridge.csv", rep.str());
  ctx.out.write("variance.dat", detail::variance_dat(t.r, t.variance, t.chi.value));
  std::cout << "chi = " << t.chi.value << " [" << t.chi.lo << ", " << t.chi.hi << "], R^2 " << t.r2 << ", kurtosis "
            << t.kurtosis << "\n";
  return 0;
}

}  // namespace fkrc::cli
