// Acceptance run: one PASS/FAIL line per criterion. --quick shrinks every
// budget (for trying the harness; quick results are not the verdict).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fkrc/analysis.hpp"
#include "fkrc/clustergeo.hpp"
#include "fkrc/conditioned.hpp"
#include "fkrc/decay.hpp"
#include "fkrc/duality.hpp"
#include "fkrc/fk.hpp"
#include "fkrc/geometry.hpp"
#include "fkrc/invariance.hpp"
#include "fkrc/ising.hpp"
#include "fkrc/potts.hpp"

using namespace fkrc;

namespace {

struct Options {
  bool quick = false;
  std::size_t threads = 1;
  std::uint64_t seed = 20240601;
  std::string cli, configs;
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string ci(const EstimateWithCI& e) { return fmt("%.4g [%.4g, %.4g]", e.value, e.lo, e.hi); }

void progress(const std::string& what) {
  static const auto start = std::chrono::steady_clock::now();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << fmt("[%7.1fs] ", s) << what << std::endl;
}

/// |a - b| within the joint 95% bound.
bool jointly_consistent(const EstimateWithCI& a, const EstimateWithCI& b) {
  return std::abs(a.value - b.value) <= kZ95 * std::hypot(a.se(), b.se());
}

double fk_p_for_beta_fraction(double q, double fraction) {
  return bond_probability(1.0, fraction * beta_from_probability(self_dual_point(q)));
}

class Acceptance {
 public:
  explicit Acceptance(Options o) : opt_(std::move(o)) {}

  // 1 --------------------------------------------------------------------
  Verdict oracle_equivalence() {
    const std::size_t n = opt_.quick ? 100000 : 1000000;
    const std::vector<std::pair<std::string, Box>> graphs{
        {"bond", Box(Site{0}, Site{1})}, {"2x2", Box(Site{0, 0}, Site{1, 1})}, {"2x3", Box(Site{0, 0}, Site{1, 2})}};
    double worst_hb = 0, worst_sw = 0;
    std::string where_hb, where_sw;
    std::uint64_t stream = 0;
    for (const auto& [name, box] : graphs) {
      auto g = make_graph(box, CouplingField::nearest_neighbor(box.dim()));
      for (double q : {1.0, 1.5, 2.0, 3.0})
        for (double p : {0.3, 0.6})
          for (auto bc : {BoundaryCondition::wired, BoundaryCondition::free}) {
            const ModelParams params{beta_from_probability(p), q};
            const auto exact = exact_distribution(g, params, bc);
            std::vector<Sampler> samplers{Sampler::heat_bath};
            if (params.integer_q() && params.q >= 2) samplers.push_back(Sampler::swendsen_wang);
            for (auto s : samplers) {
              std::vector<double> hist(exact.prob.size(), 0.0);
              sample_chain(g, params, bc, {s, 1000, n, 1, Rng(opt_.seed, 0x100 + stream++)()},
                           [&](const BondConfiguration& w) { hist[w.mask()] += 1.0 / static_cast<double>(n); });
              const double tv = total_variation(hist, exact.prob);
              const auto label = fmt("%s q=%g p=%g %s", name.c_str(), q, p, to_string(bc).c_str());
              auto& worst = s == Sampler::heat_bath ? worst_hb : worst_sw;
              auto& where = s == Sampler::heat_bath ? where_hb : where_sw;
              if (tv > worst) worst = tv, where = label;
            }
          }
    }
    return {worst_hb < 0.01 && worst_sw < 0.01,
            fmt("max TV heat-bath %.4f (%s), Swendsen-Wang %.4f (%s), %zu samples each, bound 0.01", worst_hb,
                where_hb.c_str(), worst_sw, where_sw.c_str(), n)};
  }

  // 2 --------------------------------------------------------------------
  Verdict duality() {
    DualLattice dl(make_graph(Box(Site{0, 0}, Site{1, 1}), CouplingField::nearest_neighbor(2)));
    double tv = 0;
    for (double q : {1.0, 1.5, 2.0, 3.0, 4.0})
      for (double p : {0.3, 0.5, 0.6}) tv = std::max(tv, measure_duality_tv(dl, p, q));
    double inv = 0;
    for (double q : {1.0, 2.0, 3.5, 10.0})
      for (int k = 1; k < 100; ++k) {
        const double p = k / 100.0;
        inv = std::max(inv, std::abs(dual_parameter(dual_parameter(p, q), q) - p));
      }
    const double sd1 = std::abs(self_dual_point(1.0) - 0.5);
    double sdq = 0;
    for (double q : {2.0, 4.0}) sdq = std::max(sdq, std::abs(self_dual_point(q) - std::sqrt(q) / (1 + std::sqrt(q))));
    return {tv < 1e-10 && inv <= 1e-12 && sd1 <= 1e-10 && sdq <= 1e-10,
            fmt("TV %.2e (bound 1e-10), involution %.2e (1e-12), self-dual |err| q=1 %.1e, q=2,4 %.1e (1e-10)", tv, inv,
                sd1, sdq)};
  }

  // 3 --------------------------------------------------------------------
  ChainBudget bridge_budget() const {
    return opt_.quick ? ChainBudget{200, 3000, 20} : ChainBudget{2000, 125000, 50};
  }

  /// P(0 <-> n step) from bridge chains, n|step| covering [8, 40].
  const BridgeChains& bridges(double q, double p, const Site& step) {
    const auto key = fmt("%g %g %s", q, p, step.str().c_str());
    if (auto it = bridges_.find(key); it != bridges_.end()) return it->second;
    BridgeConfig cfg;
    cfg.params = {beta_from_probability(p), q};
    cfg.step = step;
    cfg.k_max = static_cast<int>(std::floor(40.0 / step.norm() + 1e-9));
    if (cfg.k_max * step.norm() < 40.0 - 1e-9) ++cfg.k_max;
    cfg.margin = 8;
    cfg.spread = 3;
    cfg.budget = bridge_budget();
    cfg.seed = Rng(opt_.seed, 0x300 + bridges_.size())();
    cfg.threads = opt_.threads;
    progress("bridge chains " + key + " start");
    auto res = run_bridge_chains(cfg);
    progress("bridge chains " + key + fmt(" done, %zu sweeps", res.total_sweeps));
    return bridges_.emplace(key, std::move(res)).first->second;
  }

  DecaySeries bridge_range(const BridgeChains& bc, double lo, double hi) {
    const double len = bc.config.step.norm();
    const int n_lo = static_cast<int>(std::ceil(lo / len - 1e-9));
    const int n_hi = std::min(bc.config.k_max, static_cast<int>(std::floor(hi / len + 1e-9)));
    return bridge_series(bc, n_lo, n_hi);
  }

  Verdict oz_exponent() {
    const double p2 = fk_p_for_beta_fraction(2.0, 0.7);
    std::size_t sweeps = 0;
    bool pass = true;
    std::string detail;
    for (auto [q, p] : {std::pair{1.0, 0.3}, std::pair{2.0, p2}}) {
      const auto& bc = bridges(q, p, Site{1, 0});
      sweeps += bc.total_sweeps;
      const auto fit = oz_exponent_fit(bridge_range(bc, 8, 40), 2);
      const bool ok = fit.alpha.covers(0.5) && !fit.alpha.covers(0.0) && !fit.alpha.covers(1.0);
      pass = pass && ok;
      detail += fmt("q=%g p=%.4f: alpha %s xi %s; ", q, p, ci(fit.alpha).c_str(), ci(fit.xi).c_str());
    }
    const bool enough = opt_.quick || sweeps >= 10000000;
    return {pass && enough, detail + fmt("%zu sweeps total (need >= 1e7)", sweeps)};
  }

  /// xi(e1) at q = 1, p = 0.3 from the free-exponent fit of criterion 3.
  EstimateWithCI xi_e1() { return oz_exponent_fit(bridge_range(bridges(1.0, 0.3, Site{1, 0}), 8, 40), 2).xi; }

  // 4 --------------------------------------------------------------------
  Verdict exit_law() {
    const ModelParams params{beta_from_probability(0.3), 1.0};
    const ChainBudget budget = opt_.quick ? ChainBudget{200, 4000, 20} : ChainBudget{2000, 100000, 50};
    progress("exit chains start");
    const auto nc = run_exit_chains(params, 2, 16, 8, budget, Rng(opt_.seed, 0x400)(), opt_.threads);
    progress("exit chains done");
    const auto rates = exit_rates(nc, 4, 16);
    auto mean_of = [&](std::size_t a, std::size_t b) {
      double m = 0, v = 0;
      for (std::size_t i = a; i <= b; ++i) m += rates[i].value, v += rates[i].se() * rates[i].se();
      const double k = static_cast<double>(b - a + 1);
      return std::pair{m / k, std::sqrt(v) / k};
    };
    const auto [late, late_se] = mean_of(10, 12);   // N = 14..16
    const auto [early, early_se] = mean_of(7, 9);   // N = 11..13
    const bool converge = std::abs(late - early) <= 3 * std::hypot(late_se, early_se);
    const auto xi = xi_e1();
    const bool overlap = jointly_consistent(rates.back(), xi);
    double exact_err = 0;
    for (double p : {0.3, 0.6})
      for (int n = 1; n <= 8; ++n)
        exact_err = std::max(exact_err, std::abs(exit_probability_1d(p, n) -
                                                 exit_probability_1d_enumerated({beta_from_probability(p), 1.0}, n)));
    return {converge && overlap && exact_err <= 1e-12,
            fmt("rate N=11..13 %.4f, N=14..16 %.4f (|diff| %.4f, 3 joint sigma %.4f); rate N=16 %s vs xi(e1) %s; "
                "d=1 closed form vs enumeration max err %.1e",
                early, late, std::abs(late - early), 3 * std::hypot(late_se, early_se), ci(rates.back()).c_str(),
                ci(xi).c_str(), exact_err)};
  }

  // 5 --------------------------------------------------------------------
  Verdict wired_escape() {
    const ModelParams params{beta_from_probability(0.3), 1.0};
    const ChainBudget budget = opt_.quick ? ChainBudget{200, 4000, 20} : ChainBudget{2000, 40000, 50};
    std::vector<int> ns;
    for (int n = 4; n <= 16; ++n) ns.push_back(n);
    progress("wired escape chains start");
    const auto w = wired_escape_series(params, 2, ns, budget, Rng(opt_.seed, 0x500)(), opt_.threads);
    progress("wired escape chains done");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      xs.push_back(ns[i]);
      ys.push_back(std::log(w[i].value));
    }
    const auto fit = linear_fit(xs, ys);
    return {fit.r2 >= 0.98, fmt("log P^w vs N: slope %.4f, R^2 %.5f (need >= 0.98); P^w(4) %.3g, P^w(16) %.3g",
                                fit.slope, fit.r2, w.front().value, w.back().value)};
  }

  // 6 and 7 ---------------------------------------------------------------
  struct ScaleSample {
    int length = 0;
    std::size_t clusters = 0, decomposable = 0, reassembled = 0, violations = 0;
    std::vector<double> cone_counts, hausdorff_ratio;
    std::vector<EffectiveWalk> walks;
  };

  static constexpr double kDelta = 0.3;

  const std::vector<ScaleSample>& conditioned_samples() {
    if (!samples_.empty()) return samples_;
    const std::size_t count = opt_.quick ? 300 : 10000;
    const auto xi = DirectionalNorm::euclidean(2);
    const Vec t{1.0, 0.0};
    for (int length : {12, 20, 28}) {
      ConditionedSamplerConfig cfg;
      cfg.params = {beta_from_probability(0.45), 1.0};
      cfg.x = Site{length, 0};
      cfg.max_rejects = 10000000;
      cfg.seed = Rng(opt_.seed, 0x600 + static_cast<std::uint64_t>(length))();
      ConditionedClusterSampler sampler(cfg);
      ScaleSample s;
      s.length = length;
      for (std::size_t i = 0; i < count; ++i) {
        const auto c = sampler.next();
        ++s.clusters;
        const auto cones = cluster_cone_points(c, t, kDelta, xi, ConeSearch::accelerated);
        s.cone_counts.push_back(static_cast<double>(cones.size()));
        s.hausdorff_ratio.push_back(polyline_and_hausdorff(c, cones).distance / std::log(length));
        try {
          const auto res = decompose(c, t, kDelta, xi, ConeSearch::accelerated);
          if (const auto* d = std::get_if<IrreducibleDecomposition>(&res)) {
            ++s.decomposable;
            const auto [vs, es] = reassemble(*d);
            if (vs.size() == c.size() && es.size() == c.edges().size()) ++s.reassembled;
            s.walks.push_back(effective_walk(c, *d));
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::PartitionViolation) throw;
          ++s.violations;
        }
      }
      progress(fmt("|x|=%d: %zu clusters, acceptance %.4f, %zu decomposable", length, s.clusters,
                   sampler.acceptance_rate(), s.decomposable));
      samples_.push_back(std::move(s));
    }
    return samples_;
  }

  Verdict decomposition() {
    const auto& ss = conditioned_samples();
    std::size_t dec = 0, re = 0, bad = 0, total = 0;
    std::vector<double> scales;
    std::vector<std::vector<double>> counts;
    std::vector<EffectiveWalk> walks;
    for (const auto& s : ss) {
      dec += s.decomposable;
      re += s.reassembled;
      bad += s.violations;
      total += s.clusters;
      scales.push_back(s.length);
      counts.push_back(s.cone_counts);
      walks.insert(walks.end(), s.walks.begin(), s.walks.end());
    }
    const auto density = cone_density(scales, counts);
    const auto slope = density.fit.slope_ci;
    std::string tail_text;
    bool tail_ok = false;
    try {
      const auto tail = step_tail_fit(walks);
      tail_ok = !tail.degenerate && tail.kappa.lo > 0;
      tail_text = fmt("kappa %s over %zu steps", ci(tail.kappa).c_str(), tail.steps);
    } catch (const Error& e) {
      tail_text = e.what();
    }
    std::string dens;
    for (std::size_t i = 0; i < scales.size(); ++i) dens += fmt(" %g:%.4f", scales[i], density.density[i].value);
    return {bad == 0 && re == dec && dec > 0 && slope.lo > 0 && tail_ok,
            fmt("%zu clusters, %zu decomposable, %zu reassembled, %zu partition violations; cone-point slope %s "
                "(density/|x|%s); step tail %s",
                total, dec, re, bad, ci(slope).c_str(), dens.c_str(), tail_text.c_str())};
  }

  Verdict hausdorff() {
    const auto& ss = conditioned_samples();
    std::vector<EstimateWithCI> q95;
    std::string text;
    for (const auto& s : ss) {
      q95.push_back(quantile_ci(s.hausdorff_ratio, 0.95));
      text += fmt("|x|=%d: %s; ", s.length, ci(q95.back()).c_str());
    }
    bool ok = true;
    for (std::size_t i = 0; i + 1 < q95.size(); ++i) ok = ok && std::isfinite(q95[i].value) && q95[i + 1].lo <= q95[i].hi;
    return {ok, text + "95th percentile of d_H/log|x| must not rise significantly"};
  }

  // 8 --------------------------------------------------------------------
  Verdict invariance() {
    const std::size_t count = opt_.quick ? 1000 : 10000;
    const auto self = bridge_covariance_test(simulate_brownian_bridges(count, 16, 1.0, Rng(opt_.seed, 0x800)()));
    const bool self_ok = std::abs(self.chi.value - 1.0) <= 3 * self.chi.se();
    if (!self_ok) return {false, "harness self-check failed: chi " + ci(self.chi)};
    const double beta = 2 * potts_self_dual_beta(2);

    IsingWormConfig wc;
    wc.tanh_k = std::exp(-beta);
    wc.half_width = 24;
    wc.moves = opt_.quick ? 20000000 : 400000000;
    wc.seed = Rng(opt_.seed, 0x801)();
    const std::vector<Site> steps{Site{1, 0}, Site{3, 1}, Site{2, 1}, Site{3, 2}, Site{1, 1}};
    const std::vector<int> n_max{18, 6, 9, 6, 14};
    progress("ising worm start");
    const auto series = ising_two_point_series(wc, steps, n_max);
    progress("ising worm done");
    std::vector<std::pair<Vec, double>> table;
    double rel = 0, xi_e1 = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto f = fit_inverse_correlation_length(series[i], 2);
      table.emplace_back(Vec(steps[i]), f.xi.value);
      rel = std::max(rel, f.xi.half_width() / f.xi.value);
      if (i == 0) xi_e1 = f.xi.value;
    }
    const auto norm = symmetric_tabulated_norm(table, rel);
    const auto k = wulff_shape(norm, 720);
    const double curvature = boundary_curvature(k, Vec{xi_e1, 0.0}).value();

    bool ok = true;
    std::vector<double> chis;
    std::string text = fmt("self-check chi %s; curvature of K at t=(%.4f,0): %.4f; ", ci(self.chi).c_str(), xi_e1, curvature);
    for (int n : {32, 64, 128}) {
      InterfaceSamplerConfig ic;
      ic.n = n;
      ic.beta = beta;
      ic.profiles = count;
      ic.m = 16;
      ic.seed = Rng(opt_.seed, 0x810 + static_cast<std::uint64_t>(n))();
      progress(fmt("interface profiles N=%d start", n));
      const auto t = bridge_covariance_test(sample_interface_profiles(ic, opt_.threads), 2 * curvature);
      progress(fmt("interface profiles N=%d done", n));
      const bool n_ok = t.r2 >= 0.95 && std::abs(t.kurtosis - 3.0) <= 0.3 && *t.relative_gap <= 0.25;
      ok = ok && n_ok;
      chis.push_back(t.chi.value);
      text += fmt("N=%d chi %s R^2 %.3f kurtosis %.3f chi/2 vs curvature gap %.1f%%; ", n, ci(t.chi).c_str(), t.r2,
                  t.kurtosis, 100 * *t.relative_gap);
    }
    const double ratio = *std::max_element(chis.begin(), chis.end()) / *std::min_element(chis.begin(), chis.end());
    return {ok && ratio <= 1.25, text + fmt("chi max/min %.3f (<= 1.25)", ratio)};
  }

  // 9 --------------------------------------------------------------------
  Verdict wulff() {
    const std::vector<Site> steps{Site{1, 0}, Site{2, 1}, Site{1, 1}};
    std::vector<std::pair<Vec, double>> table;
    double rel = 0;
    std::string text;
    for (const auto& s : steps) {
      const auto f = fit_inverse_correlation_length(bridge_range(bridges(1.0, 0.3, s), 8, 40), 2);
      table.emplace_back(Vec(s), f.xi.value);
      rel = std::max(rel, f.xi.half_width() / f.xi.value);
      text += fmt("xi%s %s; ", s.str().c_str(), ci(f.xi).c_str());
    }
    const auto norm = symmetric_tabulated_norm(table, rel);
    try {
      const auto u = equi_decay_set(norm, 720);
      const auto k = wulff_shape(norm, 720);
      int negative = 0;
      double lowest = std::numeric_limits<double>::infinity();
      const int points = 64;
      for (int i = 0; i < points; ++i) {
        const auto c = boundary_curvature(k, dual_vector(Vec::polar(kTwoPi * i / points), norm), 1.0);
        negative += !c.positive;
        lowest = std::min(lowest, c.value());
      }
      const double defect = polarity_defect(u, k);
      return {negative == 0 && defect <= rel,
              text + fmt("%zu nodes, convex within rel tol %.4f; curvature min %.4f over %d boundary points (%d not "
                         "positive); polarity defect %.2e",
                         norm.angles().size(), rel, lowest, points, negative, defect)};
    } catch (const Error& e) {
      return {false, text + e.what()};
    }
  }

  // 10 -------------------------------------------------------------------
  Verdict determinism() {
    namespace fs = std::filesystem;
    if (opt_.cli.empty() || !fs::exists(opt_.cli)) return {false, "CLI binary not found: " + opt_.cli};
    const auto work = fs::temp_directory_path() / fmt("fkrc-acceptance-%llu", static_cast<unsigned long long>(opt_.seed));
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string c = opt_.configs + "/";
    const std::vector<std::pair<std::string, std::string>> runs{
        {"sample_chain", "sample --config " + c + "sample_chain.cfg"},
        {"sample_clusters", "sample --config " + c + "sample_clusters.cfg"},
        {"enumerate", "enumerate --config " + c + "enumerate_bond.cfg"},
        {"duality", "duality --config " + c + "duality.cfg"},
        {"xi", "xi --config " + c + "xi.cfg --set k_max=6 sweeps=400"},
        {"oz", "oz --config " + c + "oz.cfg --set sweeps=400"},
        {"exit", "exit --config " + c + "exit.cfg --set sweeps=400"},
        {"wulff", "wulff --config " + c + "wulff.cfg"},
        {"interface", "interface --config " + c + "interface.cfg --set N=6 profiles=40"},
        {"bridge", "bridge --config " + c + "bridge.cfg"},
        {"skeleton", "skeleton --config " + c + "skeleton.cfg --set cluster=" +
                         (work / "sample_clusters.a/clusters/000000.json").string()},
        {"decompose", "decompose --config " + c + "decompose.cfg --set cluster=" +
                          (work / "sample_clusters.a/clusters").string()},
    };
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    auto tree = [&](const fs::path& root) {
      std::map<std::string, std::string> files;
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
      return files;
    };
    std::size_t files = 0;
    std::string bad;
    for (const auto& [name, args] : runs) {
      for (const char* tag : {".a", ".b"}) {
        const auto out = work / (name + tag);
        const auto cmd = opt_.cli + " " + args + " --out " + out.string() + " > " + (work / (name + ".log")).string() + " 2>&1";
        if (std::system(cmd.c_str()) != 0) bad += name + " (exit status) ";
      }
      const auto a = tree(work / (name + ".a")), b = tree(work / (name + ".b"));
      if (a.empty() || a != b) bad += name + " ";
      files += a.size();
    }
    fs::remove_all(work);
    return {bad.empty(), fmt("%zu commands run twice, %zu output files compared byte for byte", runs.size(), files) +
                             (bad.empty() ? std::string() : "; differing: " + bad)};
  }

 private:
  Options opt_;
  std::map<std::string, BridgeChains> bridges_;
  std::vector<ScaleSample> samples_;
};

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  std::vector<int> only;
  std::string report;
  CLI::App app{"Acceptance criteria 1-10"};
  app.add_flag("--quick", opt.quick, "small budgets; not a verdict");
  app.add_option("--only", only, "criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 10));
  app.add_option("--threads", opt.threads, "worker threads for chain families")->check(CLI::Range(1, 4096));
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--cli", opt.cli, "fkrc binary for criterion 10");
  app.add_option("--configs", opt.configs, "demo config directory for criterion 10");
  app.add_option("--report", report, "also write the verdict lines to this file");
#ifdef FKRC_CLI_PATH
  opt.cli = FKRC_CLI_PATH;
  opt.configs = FKRC_CONFIG_DIR;
#endif
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  CLI11_PARSE(app, argc, argv);

  Acceptance acc(opt);
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle equivalence", [&] { return acc.oracle_equivalence(); }},
      {"measure-level duality", [&] { return acc.duality(); }},
      {"OZ exponent", [&] { return acc.oz_exponent(); }},
      {"exit law", [&] { return acc.exit_law(); }},
      {"wired escape log-linear", [&] { return acc.wired_escape(); }},
      {"decomposition soundness", [&] { return acc.decomposition(); }},
      {"Hausdorff proximity", [&] { return acc.hausdorff(); }},
      {"invariance principle", [&] { return acc.invariance(); }},
      {"Wulff geometry", [&] { return acc.wulff(); }},
      {"determinism", [&] { return acc.determinism(); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  std::ostringstream lines;
  int failed = 0;
  std::cout << (opt.quick ? "acceptance (quick budgets)\n" : "acceptance\n");
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    progress(fmt("criterion %d start", id));
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    const auto line = fmt("criterion %2d %s  %s: ", id, v.pass ? "PASS" : "FAIL", criteria[i].first) + v.detail;
    std::cout << line << std::endl;
    lines << line << "\n";
  }
  if (!report.empty()) std::ofstream(report) << lines.str();
  return failed == 0 ? 0 : 1;
}
