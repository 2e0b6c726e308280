// fkrc: command-line driver. Every command reads a flat `key = value` config,
// writes its outputs and a manifest into --out, and exits nonzero with one
// `error:` line on stderr on failure.

#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "cmd_decay.hpp"
#include "cmd_geometry.hpp"
#include "cmd_interface.hpp"
#include "cmd_model.hpp"

namespace {

using fkrc::cli::Context;
using Command = int (*)(Context&);

const std::map<std::string, std::pair<Command, const char*>>& commands() {
  static const std::map<std::string, std::pair<Command, const char*>> table{
      {"sample", {fkrc::cli::cmd_sample, "configuration dumps or conditioned clusters"}},
      {"enumerate", {fkrc::cli::cmd_enumerate, "exact distribution of a small box"}},
      {"xi", {fkrc::cli::cmd_xi, "decay series and inverse correlation lengths"}},
      {"oz", {fkrc::cli::cmd_oz, "decay series with a free prefactor exponent"}},
      {"wulff", {fkrc::cli::cmd_wulff, "equi-decay set, Wulff shape and curvature"}},
      {"skeleton", {fkrc::cli::cmd_skeleton, "coarse-grained skeleton tree of a cluster"}},
      {"decompose", {fkrc::cli::cmd_decompose, "irreducible decomposition and effective walk"}},
      {"interface", {fkrc::cli::cmd_interface, "Dobrushin interface profiles"}},
      {"bridge", {fkrc::cli::cmd_bridge, "Brownian-bridge covariance test"}},
      {"exit", {fkrc::cli::cmd_exit, "exit probabilities and wired escape"}},
      {"duality", {fkrc::cli::cmd_duality, "planar duality checks"}},
  };
  return table;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

int fail(const std::string& code, const std::string& key, const std::string& message, int status) {
  std::cerr << "error: code=" << code;
  if (!key.empty()) std::cerr << " key=" << key;
  std::cerr << " message=" << quoted(message) << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-cluster model experiments"};
  app.set_version_flag("--version", FKRC_VERSION);
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool force = false;
  std::vector<std::string> overrides;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands()) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "flat key = value file");
    sub->add_option("--seed", seed, "overrides the seed key");
    sub->add_option("--out", out_dir, "output directory (or the out key)");
    sub->add_option("--chains", threads, "worker threads for independent chains")->check(CLI::Range(1, 4096));
    sub->add_flag("--force", force, "replace a previous run's output directory");
    sub->add_option("--set", overrides, "key=value, overrides the config file")->take_all();
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("Usage", "", e.what(), 2);
  }
  std::string name;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) name = n;

  std::unique_ptr<fkrc::cli::OutputDir> out;
  auto discard = [&] {
    if (out) out->discard();
  };
  try {
    auto cfg = config_path.empty() ? fkrc::RunConfig{} : fkrc::RunConfig::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw fkrc::ConfigError(kv, kv + ": --set expects key=value");
      cfg.set(fkrc::detail::trim(kv.substr(0, eq)), fkrc::detail::trim(kv.substr(eq + 1)));
    }
    if (seed) cfg.set("seed", std::to_string(*seed));
    if (out_dir.empty()) out_dir = cfg.str("out", "");
    out = std::make_unique<fkrc::cli::OutputDir>(out_dir, force);
    Context ctx{cfg, *out, threads};
    const int status = commands().at(name).first(ctx);
    out->manifest(name, cfg);
    return status;
  } catch (const fkrc::ConfigError& e) {
    discard();
    return fail("InvalidConfig", e.key(), e.what(), 2);
  } catch (const fkrc::Error& e) {
    discard();
    return fail(std::string(fkrc::to_string(e.code())), "", e.what(), 1);
  } catch (const std::exception& e) {
    discard();
    return fail("Internal", "", e.what(), 1);
  }
}
