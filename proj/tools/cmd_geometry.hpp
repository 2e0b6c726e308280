#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "cluster_io.hpp"
#include "common.hpp"
#include "fkrc/clustergeo.hpp"

namespace fkrc::cli {

namespace detail {

/// `cluster` names one cluster file or a directory of them (.json and .fk,
/// in name order).
inline std::vector<std::string> cluster_paths(const RunConfig& cfg) {
  const auto path = cfg.str("cluster");
  if (!std::filesystem::is_directory(path)) {
    if (!std::filesystem::exists(path)) throw ConfigError("cluster", "cluster: no such file " + path);
    return {path};
  }
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".json" || ext == ".fk")) out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ConfigError("cluster", "cluster: no .json or .fk files in " + path);
  return out;
}

inline std::optional<Site> target_site(const RunConfig& cfg) {
  return cfg.has("x") ? std::optional<Site>(cfg.site("x")) : std::nullopt;
}

inline void segment(std::ostream& os, const Site& a, const Site& b) {
  os << a[0] << ' ' << (a.dim > 1 ? a[1] : 0) << '\n' << b[0] << ' ' << (b.dim > 1 ? b[1] : 0) << "\n\n";
}

}  // namespace detail

inline int cmd_skeleton(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto path = cfg.str("cluster");
  const auto x = detail::target_site(cfg);
  const double K = cfg.real("K", 8.0, kMinScale, 1e9);
  const double r = cfg.real("r", 1.0, 0.0, 1e9);
  const auto c = load_cluster(path, x);
  const auto xi = analytic_norm(cfg, c.dim());
  cfg.reject_unused();
  const auto tree = skeleton(c, K, r, xi);
  ctx.out.write("skeleton.json", skeleton_json(tree, K, r).dump(1) + "\n");
  std::ostringstream edges, trunk, body;
  edges << "# tree edges as segments: x y\n";
  for (std::size_t i = 1; i < tree.size(); ++i)
    detail::segment(edges, tree.vertices[static_cast<std::size_t>(tree.parent[i])], tree.vertices[i]);
  trunk << "# trunk: x y\n";
  for (const auto& s : tree.trunk_sites()) trunk << s[0] << ' ' << (s.dim > 1 ? s[1] : 0) << '\n';
  body << "# cluster edges as segments: x y\n";
  for (const auto& [a, b] : c.edges()) detail::segment(body, c.vertex(a), c.vertex(b));
  ctx.out.write("skeleton.dat", edges.str());
  ctx.out.write("trunk.dat", trunk.str());
  ctx.out.write("cluster.dat", body.str());
  std::cout << "skeleton: " << tree.size() << " vertices, trunk " << tree.trunk.size() << ", branches "
            << tree.branches.size() << "\n";
  return 0;
}

inline int cmd_decompose(Context& ctx) {
  auto& cfg = ctx.cfg;
  const auto paths = detail::cluster_paths(cfg);
  const auto x = detail::target_site(cfg);
  const double delta = cfg.real("delta", 0.1, 1e-9, 1.0 / 3.0 - 1e-9);
  const auto search = cfg.choice("search", "accelerated", {"accelerated", "brute_force"});
  std::optional<Vec> t_given;
  if (cfg.has("t")) {
    const auto tv = cfg.real_list("t");
    Vec v = Vec::zero(static_cast<int>(tv.size()));
    for (std::size_t i = 0; i < tv.size(); ++i) v[static_cast<int>(i)] = tv[i];
    t_given = v;
  }
  std::optional<DirectionalNorm> xi;
  std::ostringstream summary, steps;
  summary << "cluster,vertices,decomposable,pieces,cone_points,reassembles,hausdorff\n";
  steps << "# cluster step_components...\n";
  std::size_t decomposable = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto c = load_cluster(paths[i], x);
    if (!xi) {
      xi = analytic_norm(cfg, c.dim());
      cfg.reject_unused();
    }
    const Vec t = t_given ? *t_given : dual_vector(Vec(c.target() - c.origin()), *xi);
    const auto res = decompose(c, t, delta, *xi, search == "accelerated" ? ConeSearch::accelerated : ConeSearch::brute_force);
    const auto j = decomposition_json(c, res, t, delta);
    const auto name = std::filesystem::path(paths[i]).stem().string();
    ctx.out.write("decompositions/" + name + ".json", j.dump(1) + "\n");
    summary << name << ',' << c.size() << ',';
    if (const auto* d = std::get_if<IrreducibleDecomposition>(&res)) {
      ++decomposable;
      const auto h = polyline_and_hausdorff(c, d->cone_points);
      summary << "1," << d->count() << ',' << d->cone_points.size() << ',' << (j["reassembles"].get<bool>() ? 1 : 0)
              << ',' << format_double(h.distance) << '\n';
      for (const auto& s : effective_walk(c, *d).steps) {
        steps << name;
        for (int k = 0; k < s.dim; ++k) steps << ' ' << s[k];
        steps << '\n';
      }
    } else {
      summary << "0,0," << std::get<Undecomposable>(res).cone_points << ",0,\n";
    }
  }
  ctx.out.write("summary.csv", summary.str());
  ctx.out.write("steps.dat", steps.str());
  std::cout << decomposable << " of " << paths.size() << " clusters decomposed\n";
  return 0;
}

}  // namespace fkrc::cli
