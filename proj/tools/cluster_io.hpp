#pragma once

// JSON forms of clusters, skeleton trees and decompositions. The schemas are
// listed in the README.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "fkrc/clustergeo.hpp"
#include "fkrc/fk.hpp"
#include "json.hpp"

namespace fkrc::cli {

using Json = nlohmann::ordered_json;

inline Json site_json(const Site& s) {
  Json a = Json::array();
  for (int i = 0; i < s.dim; ++i) a.push_back(s[i]);
  return a;
}

inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.dim; ++i) a.push_back(v[i]);
  return a;
}

inline Site json_site(const Json& j, const std::string& what) {
  require(j.is_array() && !j.empty() && j.size() <= static_cast<std::size_t>(kMaxDim), ErrorCode::InvalidArgument,
          what + ": expected an integer array");
  Site s = Site::zero(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number_integer(), ErrorCode::InvalidArgument, what + ": coordinates must be integers");
    s[static_cast<int>(i)] = j[i].get<int>();
  }
  return s;
}

inline Json cluster_json(const Cluster& c) {
  Json j;
  j["schema"] = "fkrc.cluster/1";
  j["dim"] = c.dim();
  j["origin"] = site_json(c.origin());
  j["target"] = site_json(c.target());
  j["vertices"] = Json::array();
  for (const auto& v : c.vertices()) j["vertices"].push_back(site_json(v));
  j["edges"] = Json::array();
  for (const auto& [a, b] : c.edges()) j["edges"].push_back({a, b});
  return j;
}

inline Cluster parse_cluster_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("cluster file: ") + e.what());
  }
  require(j.value("schema", "") == "fkrc.cluster/1", ErrorCode::InvalidArgument, "cluster file: unknown schema");
  std::vector<Site> vs;
  for (const auto& v : j.at("vertices")) vs.push_back(json_site(v, "vertices"));
  std::vector<Cluster::Edge> es;
  for (const auto& e : j.at("edges")) {
    require(e.is_array() && e.size() == 2, ErrorCode::InvalidArgument, "edges: expected index pairs");
    es.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return Cluster(std::move(vs), std::move(es), json_site(j.at("origin"), "origin"), json_site(j.at("target"), "target"));
}

/// A cluster from a `.json` cluster file, or the cluster of `origin` and
/// `target` in a configuration dump.
inline Cluster load_cluster(const std::string& path, const std::optional<Site>& target) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return parse_cluster_json(ss.str());
  require(target.has_value(), ErrorCode::InvalidArgument, "a dump needs the target site x");
  const auto dump = parse_configuration(ss.str());
  const Site origin = Site::zero(target->dim);
  require(connected(dump.omega, static_cast<std::uint32_t>(dump.omega.graph->box().index(origin)),
                    static_cast<std::uint32_t>(dump.omega.graph->box().index(*target))),
          ErrorCode::InvalidArgument, "0 and x are not connected in " + path);
  return extract_cluster(dump.omega, origin, *target);
}

inline Json skeleton_json(const SkeletonTree& t, double K, double r) {
  Json j;
  j["schema"] = "fkrc.skeleton/1";
  j["K"] = K;
  j["r"] = r;
  j["vertices"] = Json::array();
  for (const auto& v : t.vertices) j["vertices"].push_back(site_json(v));
  j["parent"] = t.parent;
  j["trunk"] = t.trunk;
  j["branches"] = Json::array();
  for (const auto& b : t.branches) j["branches"].push_back({{"root", b.root}, {"vertices", b.vertices}});
  return j;
}

inline Json piece_json(const Cluster& c, const ClusterPiece& p) {
  Json j;
  j["vertices"] = Json::array();
  for (auto v : p.vertices) j["vertices"].push_back(site_json(c.vertex(v)));
  j["edges"] = Json::array();
  for (auto e : p.edges) {
    const auto& [a, b] = c.edges()[e];
    j["edges"].push_back({site_json(c.vertex(a)), site_json(c.vertex(b))});
  }
  j["f"] = p.f ? site_json(c.vertex(*p.f)) : Json(nullptr);
  j["b"] = p.b ? site_json(c.vertex(*p.b)) : Json(nullptr);
  return j;
}

inline Json decomposition_json(const Cluster& c, const DecompositionResult& res, const Vec& t, double delta) {
  Json j;
  j["schema"] = "fkrc.decomposition/1";
  j["t"] = vec_json(t);
  j["delta"] = delta;
  j["origin"] = site_json(c.origin());
  j["target"] = site_json(c.target());
  if (const auto* u = std::get_if<Undecomposable>(&res)) {
    j["decomposable"] = false;
    j["cone_point_count"] = u->cone_points;
    return j;
  }
  const auto& d = std::get<IrreducibleDecomposition>(res);
  j["decomposable"] = true;
  j["cone_points"] = Json::array();
  for (auto v : d.cone_points) j["cone_points"].push_back(site_json(c.vertex(v)));
  j["backward"] = piece_json(c, d.backward);
  j["pieces"] = Json::array();
  for (const auto& p : d.pieces) j["pieces"].push_back(piece_json(c, p));
  j["forward"] = piece_json(c, d.forward);
  const auto [vs, es] = reassemble(d);
  j["reassembles"] = vs.size() == c.size() && es.size() == c.edges().size();
  const auto w = effective_walk(c, d);
  Json walk;
  walk["start"] = site_json(w.start);
  walk["end"] = site_json(w.end);
  walk["steps"] = Json::array();
  for (const auto& s : w.steps) walk["steps"].push_back(site_json(s));
  j["walk"] = walk;
  return j;
}

}  // namespace fkrc::cli
