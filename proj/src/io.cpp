#include "facthist/io.hpp"

#include <fstream>
#include <sstream>

namespace facthist {
namespace {

// nlohmann type errors surface as parse errors with the offending context.
template <class Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string(what) + ": " + e.what());
  }
}

}  // namespace

RandomVariable SpaceModel::resolve(const std::string& name) const {
  for (const auto& v : variables) {
    if (v.name() == name) return v;
  }
  if (space.has_factor(name)) return factor_var(space, space.factor_id(name));
  throw Error(ErrorKind::unknown_name, "no variable or factor named '" + name + "'");
}

RandomVariable SpaceModel::resolve_tuple(const std::vector<std::string>& names) const {
  std::vector<RandomVariable> parts;
  for (const auto& n : names) parts.push_back(resolve(n));
  return tuple_var(space, parts);
}

Json space_to_json(const SpaceModel& model) {
  Json doc;
  doc["factors"] = Json::array();
  for (const auto& f : model.space.factors()) doc["factors"].push_back({{"name", f.name}, {"domain", f.domain}});
  doc["variables"] = Json::object();
  for (const auto& v : model.variables) {
    doc["variables"][v.name()] = {{"codomain", v.codomain()}, {"table", v.table()}};
  }
  return doc;
}

SpaceModel space_from_json(const Json& doc, SpaceLimits limits) {
  auto parsed = guarded("space file", [&] {
    if (!doc.is_object() || !doc.contains("factors")) throw Error(ErrorKind::parse_error, "space file needs \"factors\"");
    std::vector<Factor> factors;
    for (const auto& f : doc.at("factors")) {
      factors.push_back({f.at("name").get<std::string>(), f.at("domain").get<std::vector<std::string>>()});
    }
    std::vector<std::tuple<std::string, std::vector<std::string>, std::vector<std::uint32_t>>> vars;
    if (doc.contains("variables")) {
      for (const auto& [name, v] : doc.at("variables").items()) {
        vars.emplace_back(name, v.at("codomain").get<std::vector<std::string>>(),
                          v.at("table").get<std::vector<std::uint32_t>>());
      }
    }
    return std::make_pair(std::move(factors), std::move(vars));
  });
  SpaceModel model{FactoredSpace(std::move(parsed.first), limits), {}};
  for (auto& [name, codomain, table] : parsed.second) {
    RandomVariable v(name, std::move(codomain), std::move(table));
    v.check_on(model.space);
    model.variables.push_back(std::move(v));
  }
  return model;
}

Json distribution_to_json(const ProductDistribution& p) {
  Json doc;
  doc["per_factor"] = Json::array();
  for (const auto& v : p.per_factor) {
    Json row = Json::array();
    for (const auto& q : v) row.push_back(to_fraction_string(q));
    doc["per_factor"].push_back(std::move(row));
  }
  return doc;
}

ProductDistribution distribution_from_json(const Json& doc) {
  return guarded("distribution file", [&] {
    ProductDistribution p;
    for (const auto& row : doc.at("per_factor")) {
      std::vector<Rational> v;
      for (const auto& q : row) v.push_back(parse_fraction(q.get<std::string>()));
      p.per_factor.push_back(std::move(v));
    }
    return p;
  });
}

Json dag_to_json(const Dag& dag) {
  Json doc;
  doc["nodes"] = Json::array();
  for (const auto& n : dag.nodes()) doc["nodes"].push_back({{"name", n.name}, {"domain", n.domain}});
  doc["edges"] = Json::array();
  for (const auto& [p, c] : dag.edges()) doc["edges"].push_back({dag.node(p).name, dag.node(c).name});
  return doc;
}

Dag dag_from_json(const Json& doc) {
  auto [nodes, edges] = guarded("dag file", [&] {
    std::vector<DagNode> nodes;
    for (const auto& n : doc.at("nodes")) {
      nodes.push_back({n.at("name").get<std::string>(), n.at("domain").get<std::size_t>()});
    }
    std::vector<std::pair<std::string, std::string>> edges;
    if (doc.contains("edges")) {
      for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::parse_error, "edge must be [parent, child]");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
    return std::make_pair(std::move(nodes), std::move(edges));
  });
  return Dag::from_names(std::move(nodes), edges);
}

SpaceModel embedding_model(const Embedding& e) { return SpaceModel{e.space, e.node_vars}; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::parse_error, "cannot write '" + path + "'");
  out << doc.dump() << '\n';
}

Json index_set_names(const FactoredSpace& space, IndexSet j) {
  Json out = Json::array();
  for (auto i : j.ids()) out.push_back(space.factor(i).name);
  return out;
}

}  // namespace facthist
