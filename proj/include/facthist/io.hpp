#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "facthist/dag.hpp"
#include "facthist/distributions.hpp"
#include "facthist/space.hpp"

namespace facthist {

using Json = nlohmann::ordered_json;

/// Contents of a space file: the factors plus named variables over them.
struct SpaceModel {
  FactoredSpace space;
  std::vector<RandomVariable> variables;

  /// A declared variable, or else the projection onto a factor of that name.
  RandomVariable resolve(const std::string& name) const;
  /// Tuple of the named variables; empty list gives the trivial variable.
  RandomVariable resolve_tuple(const std::vector<std::string>& names) const;

  friend bool operator==(const SpaceModel&, const SpaceModel&) = default;
};

Json space_to_json(const SpaceModel& model);
SpaceModel space_from_json(const Json& doc, SpaceLimits limits = {});

Json distribution_to_json(const ProductDistribution& p);
ProductDistribution distribution_from_json(const Json& doc);

Json dag_to_json(const Dag& dag);
Dag dag_from_json(const Json& doc);

/// Embedding as a space file: factors u_<node>, variables X_<node>.
SpaceModel embedding_model(const Embedding& e);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

/// Names of the factors in j, in id order.
Json index_set_names(const FactoredSpace& space, IndexSet j);

}  // namespace facthist
