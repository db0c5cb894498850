#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "facthist/space.hpp"

namespace facthist {

struct DagNode {
  std::string name;
  std::size_t domain = 2;
};

using NodeSet = std::set<std::size_t>;

// A finite DAG whose nodes carry finite domains (cardinality >= 2).
// Nodes are addressed by index in declaration order.
class Dag {
 public:
  Dag(std::vector<DagNode> nodes, std::vector<std::pair<std::size_t, std::size_t>> edges);
  /// Edges given by node name.
  static Dag from_names(std::vector<DagNode> nodes, const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<DagNode>& nodes() const noexcept { return nodes_; }
  const DagNode& node(std::size_t v) const;
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }
  /// Parents in ascending node order.
  const std::vector<std::size_t>& parents(std::size_t v) const;
  const std::vector<std::size_t>& children(std::size_t v) const;
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<DagNode> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

NodeSet ancestors(const Dag& dag, std::size_t v);
NodeSet descendants(const Dag& dag, std::size_t v);

// Walk-based d-separation: x and y are separated by zs iff no walk connects them on
// which every collider lies in zs and every non-collider lies outside zs.
bool d_separated(const Dag& dag, const NodeSet& xs, const NodeSet& ys, const NodeSet& zs);

/// Response-function embedding: one factor u_v per node, one variable X_v per node.
struct Embedding {
  FactoredSpace space;
  std::vector<RandomVariable> node_vars;

  /// The tuple of X_v over the given nodes; trivial for an empty set.
  RandomVariable joint_var(const NodeSet& nodes) const;
};

/// Number of outcomes embed_dag would produce, saturating at SIZE_MAX.
std::size_t embedding_outcome_count(const Dag& dag);

// Each u_v ranges over every function from joint parent assignments to dom(v).
// A coordinate k encodes the function table (f(0), ..., f(m-1)) in mixed radix,
// last entry fastest; parent assignments are ranked with parents in node order,
// last parent fastest.
Embedding embed_dag(const Dag& dag, SpaceLimits limits = {});

struct DsepQuery {
  std::size_t x = 0;
  std::size_t y = 0;
  NodeSet given;
};

struct DsepComparison {
  DsepQuery query;
  bool d_separated = false;
  bool structural = false;
  bool agrees() const noexcept { return d_separated == structural; }
};

struct EquivalenceReport {
  std::vector<DsepComparison> results;
  std::size_t agreements() const noexcept;
  std::size_t disagreements() const noexcept { return results.size() - agreements(); }
};

EquivalenceReport dsep_structural_equivalence(const Dag& dag, const std::vector<DsepQuery>& queries,
                                              SpaceLimits limits = {});
EquivalenceReport dsep_structural_equivalence(const Dag& dag, const Embedding& embedding,
                                              const std::vector<DsepQuery>& queries);

/// Every unordered node pair {x, y}, x < y, with every conditioning set drawn from the other nodes.
std::vector<DsepQuery> all_single_node_queries(const Dag& dag);

struct StructuralTimeReport {
  std::vector<IndexSet> histories;  // H(X_v) per node
  std::vector<std::size_t> history_mismatches;                     // nodes whose history is not their ancestral factors
  std::vector<std::pair<std::size_t, std::size_t>> order_mismatches;  // (v, w) where containment != ancestry
  bool passed() const noexcept { return history_mismatches.empty() && order_mismatches.empty(); }
};

StructuralTimeReport structural_time_vs_ancestry(const Dag& dag, const Embedding& embedding);
StructuralTimeReport structural_time_vs_ancestry(const Dag& dag, SpaceLimits limits = {});

}  // namespace facthist
