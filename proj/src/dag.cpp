#include "facthist/dag.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <unordered_set>

#include "facthist/history.hpp"

namespace facthist {
namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::size_t sat_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < exp && out != kSaturated; ++k) out = sat_mul(out, base);
  return out;
}

std::size_t parent_assignment_count(const Dag& dag, std::size_t v) {
  std::size_t m = 1;
  for (auto p : dag.parents(v)) m = sat_mul(m, dag.node(p).domain);
  return m;
}

void check_nodes(const Dag& dag, const NodeSet& s) {
  for (auto v : s) {
    if (v >= dag.size()) throw Error(ErrorKind::unknown_node, "node index " + std::to_string(v));
  }
}

}  // namespace

Dag::Dag(std::vector<DagNode> nodes, std::vector<std::pair<std::size_t, std::size_t>> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::unordered_set<std::string> names;
  for (const auto& n : nodes_) {
    if (n.domain < 2) throw Error(ErrorKind::invalid_dag, "node '" + n.name + "' needs a domain of at least 2");
    if (!names.insert(n.name).second) throw Error(ErrorKind::invalid_dag, "duplicate node name '" + n.name + "'");
  }
  parents_.assign(nodes_.size(), {});
  children_.assign(nodes_.size(), {});
  for (const auto& [p, c] : edges_) {
    if (p >= nodes_.size() || c >= nodes_.size()) throw Error(ErrorKind::unknown_node, "edge endpoint out of range");
    if (p == c) throw Error(ErrorKind::invalid_dag, "self loop on '" + nodes_[p].name + "'");
    if (std::find(parents_[c].begin(), parents_[c].end(), p) != parents_[c].end()) {
      throw Error(ErrorKind::invalid_dag, "duplicate edge " + nodes_[p].name + " -> " + nodes_[c].name);
    }
    parents_[c].push_back(p);
    children_[p].push_back(c);
  }
  for (auto& ps : parents_) std::sort(ps.begin(), ps.end());
  for (auto& cs : children_) std::sort(cs.begin(), cs.end());

  // Kahn's algorithm, smallest ready index first so the order is canonical.
  std::vector<std::size_t> indegree(nodes_.size());
  for (std::size_t v = 0; v < nodes_.size(); ++v) indegree[v] = parents_[v].size();
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (indegree[v] == 0) ready.insert(v);
  }
  while (!ready.empty()) {
    const auto v = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(v);
    for (auto c : children_[v]) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (topo_.size() != nodes_.size()) throw Error(ErrorKind::invalid_dag, "graph has a directed cycle");
}

Dag Dag::from_names(std::vector<DagNode> nodes, const std::vector<std::pair<std::string, std::string>>& edges) {
  auto find = [&](const std::string& name) {
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (nodes[v].name == name) return v;
    }
    throw Error(ErrorKind::unknown_node, "no node named '" + name + "'");
  };
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  idx.reserve(edges.size());
  for (const auto& [p, c] : edges) idx.emplace_back(find(p), find(c));
  return Dag(std::move(nodes), std::move(idx));
}

const DagNode& Dag::node(std::size_t v) const {
  if (v >= nodes_.size()) throw Error(ErrorKind::unknown_node, "node index " + std::to_string(v));
  return nodes_[v];
}

const std::vector<std::size_t>& Dag::parents(std::size_t v) const {
  node(v);
  return parents_[v];
}

const std::vector<std::size_t>& Dag::children(std::size_t v) const {
  node(v);
  return children_[v];
}

std::size_t Dag::index_of(const std::string& name) const {
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].name == name) return v;
  }
  throw Error(ErrorKind::unknown_node, "no node named '" + name + "'");
}

NodeSet ancestors(const Dag& dag, std::size_t v) {
  NodeSet out;
  std::vector<std::size_t> stack(dag.parents(v).begin(), dag.parents(v).end());
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    if (!out.insert(u).second) continue;
    for (auto p : dag.parents(u)) stack.push_back(p);
  }
  return out;
}

NodeSet descendants(const Dag& dag, std::size_t v) {
  NodeSet out;
  std::vector<std::size_t> stack(dag.children(v).begin(), dag.children(v).end());
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    if (!out.insert(u).second) continue;
    for (auto c : dag.children(u)) stack.push_back(c);
  }
  return out;
}

bool d_separated(const Dag& dag, const NodeSet& xs, const NodeSet& ys, const NodeSet& zs) {
  check_nodes(dag, xs);
  check_nodes(dag, ys);
  check_nodes(dag, zs);
  auto overlap = [](const NodeSet& a, const NodeSet& b) {
    return std::any_of(a.begin(), a.end(), [&](std::size_t v) { return b.count(v) != 0; });
  };
  if (overlap(xs, ys) || overlap(xs, zs) || overlap(ys, zs)) {
    throw Error(ErrorKind::invalid_query, "query node sets must be pairwise disjoint");
  }

  // State (v, into): the walk reached v along an edge pointing into v (into = 1)
  // or along an edge leaving v (into = 0).
  const std::size_t n = dag.size();
  std::vector<std::array<bool, 2>> seen(n, {false, false});
  std::deque<std::pair<std::size_t, int>> queue;
  auto push = [&](std::size_t v, int into) {
    if (!seen[v][into]) {
      seen[v][into] = true;
      queue.emplace_back(v, into);
    }
  };
  for (auto x : xs) {
    for (auto c : dag.children(x)) push(c, 1);
    for (auto p : dag.parents(x)) push(p, 0);
  }
  while (!queue.empty()) {
    const auto [v, into] = queue.front();
    queue.pop_front();
    if (ys.count(v)) return false;
    const bool in_z = zs.count(v) != 0;
    // Leaving towards a child: v is a non-collider.
    if (!in_z) {
      for (auto c : dag.children(v)) push(c, 1);
    }
    // Leaving towards a parent: v is a collider iff we arrived along an edge into v.
    if (into == 1 ? in_z : !in_z) {
      for (auto p : dag.parents(v)) push(p, 0);
    }
  }
  return true;
}

RandomVariable Embedding::joint_var(const NodeSet& nodes) const {
  std::vector<RandomVariable> parts;
  for (auto v : nodes) parts.push_back(node_vars.at(v));
  return tuple_var(space, parts);
}

std::size_t embedding_outcome_count(const Dag& dag) {
  std::size_t total = 1;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    total = sat_mul(total, sat_pow(dag.node(v).domain, parent_assignment_count(dag, v)));
  }
  return total;
}

Embedding embed_dag(const Dag& dag, SpaceLimits limits) {
  if (dag.size() == 0) throw Error(ErrorKind::invalid_dag, "cannot embed an empty graph");
  const std::size_t total = embedding_outcome_count(dag);
  if (total > limits.max_outcomes) {
    throw Error(ErrorKind::space_too_large, "embedding needs " +
                                                (total == kSaturated ? std::string("more than 2^64") : std::to_string(total)) +
                                                " outcomes, cap is " + std::to_string(limits.max_outcomes));
  }

  std::vector<std::size_t> assignments(dag.size());
  std::vector<Factor> factors;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    const std::size_t d = dag.node(v).domain;
    const std::size_t m = parent_assignment_count(dag, v);
    assignments[v] = m;
    const std::size_t card = sat_pow(d, m);
    Factor f{"u_" + dag.node(v).name, {}};
    f.domain.reserve(card);
    for (std::size_t k = 0; k < card; ++k) {
      if (dag.parents(v).empty()) {
        f.domain.push_back(std::to_string(k));
        continue;
      }
      std::string label = "[";
      std::size_t rest = k;
      std::vector<std::size_t> table(m);
      for (std::size_t a = m; a-- > 0;) {
        table[a] = rest % d;
        rest /= d;
      }
      for (std::size_t a = 0; a < m; ++a) label += (a ? "," : "") + std::to_string(table[a]);
      f.domain.push_back(label + "]");
    }
    factors.push_back(std::move(f));
  }
  FactoredSpace space(std::move(factors), limits);

  // Place value of table entry a inside a coordinate: d^(m-1-a).
  std::vector<std::vector<std::size_t>> place(dag.size());
  for (std::size_t v = 0; v < dag.size(); ++v) {
    const std::size_t d = dag.node(v).domain;
    place[v].assign(assignments[v], 1);
    for (std::size_t a = assignments[v]; a-- > 1;) place[v][a - 1] = place[v][a] * d;
  }

  std::vector<std::vector<std::uint32_t>> tables(dag.size(), std::vector<std::uint32_t>(space.outcome_count()));
  for (std::size_t r = 0; r < space.outcome_count(); ++r) {
    for (auto v : dag.topological_order()) {
      std::size_t a = 0;
      for (auto p : dag.parents(v)) a = a * dag.node(p).domain + tables[p][r];
      const std::size_t k = space.coordinate(r, v);
      tables[v][r] = static_cast<std::uint32_t>((k / place[v][a]) % dag.node(v).domain);
    }
  }

  Embedding e{std::move(space), {}};
  for (std::size_t v = 0; v < dag.size(); ++v) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < dag.node(v).domain; ++k) labels.push_back(std::to_string(k));
    e.node_vars.emplace_back("X_" + dag.node(v).name, std::move(labels), std::move(tables[v]));
  }
  return e;
}

std::size_t EquivalenceReport::agreements() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const DsepComparison& c) { return c.agrees(); }));
}

EquivalenceReport dsep_structural_equivalence(const Dag& dag, const Embedding& embedding,
                                              const std::vector<DsepQuery>& queries) {
  EquivalenceReport report;
  for (const auto& q : queries) {
    DsepComparison cmp{q, false, false};
    cmp.d_separated = d_separated(dag, {q.x}, {q.y}, q.given);
    const auto z = embedding.joint_var(q.given);
    cmp.structural =
        structurally_independent(embedding.space, embedding.node_vars.at(q.x), embedding.node_vars.at(q.y), z)
            .independent;
    report.results.push_back(std::move(cmp));
  }
  return report;
}

EquivalenceReport dsep_structural_equivalence(const Dag& dag, const std::vector<DsepQuery>& queries,
                                              SpaceLimits limits) {
  return dsep_structural_equivalence(dag, embed_dag(dag, limits), queries);
}

std::vector<DsepQuery> all_single_node_queries(const Dag& dag) {
  std::vector<DsepQuery> out;
  const std::size_t n = dag.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      std::vector<std::size_t> others;
      for (std::size_t v = 0; v < n; ++v) {
        if (v != x && v != y) others.push_back(v);
      }
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
        NodeSet given;
        for (std::size_t k = 0; k < others.size(); ++k) {
          if (mask & (std::uint64_t{1} << k)) given.insert(others[k]);
        }
        out.push_back({x, y, std::move(given)});
      }
    }
  }
  return out;
}

StructuralTimeReport structural_time_vs_ancestry(const Dag& dag, const Embedding& embedding) {
  StructuralTimeReport report;
  const Block all = whole_space(embedding.space);
  std::vector<NodeSet> anc(dag.size());
  for (std::size_t v = 0; v < dag.size(); ++v) {
    anc[v] = ancestors(dag, v);
    const IndexSet h = history(embedding.space, all, embedding.node_vars[v]);
    IndexSet expected = IndexSet::single(v);
    for (auto w : anc[v]) expected.insert(w);
    if (h != expected) report.history_mismatches.push_back(v);
    report.histories.push_back(h);
  }
  for (std::size_t v = 0; v < dag.size(); ++v) {
    for (std::size_t w = 0; w < dag.size(); ++w) {
      const bool contained = report.histories[v].subset_of(report.histories[w]);
      const bool ancestral = v == w || anc[w].count(v) != 0;
      if (contained != ancestral) report.order_mismatches.emplace_back(v, w);
    }
  }
  return report;
}

StructuralTimeReport structural_time_vs_ancestry(const Dag& dag, SpaceLimits limits) {
  return structural_time_vs_ancestry(dag, embed_dag(dag, limits));
}

}  // namespace facthist
