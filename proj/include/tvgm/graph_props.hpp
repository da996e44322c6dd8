#ifndef TVGM_GRAPH_PROPS_HPP
#define TVGM_GRAPH_PROPS_HPP

#include "tvgm/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace tvgm {

// Undirected edge between 0-based nodes, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  Edge() = default;
  Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Canonical edge set on d nodes: sorted, duplicate free, no self loops.
// Nodes are 0-based in memory; the text format is 1-based.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(int d) : d_(d) {}
  EdgeSet(int d, std::vector<Edge> edges);

  static EdgeSet complete(int d);

  int d() const { return d_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<Edge>& edges() const { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  bool contains(const Edge& e) const;
  // Returns false if the edge was already present.
  bool insert(const Edge& e);
  bool erase(const Edge& e);

  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;

  EdgeSet united(const EdgeSet& other) const;
  bool includes(const EdgeSet& other) const;
  // All pairs of distinct nodes not in the set.
  EdgeSet complement() const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  int d_ = 0;
  std::vector<Edge> edges_;
};

// Index of the unordered pair (u, v), u < v, in row-major upper-triangle
// order; used for bitmask enumeration of small graphs.
inline int pair_index(int d, int u, int v) {
  return u * d - u * (u + 1) / 2 + (v - u - 1);
}
EdgeSet edge_set_from_mask(int d, unsigned long long mask);

int max_degree(const EdgeSet& es);
// Components as sorted node lists, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const EdgeSet& es);
int count_isolated(const EdgeSet& es);
int max_clique_size(const EdgeSet& es);
bool has_clique(const EdgeSet& es, int size);

struct GraphProperty {
  enum class Kind { connected, components_at_most, max_degree_greater, isolated_at_most,
                    clique_greater };
  Kind kind = Kind::connected;
  int k = 0;

  static GraphProperty connected() { return {Kind::connected, 1}; }
  static GraphProperty components_at_most(int k) { return {Kind::components_at_most, k}; }
  static GraphProperty max_degree_greater(int k) { return {Kind::max_degree_greater, k}; }
  static GraphProperty isolated_at_most(int k) { return {Kind::isolated_at_most, k}; }
  static GraphProperty clique_greater(int k) { return {Kind::clique_greater, k}; }

  // "connected", "components<=K", "max-degree>K", "isolated<=K", "clique>K".
  static GraphProperty parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const GraphProperty&, const GraphProperty&) = default;
};

std::vector<GraphProperty> all_property_kinds(int k);

bool eval_property(const GraphProperty& p, const EdgeSet& es);

using GraphPredicate = std::function<bool(const EdgeSet&)>;

// Critical edge set: non-edges e for which some superset E' of E satisfies
// the property while E' minus e does not. Closed-form per property; the
// clique case runs an exact certificate search and falls back to the
// conservative superset (all non-edges) only when the search budget runs out.
EdgeSet critical_set(const EdgeSet& es, const GraphProperty& p);

// Literal brute-force evaluation of the definition, d <= 6.
EdgeSet critical_set_oracle(const EdgeSet& es, const GraphPredicate& predicate);
EdgeSet critical_set_oracle(const EdgeSet& es, const GraphProperty& p);

}  // namespace tvgm

#endif  // TVGM_GRAPH_PROPS_HPP
