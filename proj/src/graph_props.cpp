#include "tvgm/graph_props.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <regex>

namespace tvgm {

EdgeSet::EdgeSet(int d, std::vector<Edge> edges) : d_(d), edges_(std::move(edges)) {
  for (const Edge& e : edges_)
    if (e.u == e.v || e.u < 0 || e.v >= d_)
      throw DataError("edge (" + std::to_string(e.u + 1) + ", " + std::to_string(e.v + 1) +
                      ") is invalid for d = " + std::to_string(d_));
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

EdgeSet EdgeSet::complete(int d) {
  std::vector<Edge> all;
  all.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int u = 0; u < d; ++u)
    for (int v = u + 1; v < d; ++v) all.emplace_back(u, v);
  EdgeSet es(d);
  es.edges_ = std::move(all);
  return es;
}

bool EdgeSet::contains(const Edge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool EdgeSet::insert(const Edge& e) {
  if (e.u == e.v || e.u < 0 || e.v >= d_)
    throw DataError("edge (" + std::to_string(e.u + 1) + ", " + std::to_string(e.v + 1) +
                    ") is invalid for d = " + std::to_string(d_));
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it != edges_.end() && *it == e) return false;
  edges_.insert(it, e);
  return true;
}

bool EdgeSet::erase(const Edge& e) {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || !(*it == e)) return false;
  edges_.erase(it);
  return true;
}

std::vector<int> EdgeSet::degrees() const {
  std::vector<int> deg(d_, 0);
  for (const Edge& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::vector<std::vector<int>> EdgeSet::adjacency() const {
  std::vector<std::vector<int>> adj(d_);
  for (const Edge& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

EdgeSet EdgeSet::united(const EdgeSet& other) const {
  EdgeSet out(std::max(d_, other.d_));
  std::set_union(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end(),
                 std::back_inserter(out.edges_));
  return out;
}

bool EdgeSet::includes(const EdgeSet& other) const {
  return std::includes(edges_.begin(), edges_.end(), other.edges_.begin(),
                       other.edges_.end());
}

EdgeSet EdgeSet::complement() const {
  EdgeSet out(d_);
  for (int u = 0; u < d_; ++u)
    for (int v = u + 1; v < d_; ++v)
      if (!contains({u, v})) out.edges_.emplace_back(u, v);
  return out;
}

EdgeSet edge_set_from_mask(int d, unsigned long long mask) {
  EdgeSet es(d);
  for (int u = 0; u < d; ++u)
    for (int v = u + 1; v < d; ++v)
      if (mask >> pair_index(d, u, v) & 1ULL) es.insert({u, v});
  return es;
}

int max_degree(const EdgeSet& es) {
  const auto deg = es.degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<int> component_labels(const EdgeSet& es) {
  UnionFind uf(es.d());
  for (const Edge& e : es) uf.unite(e.u, e.v);
  std::vector<int> label(es.d());
  for (int i = 0; i < es.d(); ++i) label[i] = uf.find(i);
  return label;
}

int count_components(const EdgeSet& es) {
  const auto label = component_labels(es);
  int count = 0;
  for (int i = 0; i < es.d(); ++i) count += label[i] == i;
  return count;
}

// Branch and bound over candidate sets ordered by degree; stops as soon as
// `target` is reached when target > 0.
class CliqueSearch {
 public:
  CliqueSearch(const EdgeSet& es, int target) : target_(target) {
    const int d = es.d();
    adj_.assign(d, std::vector<char>(d, 0));
    for (const Edge& e : es) adj_[e.u][e.v] = adj_[e.v][e.u] = 1;
    const auto deg = es.degrees();
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return deg[a] > deg[b]; });
    best_ = d > 0 ? 1 : 0;
    expand(0, order);
  }

  int best() const { return best_; }

 private:
  bool done() const { return target_ > 0 && best_ >= target_; }

  void expand(int size, std::vector<int> candidates) {
    while (!candidates.empty() && !done()) {
      if (size + static_cast<int>(candidates.size()) <= best_) return;
      const int pivot = candidates.front();
      candidates.erase(candidates.begin());
      std::vector<int> next;
      for (int w : candidates)
        if (adj_[pivot][w]) next.push_back(w);
      if (size + 1 > best_) best_ = size + 1;
      if (!next.empty()) expand(size + 1, std::move(next));
    }
  }

  std::vector<std::vector<char>> adj_;
  int target_;
  int best_ = 0;
};

}  // namespace

std::vector<std::vector<int>> connected_components(const EdgeSet& es) {
  const auto label = component_labels(es);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(es.d(), -1);
  for (int i = 0; i < es.d(); ++i) {
    if (slot[label[i]] < 0) {
      slot[label[i]] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[label[i]]].push_back(i);
  }
  return groups;
}

int count_isolated(const EdgeSet& es) {
  const auto deg = es.degrees();
  return static_cast<int>(std::count(deg.begin(), deg.end(), 0));
}

int max_clique_size(const EdgeSet& es) { return CliqueSearch(es, 0).best(); }

bool has_clique(const EdgeSet& es, int size) {
  if (size <= 0) return true;
  if (size > es.d()) return false;
  if (size == 1) return es.d() >= 1;
  if (size == 2) return !es.empty();
  return CliqueSearch(es, size).best() >= size;
}

GraphProperty GraphProperty::parse(const std::string& text) {
  static const std::regex pattern(
      R"(^\s*(connected|components\s*<=\s*(\d+)|max-degree\s*>\s*(\d+)|isolated\s*<=\s*(\d+)|clique\s*>\s*(\d+))\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw UsageError("unrecognized property '" + text +
                     "'; expected one of: connected, components<=K, max-degree>K, "
                     "isolated<=K, clique>K");
  if (m[2].matched) return components_at_most(std::stoi(m[2]));
  if (m[3].matched) return max_degree_greater(std::stoi(m[3]));
  if (m[4].matched) return isolated_at_most(std::stoi(m[4]));
  if (m[5].matched) return clique_greater(std::stoi(m[5]));
  return connected();
}

std::string GraphProperty::to_string() const {
  switch (kind) {
    case Kind::connected: return "connected";
    case Kind::components_at_most: return "components<=" + std::to_string(k);
    case Kind::max_degree_greater: return "max-degree>" + std::to_string(k);
    case Kind::isolated_at_most: return "isolated<=" + std::to_string(k);
    case Kind::clique_greater: return "clique>" + std::to_string(k);
  }
  return {};
}

std::vector<GraphProperty> all_property_kinds(int k) {
  return {GraphProperty::connected(), GraphProperty::components_at_most(k),
          GraphProperty::max_degree_greater(k), GraphProperty::isolated_at_most(k),
          GraphProperty::clique_greater(k)};
}

bool eval_property(const GraphProperty& p, const EdgeSet& es) {
  switch (p.kind) {
    case GraphProperty::Kind::connected: return count_components(es) == 1;
    case GraphProperty::Kind::components_at_most: return count_components(es) <= p.k;
    case GraphProperty::Kind::max_degree_greater: return max_degree(es) > p.k;
    case GraphProperty::Kind::isolated_at_most: return count_isolated(es) <= p.k;
    case GraphProperty::Kind::clique_greater: return has_clique(es, p.k + 1);
  }
  return false;
}

namespace {

EdgeSet crossing_pairs(const EdgeSet& es) {
  const auto label = component_labels(es);
  EdgeSet out(es.d());
  for (int u = 0; u < es.d(); ++u)
    for (int v = u + 1; v < es.d(); ++v)
      if (label[u] != label[v]) out.insert({u, v});
  return out;
}

// e = (u, v) is pivotal for max degree > k iff one endpoint can be lifted to
// exactly k + 1 using e plus edges to nodes that still have spare degree.
bool degree_certificate(const EdgeSet& es, const std::vector<int>& deg, int k, int hub,
                        int other) {
  int spare = 0;
  for (int w = 0; w < es.d(); ++w) {
    if (w == hub || w == other || es.contains({hub, w})) continue;
    if (deg[w] < k) ++spare;
  }
  return deg[hub] + 1 + spare >= k + 1;
}

constexpr long kCliqueBudget = 2'000'000;

// Looks for a (k+1)-set S containing e whose completion creates no other
// (k+1)-clique once e is removed. Returns 1 if found, 0 if none exists,
// -1 if the budget ran out.
int clique_certificate(const EdgeSet& es, const Edge& e, int k, long& budget) {
  const int d = es.d();
  const int extra = k - 1;
  std::vector<int> pool;
  const auto deg = es.degrees();
  for (int w = 0; w < d; ++w)
    if (w != e.u && w != e.v) pool.push_back(w);
  std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) { return deg[a] < deg[b]; });
  if (extra > static_cast<int>(pool.size())) return 0;

  std::vector<int> pick(extra);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (--budget < 0) return -1;
    EdgeSet f = es;
    std::vector<int> members = {e.u, e.v};
    for (int idx : pick) members.push_back(pool[idx]);
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) f.insert({members[a], members[b]});
    f.erase(e);
    if (!has_clique(f, k + 1)) return 1;

    int i = extra - 1;
    while (i >= 0 && pick[i] == static_cast<int>(pool.size()) - extra + i) --i;
    if (i < 0) return 0;
    ++pick[i];
    for (int j = i + 1; j < extra; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

EdgeSet critical_set(const EdgeSet& es, const GraphProperty& p) {
  const int d = es.d();
  EdgeSet out(d);
  // Monotone: if E already satisfies P, so does every E' \ {e} with E' >= E.
  if (eval_property(p, es)) return out;

  switch (p.kind) {
    case GraphProperty::Kind::connected:
      return crossing_pairs(es);
    case GraphProperty::Kind::components_at_most:
      if (p.k < 1) return out;
      return crossing_pairs(es);
    case GraphProperty::Kind::isolated_at_most: {
      const auto deg = es.degrees();
      for (int u = 0; u < d; ++u)
        for (int v = u + 1; v < d; ++v)
          if ((deg[u] == 0 || deg[v] == 0) && !es.contains({u, v})) out.insert({u, v});
      return out;
    }
    case GraphProperty::Kind::max_degree_greater: {
      const auto deg = es.degrees();
      for (int u = 0; u < d; ++u)
        for (int v = u + 1; v < d; ++v) {
          if (es.contains({u, v})) continue;
          if (degree_certificate(es, deg, p.k, u, v) || degree_certificate(es, deg, p.k, v, u))
            out.insert({u, v});
        }
      return out;
    }
    case GraphProperty::Kind::clique_greater: {
      long budget = kCliqueBudget;
      bool exhausted = false;
      for (int u = 0; u < d; ++u)
        for (int v = u + 1; v < d; ++v) {
          if (es.contains({u, v})) continue;
          const int found = exhausted ? -1 : clique_certificate(es, {u, v}, p.k, budget);
          if (found < 0) exhausted = true;
          if (found != 0) out.insert({u, v});
        }
      if (exhausted)
        std::cerr << "warning: clique certificate search exceeded its budget at d = " << d
                  << "; using all remaining non-edges as a conservative critical set\n";
      return out;
    }
  }
  return out;
}

EdgeSet critical_set_oracle(const EdgeSet& es, const GraphPredicate& predicate) {
  const int d = es.d();
  if (d > 6)
    throw OracleScaleError("critical_set_oracle enumerates supersets and supports d <= 6, got " +
                           std::to_string(d));
  const EdgeSet free = es.complement();
  EdgeSet out(d);
  for (const Edge& e : free) {
    std::vector<Edge> others;
    for (const Edge& f : free)
      if (!(f == e)) others.push_back(f);
    const unsigned long long count = 1ULL << others.size();
    for (unsigned long long mask = 0; mask < count; ++mask) {
      EdgeSet superset = es;
      for (std::size_t i = 0; i < others.size(); ++i)
        if (mask >> i & 1ULL) superset.insert(others[i]);
      EdgeSet without = superset;
      superset.insert(e);
      if (predicate(superset) && !predicate(without)) {
        out.insert(e);
        break;
      }
    }
  }
  return out;
}

EdgeSet critical_set_oracle(const EdgeSet& es, const GraphProperty& p) {
  return critical_set_oracle(es, [&p](const EdgeSet& g) { return eval_property(p, g); });
}

}  // namespace tvgm
