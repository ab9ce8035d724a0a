#include "samplenet/network.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "samplenet/errors.hpp"

namespace samplenet {

TopologyKind parse_topology_kind(std::string_view name) {
  if (name == "edge") return TopologyKind::Edge;
  if (name == "path") return TopologyKind::Path;
  if (name == "cycle") return TopologyKind::Cycle;
  if (name == "clique") return TopologyKind::Clique;
  if (name == "custom") return TopologyKind::Custom;
  throw ValidationError("unknown topology kind '" + std::string(name) +
                        "' (expected edge, path, cycle, clique or custom)");
}

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Edge: return "edge";
    case TopologyKind::Path: return "path";
    case TopologyKind::Cycle: return "cycle";
    case TopologyKind::Clique: return "clique";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

NetworkGraph NetworkGraph::from_edges(int n, const EdgeList& edges) {
  if (n < 1) throw ValidationError("graph needs at least one vertex, got n=" + std::to_string(n));
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw ValidationError("edge [" + std::to_string(i) + ", " + std::to_string(j) +
                            "] references a vertex outside 0.." + std::to_string(n - 1));
    }
    if (i == j) throw ValidationError("self-loop at vertex " + std::to_string(i));
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (int i = 0; i < n; ++i) {
    auto& nb = adj[i];
    std::sort(nb.begin(), nb.end());
    if (auto dup = std::adjacent_find(nb.begin(), nb.end()); dup != nb.end()) {
      throw ValidationError("duplicate edge between " + std::to_string(std::min(i, *dup)) +
                            " and " + std::to_string(std::max(i, *dup)));
    }
  }
  return NetworkGraph(std::move(adj));
}

bool NetworkGraph::adjacent(int i, int j) const {
  if (i < 0 || j < 0 || i >= size() || j >= size()) return false;
  const auto& nb = adjacency_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

EdgeList NetworkGraph::edges() const {
  EdgeList out;
  for (int i = 0; i < size(); ++i) {
    for (int j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<int> NetworkGraph::components() const {
  std::vector<int> label(size(), -1);
  int next = 0;
  for (int root = 0; root < size(); ++root) {
    if (label[root] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(root);
    label[root] = next;
    while (!frontier.empty()) {
      int v = frontier.front();
      frontier.pop();
      for (int w : adjacency_[v]) {
        if (label[w] < 0) {
          label[w] = next;
          frontier.push(w);
        }
      }
    }
    ++next;
  }
  return label;
}

NetworkGraph build_topology(TopologyKind kind, int n, const std::optional<EdgeList>& edges) {
  if (n < 1) throw ValidationError("topology needs n >= 1, got n=" + std::to_string(n));
  EdgeList list;
  switch (kind) {
    case TopologyKind::Edge:
      if (n != 2) throw ValidationError("edge topology requires n=2, got n=" + std::to_string(n));
      list = {{0, 1}};
      break;
    case TopologyKind::Path:
      for (int i = 0; i + 1 < n; ++i) list.emplace_back(i, i + 1);
      break;
    case TopologyKind::Cycle:
      // n=2 would duplicate the single edge and n=1 would be a self-loop.
      if (n < 3) throw ValidationError("cycle topology requires n>=3, got n=" + std::to_string(n));
      for (int i = 0; i < n; ++i) list.emplace_back(i, (i + 1) % n);
      break;
    case TopologyKind::Clique:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) list.emplace_back(i, j);
      break;
    case TopologyKind::Custom:
      if (!edges) throw ValidationError("custom topology requires an edge list");
      list = *edges;
      break;
  }
  return NetworkGraph::from_edges(n, list);
}

bool is_connected(const NetworkGraph& g) {
  const auto label = g.components();
  return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

}  // namespace samplenet
