#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace samplenet {

enum class TopologyKind { Edge, Path, Cycle, Clique, Custom };

TopologyKind parse_topology_kind(std::string_view name);
std::string_view to_string(TopologyKind kind);

using EdgeList = std::vector<std::pair<int, int>>;

/// Undirected communication graph on agents 0..n-1.
///
/// Neighbor lists are sorted and duplicate free, adjacency is symmetric and
/// there are no self-loops. The graph is immutable once built.
class NetworkGraph {
 public:
  /// Builds a graph from an explicit edge list. Rejects self-loops,
  /// duplicate edges (in either orientation) and out-of-range ids.
  static NetworkGraph from_edges(int n, const EdgeList& edges);

  int size() const { return static_cast<int>(adjacency_.size()); }
  std::span<const int> neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  bool adjacent(int i, int j) const;
  /// Each undirected edge once, as (min, max), in lexicographic order.
  EdgeList edges() const;
  /// Component label per vertex; labels are dense and ordered by first vertex.
  std::vector<int> components() const;

 private:
  explicit NetworkGraph(std::vector<std::vector<int>> adjacency)
      : adjacency_(std::move(adjacency)) {}

  std::vector<std::vector<int>> adjacency_;
};

/// Standard topologies. `edges` is only read for TopologyKind::Custom.
NetworkGraph build_topology(TopologyKind kind, int n,
                            const std::optional<EdgeList>& edges = std::nullopt);

/// True iff every vertex is reachable from vertex 0.
bool is_connected(const NetworkGraph& g);

}  // namespace samplenet
