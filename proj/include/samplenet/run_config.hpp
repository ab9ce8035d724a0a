#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "samplenet/binary_edge.hpp"
#include "samplenet/network.hpp"

namespace samplenet {

enum class Engine { Gaussian, BinaryEdge };

Engine parse_engine(std::string_view name);
std::string_view to_string(Engine engine);

struct TopologySpec {
  TopologyKind kind = TopologyKind::Edge;
  int n = 2;
  std::optional<EdgeList> edges;
};

struct DiagnosticsSpec {
  int observer = 0;  // i: the agent forming Z1(T)
  int observed = 1;  // j: the neighbor whose messages are averaged
  double lambda = 0.5;
  std::vector<double> thresholds{-1.0, 0.0, 1.0};
  int t1 = 3;
  int t2 = 7;
  int variance_round = 5;
};

struct OutputSpec {
  std::string dir = "out";
  bool trajectories = true;
  bool variances = true;
  bool summary = true;
};

struct RunConfig {
  Engine engine = Engine::Gaussian;
  TopologySpec topology;
  std::vector<double> a;  // gaussian signal coefficients, one per agent
  std::optional<double> x1;
  std::optional<double> x2;
  int horizon = 500;
  long replicas = 1;
  int grid_size = 2001;
  binary_edge::Mode mode = binary_edge::Mode::Sampling;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::vector<int> checkpoints;  // rounds at which gap quantiles are reported
  std::optional<DiagnosticsSpec> diagnostics;
  OutputSpec output;

  /// Throws ValidationError naming the offending field and constraint.
  void validate() const;
  NetworkGraph graph() const;
  /// Sorted, deduplicated checkpoints; defaults to {horizon}.
  std::vector<int> effective_checkpoints() const;
};

}  // namespace samplenet
