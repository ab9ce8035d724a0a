#include "samplenet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "samplenet/errors.hpp"

namespace samplenet {

Engine parse_engine(std::string_view name) {
  if (name == "gaussian") return Engine::Gaussian;
  if (name == "binary_edge" || name == "binary-edge") return Engine::BinaryEdge;
  throw ValidationError("engine: unknown engine '" + std::string(name) +
                        "' (expected gaussian or binary_edge)");
}

std::string_view to_string(Engine engine) {
  return engine == Engine::Gaussian ? "gaussian" : "binary_edge";
}

namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw ValidationError(field + ": " + constraint);
}

}  // namespace

NetworkGraph RunConfig::graph() const {
  try {
    return build_topology(topology.kind, topology.n, topology.edges);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("topology: ") + e.what());
  }
}

std::vector<int> RunConfig::effective_checkpoints() const {
  std::vector<int> cps = checkpoints.empty() ? std::vector<int>{horizon} : checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

void RunConfig::validate() const {
  require(horizon >= 1, "horizon", "must be >= 1, got " + std::to_string(horizon));
  require(replicas >= 1, "replicas", "must be >= 1, got " + std::to_string(replicas));
  require(grid_size >= 2, "grid_size", "must be >= 2, got " + std::to_string(grid_size));
  require(workers >= 1, "workers", "must be >= 1, got " + std::to_string(workers));
  const auto g = graph();
  const int n = g.size();

  if (engine == Engine::BinaryEdge) {
    require(topology.kind == TopologyKind::Edge && n == 2, "topology",
            "binary_edge requires edge topology");
    require(x1.has_value() && x2.has_value(), "signals", "binary_edge requires x1 and x2");
    require(*x1 >= 0.0 && *x1 <= 1.0, "signals.x1", "must lie in [0, 1]");
    require(*x2 >= 0.0 && *x2 <= 1.0, "signals.x2", "must lie in [0, 1]");
    require(*x1 * *x2 + (1.0 - *x1) * (1.0 - *x2) > 0.0, "signals",
            "x1, x2 must not be (0, 1) or (1, 0): the true posterior is undefined");
    require(a.empty(), "signals.a", "only valid for the gaussian engine");
  } else {
    require(static_cast<int>(a.size()) == n, "signals.a",
            "gaussian requires one coefficient per agent (n=" + std::to_string(n) + "), got " +
                std::to_string(a.size()));
    require(std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }),
            "signals.a", "coefficients must be finite");
    require(!x1 && !x2, "signals", "x1/x2 are only valid for the binary_edge engine");
  }

  for (int c : checkpoints) {
    require(c >= 0 && c <= horizon, "checkpoints",
            "round " + std::to_string(c) + " outside [0, " + std::to_string(horizon) + "]");
  }

  if (diagnostics) {
    const auto& d = *diagnostics;
    require(d.observer >= 0 && d.observer < n, "diagnostics.observer", "agent id out of range");
    require(d.observed >= 0 && d.observed < n, "diagnostics.observed", "agent id out of range");
    require(d.lambda >= 0.0 && d.lambda <= 1.0, "diagnostics.lambda", "must lie in [0, 1]");
    require(d.t1 >= 0 && d.t1 < horizon, "diagnostics.t1",
            "must lie in [0, " + std::to_string(horizon - 1) + "]");
    require(d.t2 >= 0 && d.t2 < horizon, "diagnostics.t2",
            "must lie in [0, " + std::to_string(horizon - 1) + "]");
    require(d.t1 <= d.t2, "diagnostics.t1", "must not exceed t2");
    require(d.variance_round >= 0 && d.variance_round <= horizon, "diagnostics.variance_round",
            "must lie in [0, " + std::to_string(horizon) + "]");
    if (engine == Engine::Gaussian) {
      require(!d.thresholds.empty(), "diagnostics.thresholds", "must not be empty");
      require(std::all_of(d.thresholds.begin(), d.thresholds.end(),
                          [](double v) { return std::isfinite(v); }),
              "diagnostics.thresholds", "must be finite");
      require(g.adjacent(d.observer, d.observed), "diagnostics",
              "agents " + std::to_string(d.observer) + " and " + std::to_string(d.observed) +
                  " are not adjacent");
    }
  }
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

void check_keys(const YAML::Node& node, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) {
    throw ValidationError((path.empty() ? std::string("config") : path) +
                          ": expected a mapping (line " + std::to_string(line_of(node)) + ")");
  }
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ValidationError("unknown key '" + join(path, key) + "' (line " +
                            std::to_string(line_of(kv.first)) + ")");
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(field + ": cannot parse '" + (node.IsScalar() ? node.Scalar() : "?") +
                          "' (line " + std::to_string(line_of(node)) + ")");
  }
}

template <typename T>
std::vector<T> sequence(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) {
    throw ValidationError(field + ": expected a list (line " + std::to_string(line_of(node)) + ")");
  }
  std::vector<T> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(scalar<T>(node[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

bool flag(const YAML::Node& node, const std::string& field) { return scalar<bool>(node, field); }

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ValidationError("config: empty document");
  check_keys(root, "",
             {"engine", "topology", "signals", "horizon", "replicas", "grid_size", "mode", "seed",
              "workers", "checkpoints", "diagnostics", "output"});

  RunConfig cfg;
  if (!root["engine"]) throw ValidationError("engine: required");
  cfg.engine = parse_engine(scalar<std::string>(root["engine"], "engine"));

  if (auto topo = root["topology"]) {
    check_keys(topo, "topology", {"kind", "n", "edges"});
    if (topo["kind"]) {
      try {
        cfg.topology.kind = parse_topology_kind(scalar<std::string>(topo["kind"], "topology.kind"));
      } catch (const ValidationError& e) {
        throw ValidationError(std::string("topology.kind: ") + e.what());
      }
    }
    if (topo["n"]) cfg.topology.n = scalar<int>(topo["n"], "topology.n");
    if (topo["edges"]) {
      EdgeList edges;
      const auto list = topo["edges"];
      if (!list.IsSequence()) throw ValidationError("topology.edges: expected a list of [i, j] pairs");
      for (std::size_t k = 0; k < list.size(); ++k) {
        const auto field = "topology.edges[" + std::to_string(k) + "]";
        const auto pair = sequence<int>(list[k], field);
        if (pair.size() != 2) throw ValidationError(field + ": expected [i, j]");
        edges.emplace_back(pair[0], pair[1]);
      }
      cfg.topology.edges = std::move(edges);
    }
  }

  if (auto sig = root["signals"]) {
    check_keys(sig, "signals", {"a", "x1", "x2"});
    if (sig["a"]) cfg.a = sequence<double>(sig["a"], "signals.a");
    if (sig["x1"]) cfg.x1 = scalar<double>(sig["x1"], "signals.x1");
    if (sig["x2"]) cfg.x2 = scalar<double>(sig["x2"], "signals.x2");
  }

  if (root["horizon"]) cfg.horizon = scalar<int>(root["horizon"], "horizon");
  if (root["replicas"]) cfg.replicas = scalar<long>(root["replicas"], "replicas");
  if (root["grid_size"]) cfg.grid_size = scalar<int>(root["grid_size"], "grid_size");
  if (root["mode"]) {
    if (cfg.engine != Engine::BinaryEdge) {
      throw ValidationError("mode: only valid for the binary_edge engine");
    }
    try {
      cfg.mode = binary_edge::parse_mode(scalar<std::string>(root["mode"], "mode"));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("mode: ") + e.what());
    }
  }
  if (root["seed"]) cfg.master_seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["workers"]) cfg.workers = scalar<int>(root["workers"], "workers");
  if (root["checkpoints"]) cfg.checkpoints = sequence<int>(root["checkpoints"], "checkpoints");

  if (auto diag = root["diagnostics"]) {
    check_keys(diag, "diagnostics",
               {"observer", "observed", "lambda", "thresholds", "t1", "t2", "variance_round"});
    DiagnosticsSpec d;
    if (diag["observer"]) d.observer = scalar<int>(diag["observer"], "diagnostics.observer");
    if (diag["observed"]) d.observed = scalar<int>(diag["observed"], "diagnostics.observed");
    if (diag["lambda"]) d.lambda = scalar<double>(diag["lambda"], "diagnostics.lambda");
    if (diag["thresholds"]) d.thresholds = sequence<double>(diag["thresholds"], "diagnostics.thresholds");
    if (diag["t1"]) d.t1 = scalar<int>(diag["t1"], "diagnostics.t1");
    if (diag["t2"]) d.t2 = scalar<int>(diag["t2"], "diagnostics.t2");
    if (diag["variance_round"]) {
      d.variance_round = scalar<int>(diag["variance_round"], "diagnostics.variance_round");
    }
    cfg.diagnostics = d;
  }

  if (auto out = root["output"]) {
    check_keys(out, "output", {"dir", "trajectories", "variances", "summary"});
    if (out["dir"]) cfg.output.dir = scalar<std::string>(out["dir"], "output.dir");
    if (out["trajectories"]) cfg.output.trajectories = flag(out["trajectories"], "output.trajectories");
    if (out["variances"]) cfg.output.variances = flag(out["variances"], "output.variances");
    if (out["summary"]) cfg.output.summary = flag(out["summary"], "output.summary");
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace samplenet
