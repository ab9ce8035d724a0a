#include "samplenet/output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include "samplenet/errors.hpp"

namespace samplenet::io {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_variance_csv(std::ostream& out, const Eigen::MatrixXd& variances) {
  out << "t,agent,post_var\n";
  for (Eigen::Index t = 0; t < variances.rows(); ++t) {
    for (Eigen::Index i = 0; i < variances.cols(); ++i) {
      out << t << ',' << i << ',' << format_double(variances(t, i)) << '\n';
    }
  }
}

void write_trajectory_header(std::ostream& out) {
  out << "replica,t,agent,theta,signal,message,post_mean\n";
}

void append_trajectory(std::ostream& out, const gaussian::GaussianTrajectory& tr) {
  const auto theta = format_double(tr.theta);
  for (int t = 0; t <= tr.horizon(); ++t) {
    for (int i = 0; i < tr.agents(); ++i) {
      out << tr.replica << ',' << t << ',' << i << ',' << theta << ','
          << format_double(tr.signals(i)) << ',';
      if (t < tr.horizon()) out << format_double(tr.messages(t, i));
      out << ',' << format_double(tr.post_means(t, i)) << '\n';
    }
  }
}

void write_belief_header(std::ostream& out) { out << "replica,t,agent,belief,message\n"; }

void append_edge_run(std::ostream& out, const binary_edge::EdgeRun& run) {
  for (int t = 0; t <= run.horizon(); ++t) {
    for (int a = 0; a < 2; ++a) {
      out << run.replica << ',' << t << ',' << a << ',' << format_double(run.beliefs[t][a]) << ',';
      if (t < run.horizon()) out << run.messages[t][a];
      out << '\n';
    }
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  j["engine"] = std::string(to_string(c.engine));
  j["topology"] = {{"kind", std::string(to_string(c.topology.kind))}, {"n", c.topology.n}};
  if (c.topology.edges) {
    json edges = json::array();
    for (auto [a, b] : *c.topology.edges) edges.push_back({a, b});
    j["topology"]["edges"] = edges;
  }
  if (c.engine == Engine::Gaussian) {
    j["signals"] = {{"a", c.a}};
  } else {
    j["signals"] = {{"x1", *c.x1}, {"x2", *c.x2}};
    j["mode"] = std::string(binary_edge::to_string(c.mode));
    j["grid_size"] = c.grid_size;
  }
  j["horizon"] = c.horizon;
  j["replicas"] = c.replicas;
  j["seed"] = c.master_seed;
  j["checkpoints"] = c.effective_checkpoints();
  if (c.diagnostics) {
    const auto& d = *c.diagnostics;
    j["diagnostics"] = {{"observer", d.observer},     {"observed", d.observed},
                        {"lambda", d.lambda},         {"thresholds", d.thresholds},
                        {"t1", d.t1},                 {"t2", d.t2},
                        {"variance_round", d.variance_round}};
  }
  return j;
}

namespace {

json quantiles_json(const stats::QuantileSet& q) {
  return {{"q10", q.q10}, {"q50", q.q50}, {"q90", q.q90}};
}

json covariance_json(const montecarlo::CovarianceEstimate& e) {
  return {{"estimate", e.estimate},
          {"stderr", e.stderr},
          {"samples", e.samples},
          {"mode", e.same_time ? "variance" : "covariance"},
          {"degenerate", e.degenerate},
          {"flagged", e.flagged}};
}

}  // namespace

json summary_to_json(const montecarlo::ReplicaSummary& s) {
  json j;
  j["engine"] = std::string(to_string(s.engine));
  j["replicas"] = s.replicas;
  j["master_seed"] = s.master_seed;
  j["gaps"] = json::array();
  for (const auto& g : s.gaps) {
    j["gaps"].push_back({{"round", g.round},
                         {"agreement", quantiles_json(g.agreement)},
                         {"oracle", quantiles_json(g.oracle)}});
  }
  if (!s.z1.empty()) {
    j["z1"] = json::array();
    for (const auto& z : s.z1) {
      j["z1"].push_back({{"u", z.u},
                         {"mean", z.mean},
                         {"stderr", z.stderr},
                         {"target", z.target},
                         {"within_4_stderr", z.within}});
    }
  }
  if (!s.increments.empty()) {
    j["increments"] = json::array();
    for (const auto& inc : s.increments) {
      json e = covariance_json(inc.estimate);
      e["kind"] = inc.kind;
      if (inc.kind == "indicator") e["u"] = inc.u;
      e["t1"] = inc.t1;
      e["t2"] = inc.t2;
      j["increments"].push_back(e);
    }
  }
  if (!s.variance_identity.empty()) {
    j["variance_identity"] = json::array();
    for (const auto& v : s.variance_identity) {
      j["variance_identity"].push_back({{"agent", v.agent},
                                        {"round", v.round},
                                        {"empirical", v.empirical},
                                        {"stderr", v.stderr},
                                        {"one_minus_sigma", v.total_variance_form},
                                        {"sigma_times_one_minus_sigma", v.product_form},
                                        {"matching", v.matching}});
    }
  }
  if (!s.averaging.empty()) {
    j["averaging"] = json::array();
    for (const auto& [u, a] : s.averaging) {
      j["averaging"].push_back({{"u", u},
                                {"m11", a.m11},
                                {"m12", a.m12},
                                {"m22", a.m22},
                                {"mean_square_difference", a.curvature},
                                {"minimizer", a.minimizer},
                                {"min_value", a.min_value},
                                {"interior", a.interior},
                                {"constant", a.constant}});
    }
  }
  j["jitter_events"] = json::array();
  for (const auto& e : s.jitter_events) {
    j["jitter_events"].push_back({{"agent", e.agent}, {"round", e.round}});
  }
  return j;
}

json document(const std::string& command, json payload) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  for (auto& [key, value] : payload.items()) doc[key] = value;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["generated_at"] = stamp;
  return doc;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<int>(k);
  }
  throw ValidationError("csv has no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: missing header");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw ValidationError("csv: row " + std::to_string(table.rows.size() + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace samplenet::io
