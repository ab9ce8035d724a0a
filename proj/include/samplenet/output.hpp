#pragma once

// File formats.
//
//   variances.csv     t,agent,post_var                       (deterministic)
//   trajectories.csv  replica,t,agent,theta,signal,message,post_mean
//   beliefs.csv       replica,t,agent,belief,message
//
// Rows run t = 0..T; the message column is empty at t = T since no message is
// sent after the last round. Doubles are written with 17 significant digits.
// JSON documents carry "schema_version": 1 and keep the only
// non-reproducible value in the top-level "generated_at" key.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "samplenet/binary_edge.hpp"
#include "samplenet/gaussian.hpp"
#include "samplenet/montecarlo.hpp"
#include "samplenet/run_config.hpp"

namespace samplenet::io {

inline constexpr int kSchemaVersion = 1;

std::string format_double(double value);

void write_variance_csv(std::ostream& out, const Eigen::MatrixXd& variances);

void write_trajectory_header(std::ostream& out);
void append_trajectory(std::ostream& out, const gaussian::GaussianTrajectory& tr);

void write_belief_header(std::ostream& out);
void append_edge_run(std::ostream& out, const binary_edge::EdgeRun& run);

nlohmann::json config_to_json(const RunConfig& config);
nlohmann::json summary_to_json(const montecarlo::ReplicaSummary& summary);

/// Wraps a payload with schema_version and generated_at.
nlohmann::json document(const std::string& command, nlohmann::json payload);

/// Minimal reader for the CSV files above (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace samplenet::io
