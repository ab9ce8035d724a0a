#include "samplenet/commands.hpp"

#include <fstream>
#include <ostream>

#include "samplenet/errors.hpp"
#include "samplenet/gaussian.hpp"
#include "samplenet/montecarlo.hpp"
#include "samplenet/output.hpp"

namespace samplenet::commands {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path prepare_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_file(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

double oracle_variance(const std::vector<double>& a) {
  double precision = 1.0;
  for (double v : a) precision += v * v;
  return 1.0 / precision;
}

json gaussian_run(const RunConfig& config, Console console, const std::string& command) {
  config.validate();
  if (config.engine != Engine::Gaussian) {
    throw ValidationError("engine: '" + command + "' requires engine gaussian");
  }
  const auto g = config.graph();
  const auto s = gaussian::GaussianSignalStructure::from_coefficients(config.a);
  const auto schedule = gaussian::compute_schedule(g, s, config.horizon);
  const auto dir = prepare_dir(config.output.dir);

  if (config.output.variances) {
    auto out = open_file(dir / "variances.csv");
    io::write_variance_csv(out, schedule.variances());
  }

  std::ofstream traj;
  montecarlo::ReplicaObserver observer;
  if (config.output.trajectories) {
    traj = open_file(dir / "trajectories.csv");
    io::write_trajectory_header(traj);
    observer.on_gaussian = [&traj](const gaussian::GaussianTrajectory& tr) {
      io::append_trajectory(traj, tr);
    };
  }
  const auto summary = montecarlo::run_replicas(config, observer);
  if (traj.is_open() && !traj) throw IoError("failed writing trajectories.csv");

  const auto first = gaussian::simulate_realization(g, s, schedule, config.master_seed, 0);
  const auto oracle = gaussian::bayes_oracle(
      s, std::span<const double>(first.signals.data(), static_cast<std::size_t>(g.size())));
  const double sigma_inf = oracle_variance(config.a);

  json payload;
  payload["config"] = io::config_to_json(config);
  payload["connected"] = is_connected(g);
  payload["sigma_inf"] = sigma_inf;
  std::vector<double> final_vars;
  std::vector<double> final_means;
  for (int i = 0; i < g.size(); ++i) {
    final_vars.push_back(first.post_vars(config.horizon, i));
    final_means.push_back(first.post_means(config.horizon, i));
  }
  payload["final_variances"] = final_vars;
  payload["replica0"] = {{"theta", first.theta},
                         {"signals", std::vector<double>(first.signals.data(),
                                                         first.signals.data() + g.size())},
                         {"final_means", final_means},
                         {"oracle_mean", oracle.mean}};
  payload["summary"] = io::summary_to_json(summary);
  auto doc = io::document(command, std::move(payload));
  if (config.output.summary) write_json(dir / "summary.json", doc);

  if (console.out) {
    auto& os = *console.out;
    if (!is_connected(g)) {
      os << "warning: graph is disconnected; agreement holds per component only\n";
    }
    os << "sigma_inf = " << io::format_double(sigma_inf) << '\n';
    os << "replica 0: X_inf = " << io::format_double(oracle.mean) << '\n';
    for (int i = 0; i < g.size(); ++i) {
      os << "replica 0: X_" << i << "(" << config.horizon
         << ") = " << io::format_double(final_means[i]) << '\n';
    }
    for (const auto& gap : summary.gaps) {
      os << "t=" << gap.round << ": median agreement gap " << io::format_double(gap.agreement.q50)
         << ", median oracle gap " << io::format_double(gap.oracle.q50) << '\n';
    }
  }
  return doc;
}

}  // namespace

json cmd_gaussian(const RunConfig& config, Console console) {
  return gaussian_run(config, console, "gaussian");
}

json cmd_binary_edge(const RunConfig& config, Console console) {
  config.validate();
  if (config.engine != Engine::BinaryEdge) {
    throw ValidationError("engine: 'binary-edge' requires engine binary_edge");
  }
  const auto dir = prepare_dir(config.output.dir);
  std::ofstream beliefs;
  montecarlo::ReplicaObserver observer;
  if (config.output.trajectories) {
    beliefs = open_file(dir / "beliefs.csv");
    io::write_belief_header(beliefs);
    observer.on_edge = [&beliefs](const binary_edge::EdgeRun& run) {
      io::append_edge_run(beliefs, run);
    };
  }
  const auto summary = montecarlo::run_replicas(config, observer);
  if (beliefs.is_open() && !beliefs) throw IoError("failed writing beliefs.csv");

  const double x1 = *config.x1;
  const double x2 = *config.x2;
  const auto first = binary_edge::run_edge(x1, x2, config.horizon, config.mode, config.grid_size,
                                           config.master_seed, 0);
  auto limit = [](double x) -> json {
    if (x > 0.5 && x <= 1.0) return binary_edge::action_limit_posterior(x);
    return nullptr;
  };

  json payload;
  payload["config"] = io::config_to_json(config);
  payload["x1"] = x1;
  payload["x2"] = x2;
  payload["mode"] = std::string(binary_edge::to_string(config.mode));
  payload["grid_size"] = config.grid_size;
  payload["true_posterior"] = first.true_posterior;
  payload["action_limits"] = {limit(x1), limit(x2)};
  payload["replica0"] = {{"final_beliefs", {first.beliefs.back()[0], first.beliefs.back()[1]}}};
  payload["summary"] = io::summary_to_json(summary);
  auto doc = io::document("binary-edge", std::move(payload));
  if (config.output.summary) write_json(dir / "summary.json", doc);

  if (console.out) {
    auto& os = *console.out;
    os << "true posterior = " << io::format_double(first.true_posterior) << '\n';
    os << "replica 0: b_0(" << config.horizon << ") = " << io::format_double(first.beliefs.back()[0])
       << ", b_1(" << config.horizon << ") = " << io::format_double(first.beliefs.back()[1]) << '\n';
    for (const auto& gap : summary.gaps) {
      os << "t=" << gap.round << ": median agreement gap " << io::format_double(gap.agreement.q50)
         << ", median oracle gap " << io::format_double(gap.oracle.q50) << '\n';
    }
  }
  return doc;
}

json cmd_diagnostics(const RunConfig& base, Console console) {
  RunConfig config = base;
  if (!config.diagnostics) config.diagnostics = DiagnosticsSpec{};
  config.validate();
  if (config.engine != Engine::Gaussian) {
    throw ValidationError("engine: 'diagnostics' requires engine gaussian");
  }
  const auto dir = prepare_dir(config.output.dir);
  const auto summary = montecarlo::run_replicas(config);

  json payload;
  payload["config"] = io::config_to_json(config);
  payload["summary"] = io::summary_to_json(summary);
  auto doc = io::document("diagnostics", std::move(payload));
  if (config.output.summary) write_json(dir / "diagnostics.json", doc);

  if (console.out) {
    auto& os = *console.out;
    for (const auto& z : summary.z1) {
      os << "z1 u=" << io::format_double(z.u) << ": mean " << io::format_double(z.mean)
         << " +- " << io::format_double(z.stderr) << " vs Phi(u) " << io::format_double(z.target)
         << (z.within ? "  ok" : "  FLAG") << '\n';
    }
    for (const auto& inc : summary.increments) {
      const auto& e = inc.estimate;
      os << inc.kind << " increments (" << inc.t1 << ", " << inc.t2 << ")"
         << (inc.kind == "indicator" ? " u=" + io::format_double(inc.u) : std::string()) << ": "
         << (e.same_time ? "variance " : "covariance ") << io::format_double(e.estimate) << " +- "
         << io::format_double(e.stderr) << (e.flagged ? "  FLAG" : "") << '\n';
    }
    for (const auto& v : summary.variance_identity) {
      os << "Var(X_" << v.agent << "(" << v.round << ")) = " << io::format_double(v.empirical)
         << " +- " << io::format_double(v.stderr) << "; 1-sigma "
         << io::format_double(v.total_variance_form) << ", sigma(1-sigma) "
         << io::format_double(v.product_form) << " -> " << v.matching << '\n';
    }
  }
  return doc;
}

RunConfig fig1_config() {
  RunConfig c;
  c.engine = Engine::Gaussian;
  c.topology = {TopologyKind::Edge, 2, std::nullopt};
  c.a = {1.0, 2.0};
  c.horizon = 500;
  c.replicas = 1;
  c.output.dir = "out/fig1";
  return c;
}

RunConfig fig2_config(TopologyKind kind) {
  RunConfig c;
  c.engine = Engine::Gaussian;
  c.topology = {kind, 7, std::nullopt};
  c.a = {1, 2, 3, 4, 5, 6, 7};
  c.horizon = 20;
  c.replicas = 1;
  c.output.trajectories = false;
  c.output.variances = true;
  c.output.dir = "out/fig2";
  return c;
}

json cmd_repro_fig1(const RunConfig& config, Console console) {
  return gaussian_run(config, console, "repro-fig1");
}

json cmd_repro_fig2(const RunConfig& base, Console console) {
  const auto dir = prepare_dir(base.output.dir);
  json payload;
  std::vector<std::vector<double>> first_agent;
  for (auto kind : {TopologyKind::Clique, TopologyKind::Cycle}) {
    RunConfig c = fig2_config(kind);
    c.output = base.output;
    c.validate();
    const auto g = c.graph();
    const auto s = gaussian::GaussianSignalStructure::from_coefficients(c.a);
    const auto vars = gaussian::compute_schedule(g, s, c.horizon).variances();
    if (c.output.variances) {
      auto out = open_file(dir / (std::string(to_string(kind)) + "_variances.csv"));
      io::write_variance_csv(out, vars);
    }
    std::vector<double> series(vars.rows());
    for (Eigen::Index t = 0; t < vars.rows(); ++t) series[t] = vars(t, 0);
    payload[std::string(to_string(kind))] = {{"agent0_variance", series}};
    first_agent.push_back(std::move(series));
  }
  const double sigma_inf = oracle_variance(fig2_config(TopologyKind::Clique).a);
  bool below = true;
  for (std::size_t t = 2; t < first_agent[0].size(); ++t) {
    below = below && first_agent[0][t] < first_agent[1][t];
  }
  payload["sigma_inf"] = sigma_inf;
  payload["clique_below_cycle_from_t2"] = below;
  auto doc = io::document("repro-fig2", std::move(payload));
  if (base.output.summary) write_json(dir / "summary.json", doc);
  if (console.out) {
    auto& os = *console.out;
    os << "sigma_inf = " << io::format_double(sigma_inf) << '\n';
    os << "t,clique_var_agent0,cycle_var_agent0\n";
    for (std::size_t t = 0; t < first_agent[0].size(); ++t) {
      os << t << ',' << io::format_double(first_agent[0][t]) << ','
         << io::format_double(first_agent[1][t]) << '\n';
    }
  }
  return doc;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ValidationError&) {
    return kValidation;
  } catch (const UndefinedPosterior&) {
    return kValidation;
  } catch (const NumericalDegeneracy&) {
    return kNumerical;
  } catch (const ReplicaError& e) {
    return e.numerical() ? kNumerical : kValidation;
  } catch (const IoError&) {
    return kIo;
  } catch (const std::filesystem::filesystem_error&) {
    return kIo;
  } catch (...) {
    return kNumerical;
  }
}

}  // namespace samplenet::commands
