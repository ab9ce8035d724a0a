// samplenet: command-line driver for the sampling-model simulators.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "samplenet/commands.hpp"
#include "samplenet/config.hpp"
#include "samplenet/errors.hpp"

using namespace samplenet;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> replicas;
  std::optional<int> workers;
  bool quiet = false;

  std::optional<int> observer;
  std::optional<int> observed;
  std::optional<double> lambda;
  std::vector<double> thresholds;
  std::optional<int> t1;
  std::optional<int> t2;
  std::optional<int> variance_round;

  void apply(RunConfig& c) const {
    if (seed) c.master_seed = *seed;
    if (out) c.output.dir = *out;
    if (replicas) c.replicas = *replicas;
    if (workers) c.workers = *workers;
  }

  void apply_diagnostics(RunConfig& c) const {
    auto& d = c.diagnostics ? *c.diagnostics : c.diagnostics.emplace();
    if (observer) d.observer = *observer;
    if (observed) d.observed = *observed;
    if (lambda) d.lambda = *lambda;
    if (!thresholds.empty()) d.thresholds = thresholds;
    if (t1) d.t1 = *t1;
    if (t2) d.t2 = *t2;
    if (variance_round) d.variance_round = *variance_round;
  }
};

RunConfig base_config(const Overrides& o, bool required) {
  if (o.config_path.empty()) {
    if (required) throw ValidationError("--config is required for this command");
    return {};
  }
  return load_config(o.config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian sampling-model social learning: simulators and diagnostics"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "YAML run configuration");
    sub->add_option("--seed", o.seed, "master seed (overrides the config file)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--replicas", o.replicas, "number of Monte-Carlo replicas");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_flag("--quiet", o.quiet, "suppress console output");
  };

  auto* gaussian = app.add_subcommand("gaussian", "Gaussian moment recursion and realizations");
  auto* binary = app.add_subcommand("binary-edge", "two-agent binary example on a single edge");
  auto* diagnostics = app.add_subcommand("diagnostics", "Monte-Carlo checks of the agreement proof");
  auto* fig1 = app.add_subcommand("repro-fig1", "edge, a=(1,2), T=500 realization");
  auto* fig2 = app.add_subcommand("repro-fig2", "clique(7) vs cycle(7) posterior variances, T=20");
  for (auto* sub : {gaussian, binary, diagnostics, fig1, fig2}) add_common(sub);

  diagnostics->add_option("--observer", o.observer, "agent i forming Z1(T)");
  diagnostics->add_option("--observed", o.observed, "neighbor j whose messages are averaged");
  diagnostics->add_option("--lambda", o.lambda, "mixing weight in [0, 1]");
  diagnostics->add_option("--u", o.thresholds, "thresholds u (repeatable)");
  diagnostics->add_option("--t1", o.t1, "first increment round");
  diagnostics->add_option("--t2", o.t2, "second increment round");
  diagnostics->add_option("--variance-round", o.variance_round, "round for the Var(X_i(t)) check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? commands::kSuccess : commands::kValidation;
  }

  commands::Console console{o.quiet ? nullptr : &std::cout};
  try {
    if (gaussian->parsed()) {
      auto c = base_config(o, true);
      o.apply(c);
      commands::cmd_gaussian(c, console);
    } else if (binary->parsed()) {
      auto c = base_config(o, true);
      o.apply(c);
      commands::cmd_binary_edge(c, console);
    } else if (diagnostics->parsed()) {
      auto c = base_config(o, true);
      o.apply(c);
      o.apply_diagnostics(c);
      commands::cmd_diagnostics(c, console);
    } else if (fig1->parsed()) {
      auto c = o.config_path.empty() ? commands::fig1_config() : base_config(o, true);
      o.apply(c);
      commands::cmd_repro_fig1(c, console);
    } else if (fig2->parsed()) {
      auto c = commands::fig2_config(TopologyKind::Clique);
      if (!o.config_path.empty()) c.output = load_config(o.config_path).output;
      o.apply(c);
      commands::cmd_repro_fig2(c, console);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return commands::exit_code_for_current_exception();
  }
  return commands::kSuccess;
}
