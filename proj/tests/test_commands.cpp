#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "samplenet/binary_edge.hpp"
#include "samplenet/commands.hpp"
#include "samplenet/config.hpp"
#include "samplenet/gaussian.hpp"
#include "samplenet/output.hpp"

using namespace samplenet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SAMPLENET_CLI_PATH;
const fs::path kConfigs = SAMPLENET_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("samplenet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

json without_timestamp(json doc) {
  doc.erase("generated_at");
  return doc;
}

io::CsvTable load_csv(const fs::path& p) {
  std::ifstream in(p);
  return io::read_csv(in);
}

}  // namespace

TEST_CASE("gaussian runs are byte-identical for a fixed seed") {
  const auto dir = scratch("gauss_repeat");
  const auto cfg = (kConfigs / "gaussian_edge.yaml").string();
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run("gaussian --config " + cfg + " --replicas 20 --quiet --out " +
                (dir / sub).string()) == 0);
  }
  CHECK(slurp(dir / "a" / "variances.csv") == slurp(dir / "b" / "variances.csv"));
  CHECK(without_timestamp(load_json(dir / "a" / "summary.json")) ==
        without_timestamp(load_json(dir / "b" / "summary.json")));

  REQUIRE(run("gaussian --config " + cfg + " --replicas 20 --quiet --seed 1 --out " +
              (dir / "c").string()) == 0);
  CHECK(without_timestamp(load_json(dir / "a" / "summary.json")) !=
        without_timestamp(load_json(dir / "c" / "summary.json")));
}

TEST_CASE("trajectory CSV round-trips the in-process simulation") {
  const auto dir = scratch("gauss_traj");
  REQUIRE(run("repro-fig1 --quiet --out " + dir.string()) == 0);
  const auto table = load_csv(dir / "trajectories.csv");
  CHECK(table.header == std::vector<std::string>{"replica", "t", "agent", "theta", "signal",
                                                 "message", "post_mean"});
  REQUIRE(table.rows.size() == 501 * 2);

  const auto cfg = commands::fig1_config();
  const auto g = cfg.graph();
  const auto s = gaussian::GaussianSignalStructure::from_coefficients(cfg.a);
  const auto tr = gaussian::simulate_realization(g, s, cfg.horizon, cfg.master_seed, 0);
  const int tc = table.column("t");
  const int ac = table.column("agent");
  const int mc = table.column("message");
  const int pc = table.column("post_mean");
  for (const auto& row : table.rows) {
    const int t = std::stoi(row[tc]);
    const int i = std::stoi(row[ac]);
    CHECK(std::stod(row[pc]) == tr.post_means(t, i));
    if (t < cfg.horizon) {
      CHECK(std::stod(row[mc]) == tr.messages(t, i));
    } else {
      CHECK(row[mc].empty());
    }
  }
  const auto vars = load_csv(dir / "variances.csv");
  CHECK(vars.header == std::vector<std::string>{"t", "agent", "post_var"});
  CHECK(vars.rows.size() == 501 * 2);

  const auto summary = load_json(dir / "summary.json");
  CHECK(summary["schema_version"] == 1);
  CHECK(summary["command"] == "repro-fig1");
  CHECK(summary["sigma_inf"].get<double>() == Catch::Approx(1.0 / 6.0));
}

TEST_CASE("binary-edge command writes beliefs and the closed-form limits") {
  const auto dir = scratch("binary");
  REQUIRE(run("binary-edge --config " + (kConfigs / "binary_action.yaml").string() +
              " --quiet --out " + dir.string()) == 0);
  const auto summary = load_json(dir / "summary.json");
  CHECK(summary["mode"] == "action");
  CHECK(summary["true_posterior"].get<double>() == Catch::Approx(7.0 / 9.0));
  CHECK(summary["action_limits"][0].get<double>() == Catch::Approx(9.0 / 11.0));
  CHECK(summary["replica0"]["final_beliefs"][1].get<double>() == Catch::Approx(0.875));

  const auto table = load_csv(dir / "beliefs.csv");
  CHECK(table.header == std::vector<std::string>{"replica", "t", "agent", "belief", "message"});
  CHECK(table.rows.size() == 11 * 2);
}

TEST_CASE("diagnostics command writes the report") {
  const auto dir = scratch("diag");
  REQUIRE(run("diagnostics --config " + (kConfigs / "diagnostics.yaml").string() +
              " --replicas 300 --t1 2 --t2 2 --quiet --out " + dir.string()) == 0);
  const auto doc = load_json(dir / "diagnostics.json");
  CHECK(doc["command"] == "diagnostics");
  CHECK(doc["summary"]["z1"].size() == 3);
  CHECK(doc["summary"]["increments"][0]["mode"] == "variance");
  CHECK(doc["summary"]["variance_identity"].size() == 2);
}

TEST_CASE("repro-fig2 reports clique below cycle") {
  const auto dir = scratch("fig2");
  REQUIRE(run("repro-fig2 --quiet --out " + dir.string()) == 0);
  const auto summary = load_json(dir / "summary.json");
  CHECK(summary["clique_below_cycle_from_t2"] == true);
  CHECK(summary["sigma_inf"].get<double>() == Catch::Approx(1.0 / 141.0));
  CHECK(load_csv(dir / "clique_variances.csv").rows.size() == 21 * 7);
  CHECK(load_csv(dir / "cycle_variances.csv").rows.size() == 21 * 7);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  const auto bad = dir / "bad.yaml";
  std::ofstream(bad) << "engine: binary_edge\ntopology: {kind: cycle, n: 3}\n"
                        "signals: {x1: 0.5, x2: 0.5}\n";
  CHECK(run("binary-edge --config " + bad.string()) == commands::kValidation);
  CHECK(run("gaussian --config " + (dir / "missing.yaml").string()) == commands::kIo);
  CHECK(run("gaussian") == commands::kValidation);
  CHECK(run("repro-fig2 --quiet --out /proc/samplenet_cannot_write") == commands::kIo);
  CHECK(run("gaussian --config " + (kConfigs / "binary_action.yaml").string()) ==
        commands::kValidation);
  CHECK(run("diagnostics --config " + (kConfigs / "diagnostics.yaml").string() +
            " --lambda 2 --out " + (dir / "d").string()) == commands::kValidation);
}

TEST_CASE("shipped configs all validate") {
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    INFO(entry.path());
    CHECK_NOTHROW(load_config(entry.path()));
  }
}

TEST_CASE("command-line usage errors map to the validation exit code") {
  CHECK(run("") == commands::kValidation);
  CHECK(run("teleport") == commands::kValidation);
  CHECK(run("gaussian --replicas many") == commands::kValidation);
  CHECK(run("--help") == commands::kSuccess);
}
