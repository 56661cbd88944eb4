#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ehrelay/cli.hpp"

using namespace ehrelay;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ehrelay");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ehrelay_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kDefaults = std::string(EHRELAY_SOURCE_DIR) + "/config/paper.defaults.json";

}  // namespace

TEST_CASE("validate echoes derived quantities") {
  const Result r = cli({"validate", "--config", kDefaults});
  CHECK(r.code == 0);
  CHECK(r.out.find("tau_data = 0.99") != std::string::npos);
  CHECK(r.out.find("L = 9 + 10 + 7 + 28 = 54") != std::string::npos);
  CHECK(r.out.find("|A| = 51") != std::string::npos);
  CHECK(r.out.find("p_sig = 0.00375000853 / |h|^2") != std::string::npos);
}

TEST_CASE("config errors exit with code 2 and name the field") {
  const fs::path dir = scratch("bad");
  std::ofstream(dir / "tau.json") << R"({"scenario": {"tau_sig_fraction": 1.0}})";
  Result r = cli({"validate", "--config", (dir / "tau.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("scenario.tau_sig_fraction") != std::string::npos);

  std::ofstream(dir / "typo.json") << R"({"agents": {"gama": 0.5}})";
  r = cli({"validate", "--config", (dir / "typo.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("agents.gama") != std::string::npos);

  std::ofstream(dir / "syntax.json") << "{\"scenario\": {\n \"tau\": }\n}";
  r = cli({"validate", "--config", (dir / "syntax.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);

  r = cli({"run", "--arms", "marl,bogus", "--out-dir", dir.string()});
  CHECK(r.code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"validate", "--config", (dir / "missing.json").string()}).code == 2);
}

TEST_CASE("run writes reproducible artifacts") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const std::vector<std::string> common = {"run",         "--config",    kDefaults, "--seed",
                                           "42",          "--episodes",  "4",       "--intervals",
                                           "20",          "--arms",      "marl,nocoop,hasty",
                                           "--threads",   "2"};
  auto with_dir = [&](const fs::path& d) {
    auto args = common;
    args.push_back("--out-dir");
    args.push_back(d.string());
    return args;
  };
  REQUIRE(cli(with_dir(a)).code == 0);
  REQUIRE(cli(with_dir(b)).code == 0);
  const std::string csv = slurp(a / "tau_sig_seed42.csv");
  CHECK(csv.rfind("sweep_value,arm,mean,ci_low,ci_high,metric\n", 0) == 0);
  CHECK(csv == slurp(b / "tau_sig_seed42.csv"));
  CHECK(fs::exists(a / "tau_sig_seed42_throughput.gp"));
  CHECK(fs::exists(a / "tau_sig_seed42.manifest.json"));

  // manifests accumulate
  REQUIRE(cli(with_dir(a)).code == 0);
  std::ifstream log(a / "manifests.jsonl");
  int lines = 0;
  for (std::string l; std::getline(log, l);) ++lines;
  CHECK(lines == 2);

  // a manifest reproduces the run
  const fs::path c = scratch("run_c");
  const Result again = cli({"run", "--config", (a / "tau_sig_seed42.manifest.json").string(),
                            "--out-dir", c.string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(c / "tau_sig_seed42.csv") == csv);
  const std::string manifest = slurp(a / "tau_sig_seed42.manifest.json");
  CHECK(manifest.find("experiments.seed=42") != std::string::npos);
}

TEST_CASE("oracle subcommand") {
  const fs::path dir = scratch("oracle");
  std::ofstream(dir / "one.json")
      << R"({"e_in": [[1, 2], [3, 4]], "channel": [[[1, 0], [0, 1]], [[1, 0], [1, 0]]]})";
  std::ofstream(dir / "coarse.json") << R"({"scenario": {"grid_fraction": 0.25}})";
  Result r = cli({"oracle", "--config", (dir / "coarse.json").string(), "--realization",
                  (dir / "one.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("value = 0 bits") != std::string::npos);

  r = cli({"oracle", "--config", (dir / "coarse.json").string(), "--intervals", "5", "--out",
           (dir / "schedule.csv").string()});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "schedule.csv").rfind("i,p1,p2\n", 0) == 0);

  // the default grid is too fine for the exact search
  r = cli({"oracle", "--config", kDefaults, "--intervals", "5"});
  CHECK(r.code == 3);
}

TEST_CASE("trace subcommand") {
  const fs::path dir = scratch("trace");
  const Result r = cli({"trace", "--config", kDefaults, "--arm", "hasty", "--episodes", "2",
                        "--intervals", "5", "--out", (dir / "t.csv").string()});
  CHECK(r.code == 0);
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "episode,i,E1,E2,B1,B2,h1,h2,D1,D2,p1,p2,psig1,psig2,R1,R2,drops,overflows");
  int rows = 0;
  for (std::string l; std::getline(in, l);) ++rows;
  CHECK(rows == 10);
}
