#include "ehrelay/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ehrelay/experiments.hpp"

namespace ehrelay {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sweep;
  std::optional<std::string> arms;
  std::optional<int> episodes;
  std::optional<int> intervals;
  std::optional<int> threads;
  std::string out_dir;
};

std::vector<Arm> parse_arm_list(const std::string& list) {
  std::vector<Arm> arms;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) arms.push_back(parse_arm(item));
  if (arms.empty()) throw ConfigError("experiments.arms", "empty arm list");
  return arms;
}

// Loads the config and applies command-line overrides, which win over file
// values. Returns the applied overrides as "field=value" strings.
std::vector<std::string> resolve_config(const Overrides& o, RunConfig& cfg) {
  cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  std::vector<std::string> applied;
  if (o.seed) {
    cfg.experiment.seed = *o.seed;
    applied.push_back("experiments.seed=" + std::to_string(*o.seed));
  }
  if (o.sweep) {
    cfg.experiment.sweep = *o.sweep;
    applied.push_back("experiments.sweep=" + *o.sweep);
  }
  if (o.arms) {
    cfg.experiment.arms = parse_arm_list(*o.arms);
    applied.push_back("experiments.arms=" + *o.arms);
  }
  if (o.episodes) {
    cfg.experiment.episodes = *o.episodes;
    applied.push_back("experiments.episodes=" + std::to_string(*o.episodes));
  }
  if (o.intervals) {
    cfg.experiment.intervals = *o.intervals;
    applied.push_back("experiments.intervals=" + std::to_string(*o.intervals));
  }
  if (o.threads) {
    cfg.experiment.threads = *o.threads;
    applied.push_back("experiments.threads=" + std::to_string(*o.threads));
  }
  validate(cfg);
  return applied;
}

std::string out_dir_of(const Overrides& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("EHRELAY_OUT_DIR"); env && *env) return env;
  return "out";
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config or run manifest");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--episodes", o.episodes, "episodes (realizations) per arm");
  cmd->add_option("--intervals", o.intervals, "intervals per episode");
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd->add_option("--out-dir", o.out_dir, "output directory (default $EHRELAY_OUT_DIR or ./out)");
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(9) << v;
  return ss.str();
}

int cmd_validate(const Overrides& o, std::ostream& out) {
  RunConfig cfg;
  resolve_config(o, cfg);
  const json d = json::parse(derived_report_json(cfg));
  out << "config ok\n";
  out << "tau = " << fmt(d["tau"].get<double>()) << ", tau_sig = " << fmt(d["tau_sig"].get<double>())
      << ", tau_data = " << fmt(d["tau_data"].get<double>()) << '\n';
  for (int l = 0; l < kNodes; ++l) {
    const json& n = d["nodes"][l];
    const auto& b = n["bits"];
    out << "node " << l + 1 << ": E_max = " << fmt(n["e_max"].get<double>())
        << ", B_max = " << fmt(n["b_max"].get<double>()) << ", D_max = "
        << (n["d_max"].is_string() ? std::string("inf") : fmt(n["d_max"].get<double>()))
        << ", delta = " << fmt(n["delta"].get<double>()) << ", |A| = " << n["grid_size"].get<int>()
        << '\n';
    out << "  L = " << b["energy"].get<int>() << " + " << b["battery"].get<int>() << " + "
        << b["channel"].get<int>() << " + " << b["buffer"].get<int>() << " = "
        << n["bits_total"].get<int>() << '\n';
    out << "  p_sig = " << fmt(n["p_sig_coefficient"].get<double>()) << " / |h|^2\n";
  }
  return kExitOk;
}

void write_manifest(const fs::path& dir, const std::string& stem, const RunConfig& cfg,
                    const std::vector<std::string>& overrides,
                    const std::vector<std::string>& outputs, const std::vector<std::string>& notes) {
  json m;
  m["ehrelay_manifest"] = 1;
  m["version"] = EHRELAY_VERSION;
  m["seed"] = cfg.experiment.seed;
  m["config"] = json::parse(dump_config(cfg));
  m["derived"] = json::parse(derived_report_json(cfg));
  m["overrides"] = overrides;
  m["outputs"] = outputs;
  m["notes"] = notes;
  std::ofstream(dir / (stem + ".manifest.json")) << m.dump(2) << '\n';
  std::ofstream log(dir / "manifests.jsonl", std::ios::app);
  log << m.dump() << '\n';
}

int cmd_run(const Overrides& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  const auto overrides = resolve_config(o, cfg);
  const ExperimentPlan plan = make_plan(cfg);
  const fs::path dir = out_dir_of(o);
  fs::create_directories(dir);
  const std::string stem = sweep_name(plan.kind) + "_seed" + std::to_string(cfg.experiment.seed);

  const auto start = std::chrono::steady_clock::now();
  SweepResult result =
      run_plan(plan, cfg.experiment.threads, [&](const std::string& msg) { err << msg << '\n'; });
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string csv = stem + ".csv";
  {
    std::ofstream f(dir / csv);
    write_sweep_csv(f, result);
  }
  std::vector<std::string> outputs = {(dir / csv).string()};
  const std::string primary =
      plan.kind == SweepKind::kBuffer ? "relay_overflows"
      : plan.kind == SweepKind::kConvergence ? "normalized_throughput"
                                             : "throughput";
  for (const std::string& metric : {primary, std::string("throughput")}) {
    const std::string gp = stem + "_" + metric + ".gp";
    std::ofstream f(dir / gp);
    write_gnuplot_script(f, result, csv, metric);
    outputs.push_back((dir / gp).string());
    if (metric == "throughput" && primary == "throughput") break;
  }
  write_manifest(dir, stem, cfg, overrides, outputs, result.notes);
  for (const std::string& n : result.notes) err << "note: " << n << '\n';
  out << "wrote " << (dir / csv).string() << " (" << result.rows.size() << " arm rows, "
      << fmt(secs) << " s)\n";
  return kExitOk;
}

int cmd_oracle(const Overrides& o, const std::string& realization_path, int episode,
               const std::string& out_path, std::ostream& out) {
  RunConfig cfg;
  resolve_config(o, cfg);
  const ScenarioConfig sc = cfg.scenario.resolve();
  Realization real;
  if (!realization_path.empty()) {
    std::ifstream in(realization_path);
    if (!in) throw ConfigError("realization", "cannot read '" + realization_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    real = realization_from_json(ss.str());
  } else {
    real = make_realization(sc, cfg.experiment.intervals, cfg.experiment.seed,
                            static_cast<std::uint64_t>(episode));
  }
  const auto grids = make_grids(sc);
  const OracleResult res = offline_oracle(real, sc, grids, cfg.oracle);
  const EpisodeMetrics m = replay_schedule(real, sc, res.timing, grids, res.powers);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
  }
  std::ostream& os = out_path.empty() ? out : file;
  os << "i,p1,p2\n";
  for (std::size_t i = 0; i < res.powers.size(); ++i)
    os << i + 1 << ',' << fmt(res.powers[i][0]) << ',' << fmt(res.powers[i][1]) << '\n';
  if (!out_path.empty())
    out << "oracle schedule written to " << out_path << '\n';
  out << "value = " << fmt(res.throughput) << " bits (replayed " << fmt(m.throughput)
      << "), tau_data = " << fmt(res.timing.data()) << ", peak frontier = " << res.peak_frontier
      << '\n';
  return kExitOk;
}

int cmd_trace(const Overrides& o, const std::string& arm, const std::string& out_path,
              std::ostream& out) {
  RunConfig cfg;
  resolve_config(o, cfg);
  SweepPoint point;
  point.config = cfg;
  point.value = cfg.scenario.tau_sig_fraction;
  const fs::path dir = out_dir_of(o);
  const fs::path path = out_path.empty()
                            ? dir / (arm + "_trace_seed" + std::to_string(cfg.experiment.seed) + ".csv")
                            : fs::path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_trace_header(f);
  const ArmResult r = run_arm(point, parse_arm(arm), [&](const TraceRow& row) { write_trace_row(f, row); });
  out << "wrote " << path.string() << " (" << r.episodes.size() << " episodes, mean throughput "
      << fmt(r.at("throughput").mean) << " bits)\n";
  return kExitOk;
}

}  // namespace

std::string derived_report_json(const RunConfig& cfg) {
  const ScenarioConfig sc = cfg.scenario.resolve();
  const auto grids = make_grids(sc);
  const auto specs = make_quantizer_specs(sc, cfg.signaling);
  json d;
  d["tau"] = sc.tau;
  d["tau_sig"] = sc.tau_sig;
  d["tau_data"] = sc.tau_data();
  d["bandwidth"] = sc.bandwidth;
  d["noise"] = sc.noise;
  d["nodes"] = json::array();
  for (int l = 0; l < kNodes; ++l) {
    json n;
    n["e_max"] = sc.e_max[l];
    n["b_max"] = sc.b_max[l];
    n["d_max"] = std::isinf(sc.d_max[l]) ? json("inf") : json(sc.d_max[l]);
    n["delta"] = sc.delta[l];
    n["grid_size"] = grids[l].size();
    json bits;
    for (int q = 0; q < kQuantities; ++q)
      bits[quantity_name(static_cast<Quantity>(q))] = specs[l].at(static_cast<Quantity>(q)).bits();
    n["bits"] = bits;
    const int L = total_bits(specs[l]);
    n["bits_total"] = L;
    // p_sig = coefficient / |h|^2
    const auto coeff = signaling_power(L, 1.0, sc.noise, sc.bandwidth, sc.tau_sig);
    n["p_sig_coefficient"] = coeff ? json(*coeff) : json(nullptr);
    d["nodes"].push_back(n);
  }
  return d.dump();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-harvesting two-hop relay: learning agents, baselines and sweeps", "ehrelay"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(EHRELAY_VERSION));

  Overrides o;
  std::string realization_path, out_path, arm = "marl";
  int episode = 0;

  CLI::App* run = app.add_subcommand("run", "run a sweep and write CSV, plot script and manifest");
  add_common(run, o);
  run->add_option("--sweep", o.sweep, "tau_sig | buffer | emax | lambda | convergence");
  run->add_option("--arms", o.arms, "comma-separated arms (marl, marl_fsr, marl_rbf, nocoop, hasty, oracle)");

  CLI::App* val = app.add_subcommand("validate", "check a config and echo derived quantities");
  add_common(val, o);

  CLI::App* orc = app.add_subcommand("oracle", "offline grid optimum for one realization");
  add_common(orc, o);
  orc->add_option("--realization", realization_path, "realization JSON (default: generated from the seed)");
  orc->add_option("--episode", episode, "episode index of the generated realization");
  orc->add_option("--out", out_path, "schedule CSV path (default: stdout)");

  CLI::App* trc = app.add_subcommand("trace", "per-interval trace of one arm");
  add_common(trc, o);
  trc->add_option("--arm", arm, "arm to trace");
  trc->add_option("--out", out_path, "trace CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(o, out, err);
    if (*val) return cmd_validate(o, out);
    if (*orc) return cmd_oracle(o, realization_path, episode, out_path, out);
    if (*trc) return cmd_trace(o, arm, out_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace ehrelay
