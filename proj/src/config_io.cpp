#include "ehrelay/config_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ehrelay {

namespace {

using nlohmann::json;

// Reads the keys of one JSON object, rejecting unknown ones.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }
  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, field(key));
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void pair(const std::string& key, std::optional<std::array<double, kNodes>>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != kNodes)
      throw ConfigError(field(key), "expected a two-element array");
    std::array<double, kNodes> a{};
    for (int l = 0; l < kNodes; ++l) a[l] = as_number((*v)[l], field(key));
    out = a;
  }

  static double as_number(const json& v, const std::string& f) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
      return kUnbounded;
    throw ConfigError(f, "expected a number");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json number_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

json pair_json(const std::optional<std::array<double, kNodes>>& a) {
  if (!a) return nullptr;
  return json::array({number_json((*a)[0]), number_json((*a)[1])});
}

void read_scenario(const json& j, ScenarioParams& p) {
  Section s(j, "scenario");
  s.number("tau", p.tau);
  s.number("tau_sig_fraction", p.tau_sig_fraction);
  s.number("bandwidth", p.bandwidth);
  s.number("noise", p.noise);
  s.number("e_max_db", p.e_max_db);
  s.number("e_max_ratio", p.e_max_ratio);
  s.number("battery_factor", p.battery_factor);
  s.number("grid_fraction", p.grid_fraction);
  s.number("buffer_beta", p.buffer_beta);
  s.number("tx_buffer_beta", p.tx_buffer_beta);
  s.pair("e_max", p.e_max);
  s.pair("b_max", p.b_max);
  s.pair("d_max", p.d_max);
  s.pair("delta", p.delta);
  if (const json* a = s.find("arrivals")) {
    Section arr(*a, "scenario.arrivals");
    std::string model = "backlogged";
    arr.text("model", model);
    if (model == "backlogged") {
      p.arrivals.model = ArrivalModel::kBacklogged;
    } else if (model == "poisson") {
      p.arrivals.model = ArrivalModel::kPoisson;
    } else {
      throw ConfigError("scenario.arrivals.model", "expected 'backlogged' or 'poisson'");
    }
    arr.number("lambda", p.arrivals.lambda);
    arr.number("packet_bits", p.arrivals.packet_bits);
  }
}

void read_signaling(const json& j, SignalingConfig& c) {
  Section s(j, "signaling");
  s.number("error_fraction", c.error_fraction);
  s.number("channel_cap", c.channel_cap);
  if (const json* v = s.find("bits_override")) {
    Section bits(*v, "signaling.bits_override");
    for (int q = 0; q < kQuantities; ++q) {
      int b = 0;
      const std::string key = quantity_name(static_cast<Quantity>(q));
      bits.integer(key, b);
      if (!bits.find(key)) continue;
      if (b < 1) throw ConfigError(bits.field(key), "bit counts must be positive integers");
      c.bits_override[q] = b;
    }
  }
}

void read_features(const json& j, BasisConfig& c) {
  Section s(j, "features");
  s.boolean("use_remote", c.use_remote);
  s.integer("fsr_tiles", c.fsr_tiles);
  s.integer("rbf_centers", c.rbf_centers);
  s.number("rbf_width", c.rbf_width);
  s.number("channel_cap", c.channel_cap);
}

void read_agents(const json& j, LearningConfig& l, OracleOptions& o) {
  Section s(j, "agents");
  s.number("gamma", l.gamma);
  std::string indexing = l.indexing == ScheduleIndexing::kGlobal ? "global" : "per_episode";
  s.text("schedule_indexing", indexing);
  if (indexing == "per_episode") {
    l.indexing = ScheduleIndexing::kPerEpisode;
  } else if (indexing == "global") {
    l.indexing = ScheduleIndexing::kGlobal;
  } else {
    throw ConfigError("agents.schedule_indexing", "expected 'per_episode' or 'global'");
  }
  s.boolean("persist_weights", l.persist_weights);
  s.integer("oracle_max_intervals", o.max_intervals);
  int frontier = static_cast<int>(o.max_frontier);
  s.integer("oracle_max_frontier", frontier);
  if (frontier < 1) throw ConfigError("agents.oracle_max_frontier", "must be positive");
  o.max_frontier = static_cast<std::size_t>(frontier);
}

void read_experiments(const json& j, ExperimentConfig& e) {
  Section s(j, "experiments");
  s.integer("episodes", e.episodes);
  s.integer("intervals", e.intervals);
  if (const json* v = s.find("seed")) {
    if (!v->is_number_unsigned()) throw ConfigError("experiments.seed", "expected a seed >= 0");
    e.seed = v->get<std::uint64_t>();
  }
  s.integer("threads", e.threads);
  s.integer("bootstrap_resamples", e.bootstrap_resamples);
  s.text("sweep", e.sweep);
  if (const json* v = s.find("values")) {
    if (!v->is_array()) throw ConfigError("experiments.values", "expected an array");
    e.values.clear();
    for (const json& x : *v) e.values.push_back(Section::as_number(x, "experiments.values"));
  }
  if (const json* v = s.find("arms")) {
    if (!v->is_array()) throw ConfigError("experiments.arms", "expected an array");
    e.arms.clear();
    for (const json& x : *v) {
      if (!x.is_string()) throw ConfigError("experiments.arms", "expected arm names");
      e.arms.push_back(parse_arm(x.get<std::string>()));
    }
  }
}

}  // namespace

ScenarioConfig ScenarioParams::resolve() const {
  ScenarioConfig c;
  c.tau = tau;
  c.tau_sig = tau_sig_fraction * tau;
  c.bandwidth = bandwidth;
  c.noise = noise;
  c.arrivals = arrivals;
  const double e1 = 2.0 * noise * std::pow(10.0, e_max_db / 10.0);
  c.e_max = e_max ? *e_max : std::array<double, kNodes>{e1, e_max_ratio * e1};
  if (b_max) {
    c.b_max = *b_max;
  } else {
    for (int l = 0; l < kNodes; ++l) c.b_max[l] = battery_factor * c.e_max[l];
  }
  if (delta) {
    c.delta = *delta;
  } else {
    for (int l = 0; l < kNodes; ++l) c.delta[l] = grid_fraction * c.b_max[l];
  }
  if (d_max) {
    c.d_max = *d_max;
  } else {
    auto cap = [&](double beta) { return bandwidth * tau * std::log2(1.0 + beta * c.b_max[0] / tau); };
    c.d_max[1] = cap(buffer_beta);
    c.d_max[0] = arrivals.model == ArrivalModel::kBacklogged ? kUnbounded : cap(tx_buffer_beta);
  }
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
  // a run manifest carries the full config under "config"
  if (j.is_object() && j.contains("ehrelay_manifest")) return parse_config(j.at("config").dump());
  RunConfig cfg;
  Section root(j, "config");
  if (const json* v = root.find("scenario")) read_scenario(*v, cfg.scenario);
  if (const json* v = root.find("signaling")) read_signaling(*v, cfg.signaling);
  if (const json* v = root.find("features")) read_features(*v, cfg.features);
  if (const json* v = root.find("agents")) read_agents(*v, cfg.learning, cfg.oracle);
  if (const json* v = root.find("experiments")) read_experiments(*v, cfg.experiment);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
  const ScenarioParams& p = cfg.scenario;
  json j;
  j["scenario"] = {
      {"tau", p.tau},
      {"tau_sig_fraction", p.tau_sig_fraction},
      {"bandwidth", p.bandwidth},
      {"noise", p.noise},
      {"e_max_db", p.e_max_db},
      {"e_max_ratio", p.e_max_ratio},
      {"battery_factor", p.battery_factor},
      {"grid_fraction", p.grid_fraction},
      {"buffer_beta", p.buffer_beta},
      {"tx_buffer_beta", p.tx_buffer_beta},
      {"e_max", pair_json(p.e_max)},
      {"b_max", pair_json(p.b_max)},
      {"d_max", pair_json(p.d_max)},
      {"delta", pair_json(p.delta)},
      {"arrivals",
       {{"model", p.arrivals.model == ArrivalModel::kPoisson ? "poisson" : "backlogged"},
        {"lambda", p.arrivals.lambda},
        {"packet_bits", p.arrivals.packet_bits}}}};
  json bits = json::object();
  for (int q = 0; q < kQuantities; ++q)
    if (const auto& b = cfg.signaling.bits_override[q]) bits[quantity_name(static_cast<Quantity>(q))] = *b;
  j["signaling"] = {{"error_fraction", cfg.signaling.error_fraction},
                    {"channel_cap", cfg.signaling.channel_cap},
                    {"bits_override", bits}};
  j["features"] = {{"use_remote", cfg.features.use_remote},
                   {"fsr_tiles", cfg.features.fsr_tiles},
                   {"rbf_centers", cfg.features.rbf_centers},
                   {"rbf_width", cfg.features.rbf_width},
                   {"channel_cap", cfg.features.channel_cap}};
  j["agents"] = {
      {"gamma", cfg.learning.gamma},
      {"schedule_indexing",
       cfg.learning.indexing == ScheduleIndexing::kGlobal ? "global" : "per_episode"},
      {"persist_weights", cfg.learning.persist_weights},
      {"oracle_max_intervals", cfg.oracle.max_intervals},
      {"oracle_max_frontier", cfg.oracle.max_frontier}};
  json arms = json::array();
  for (Arm a : cfg.experiment.arms) arms.push_back(arm_name(a));
  j["experiments"] = {{"episodes", cfg.experiment.episodes},
                      {"intervals", cfg.experiment.intervals},
                      {"seed", cfg.experiment.seed},
                      {"threads", cfg.experiment.threads},
                      {"bootstrap_resamples", cfg.experiment.bootstrap_resamples},
                      {"sweep", cfg.experiment.sweep},
                      {"values", cfg.experiment.values},
                      {"arms", arms}};
  return j.dump(2);
}

ArmSettings arm_settings(const RunConfig& cfg, Arm arm) {
  ArmSettings s;
  s.arm = arm;
  s.scenario = cfg.scenario.resolve();
  s.signaling = cfg.signaling;
  s.basis = cfg.features;
  s.learning = cfg.learning;
  s.oracle = cfg.oracle;
  s.seed = cfg.experiment.seed;
  return s;
}

void validate(const RunConfig& cfg) {
  const ScenarioParams& p = cfg.scenario;
  if (!(p.tau_sig_fraction >= 0.0 && p.tau_sig_fraction < 1.0))
    throw ConfigError("scenario.tau_sig_fraction", "tau_sig must satisfy 0 <= tau_sig < tau");
  if (!(p.e_max_ratio >= 0.0)) throw ConfigError("scenario.e_max_ratio", "must be >= 0");
  if (!(p.battery_factor > 0.0)) throw ConfigError("scenario.battery_factor", "must be > 0");
  if (!(p.grid_fraction > 0.0 && p.grid_fraction <= 1.0))
    throw ConfigError("scenario.grid_fraction", "must be in (0, 1]");
  if (!(p.buffer_beta > 0.0)) throw ConfigError("scenario.buffer_beta", "must be > 0");
  if (!(p.tx_buffer_beta > 0.0)) throw ConfigError("scenario.tx_buffer_beta", "must be > 0");
  cfg.scenario.resolve().validate();
  if (!(cfg.signaling.error_fraction > 0.0 && cfg.signaling.error_fraction < 1.0))
    throw ConfigError("signaling.error_fraction", "must be in (0, 1)");
  if (!(cfg.learning.gamma >= 0.0 && cfg.learning.gamma <= 1.0))
    throw ConfigError("agents.gamma", "must be in [0, 1]");
  if (cfg.features.fsr_tiles < 1) throw ConfigError("features.fsr_tiles", "must be >= 1");
  if (cfg.features.rbf_centers < 1) throw ConfigError("features.rbf_centers", "must be >= 1");
  const ExperimentConfig& e = cfg.experiment;
  if (e.episodes < 1) throw ConfigError("experiments.episodes", "must be >= 1");
  if (e.intervals < 1) throw ConfigError("experiments.intervals", "must be >= 1");
  if (e.threads < 0) throw ConfigError("experiments.threads", "must be >= 0");
  if (e.bootstrap_resamples < 1)
    throw ConfigError("experiments.bootstrap_resamples", "must be >= 1");
}

}  // namespace ehrelay

namespace ehrelay {

std::string realization_to_json(const Realization& r) {
  nlohmann::json j;
  j["e_in"] = nlohmann::json::array();
  j["channel"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.e_in.size(); ++i) {
    j["e_in"].push_back({r.e_in[i][0], r.e_in[i][1]});
    j["channel"].push_back({{r.channel[i][0].real(), r.channel[i][0].imag()},
                            {r.channel[i][1].real(), r.channel[i][1].imag()}});
  }
  j["arrivals"] = r.arrivals;
  return j.dump();
}

Realization realization_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("realization", e.what());
  }
  Realization r;
  try {
    for (const auto& e : j.at("e_in")) r.e_in.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    for (const auto& c : j.at("channel"))
      r.channel.push_back({Channel{c.at(0).at(0).get<double>(), c.at(0).at(1).get<double>()},
                           Channel{c.at(1).at(0).get<double>(), c.at(1).at(1).get<double>()}});
    if (j.contains("arrivals")) {
      r.arrivals = j.at("arrivals").get<std::vector<double>>();
    } else {
      r.arrivals.assign(r.e_in.size(), 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("realization", e.what());
  }
  if (r.e_in.empty() || r.channel.size() != r.e_in.size() || r.arrivals.size() != r.e_in.size())
    throw ConfigError("realization", "e_in, channel and arrivals must have the same nonzero length");
  return r;
}

}  // namespace ehrelay
