#include "ehrelay/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace ehrelay {

namespace {

constexpr std::uint64_t kBootstrapTag = 0xb0075;

std::uint64_t text_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

SweepKind parse_sweep(const std::string& name) {
  if (name == "tau_sig") return SweepKind::kTauSig;
  if (name == "buffer") return SweepKind::kBuffer;
  if (name == "emax") return SweepKind::kEmax;
  if (name == "lambda") return SweepKind::kLambda;
  if (name == "convergence") return SweepKind::kConvergence;
  throw ConfigError("experiments.sweep",
                    "unknown sweep '" + name + "' (tau_sig, buffer, emax, lambda, convergence)");
}

std::string sweep_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::kTauSig: return "tau_sig";
    case SweepKind::kBuffer: return "buffer";
    case SweepKind::kEmax: return "emax";
    case SweepKind::kLambda: return "lambda";
    case SweepKind::kConvergence: return "convergence";
  }
  return "?";
}

std::vector<double> default_sweep_values(SweepKind kind) {
  switch (kind) {
    case SweepKind::kTauSig: {
      std::vector<double> v = {0.0025, 0.005};
      for (int k = 1; k <= 10; ++k) v.push_back(k / 100.0);
      return v;
    }
    case SweepKind::kBuffer: return {0.5, 1.0, 2.0, 5.0, 10.0};
    case SweepKind::kEmax: return {0.0, 2.5, 5.0, 7.5, 10.0};
    case SweepKind::kLambda: return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    case SweepKind::kConvergence: return {10, 20, 50, 100, 200};
  }
  return {};
}

std::vector<Arm> default_sweep_arms(SweepKind kind) {
  switch (kind) {
    case SweepKind::kEmax: return {Arm::kMarl, Arm::kNoCoop, Arm::kHasty, Arm::kOracle};
    case SweepKind::kConvergence: return {Arm::kMarl, Arm::kMarlFsr, Arm::kMarlRbf, Arm::kNoCoop};
    default: return {Arm::kMarl, Arm::kNoCoop, Arm::kHasty};
  }
}

ExperimentPlan make_plan(const RunConfig& cfg) {
  ExperimentPlan plan;
  plan.kind = parse_sweep(cfg.experiment.sweep);
  plan.values = cfg.experiment.values.empty() ? default_sweep_values(plan.kind)
                                              : cfg.experiment.values;
  plan.base = cfg;
  return plan;
}

std::vector<SweepPoint> expand(const ExperimentPlan& plan) {
  if (plan.values.empty()) throw ConfigError("experiments.values", "sweep has no values");
  const std::vector<Arm> arms =
      plan.base.experiment.arms.empty() ? default_sweep_arms(plan.kind) : plan.base.experiment.arms;

  std::vector<std::pair<std::string, RunConfig>> series;
  switch (plan.kind) {
    case SweepKind::kEmax:
      for (double ratio : {10.0, 1.0, 0.1}) {
        RunConfig c = plan.base;
        c.scenario.e_max_ratio = ratio;
        series.emplace_back("ratio=" + fmt_value(ratio), c);
      }
      break;
    case SweepKind::kLambda:
      for (double bits : {2e5, 5e5}) {
        RunConfig c = plan.base;
        c.scenario.arrivals.model = ArrivalModel::kPoisson;
        c.scenario.arrivals.packet_bits = bits;
        series.emplace_back("packet=" + fmt_value(bits / 1e3) + "kbit", c);
      }
      break;
    default: series.emplace_back("", plan.base);
  }

  std::vector<SweepPoint> points;
  for (const auto& [label, base] : series) {
    for (double v : plan.values) {
      SweepPoint p;
      p.value = v;
      p.series = label;
      p.config = base;
      ScenarioParams& sp = p.config.scenario;
      switch (plan.kind) {
        case SweepKind::kTauSig: sp.tau_sig_fraction = v; break;
        case SweepKind::kBuffer: sp.buffer_beta = v; break;
        case SweepKind::kEmax: sp.e_max_db = v; break;
        case SweepKind::kLambda: sp.arrivals.lambda = v; break;
        case SweepKind::kConvergence:
          p.config.experiment.intervals = static_cast<int>(std::lround(v));
          break;
      }
      validate(p.config);
      for (Arm a : arms) {
        if (a == Arm::kOracle) {
          if (plan.kind == SweepKind::kEmax && sp.e_max_ratio > 1.0) {
            p.notes.push_back("oracle omitted: relay harvests more than its battery can hold");
            continue;
          }
          if (p.config.experiment.intervals > p.config.oracle.max_intervals) {
            p.notes.push_back("oracle omitted: " + std::to_string(p.config.experiment.intervals) +
                              " intervals exceed the oracle limit of " +
                              std::to_string(p.config.oracle.max_intervals));
            continue;
          }
        }
        p.arms.push_back(a);
      }
      points.push_back(std::move(p));
    }
  }
  return points;
}

Interval bootstrap_mean(std::span<const double> x, int resamples, Rng& rng) {
  Interval out;
  if (x.empty()) return out;
  double sum = 0.0;
  for (double v : x) sum += v;
  out.mean = sum / static_cast<double>(x.size());
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  std::vector<double> means(static_cast<std::size_t>(std::max(resamples, 1)));
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[pick(rng)];
    m = s / static_cast<double>(x.size());
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  out.low = quantile(0.025);
  out.high = quantile(0.975);
  return out;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "throughput",       "normalized_throughput", "relay_overflows", "relay_dropped_bits",
      "battery_overflow", "signaling_energy",      "delivered_ratio"};
  return names;
}

double metric_value(const EpisodeMetrics& m, const std::string& metric) {
  if (metric == "throughput") return m.throughput;
  if (metric == "normalized_throughput") return m.normalized_throughput();
  if (metric == "relay_overflows") return m.relay_overflows;
  if (metric == "relay_dropped_bits") return m.relay_dropped_bits;
  if (metric == "battery_overflow") return m.battery_overflow;
  if (metric == "signaling_energy") return m.signaling_energy;
  if (metric == "delivered_ratio") return m.delivered_ratio();
  throw std::invalid_argument("unknown metric '" + metric + "'");
}

std::string ArmResult::label() const {
  return series.empty() ? arm_name(arm) : arm_name(arm) + "@" + series;
}

ArmResult run_arm(const SweepPoint& point, Arm arm, const TraceSink& sink) {
  const RunConfig& cfg = point.config;
  ArmRunner runner(arm_settings(cfg, arm));
  const ScenarioConfig& sc = runner.settings().scenario;
  ArmResult res;
  res.value = point.value;
  res.series = point.series;
  res.arm = arm;
  const int T = cfg.experiment.episodes;
  for (int t = 0; t < T; ++t) {
    const Realization real =
        make_realization(sc, cfg.experiment.intervals, cfg.experiment.seed, static_cast<std::uint64_t>(t));
    res.realization_hashes.push_back(real.hash());
    res.episodes.push_back(runner.run_episode(real, t, sink));
  }
  for (const std::string& name : metric_names()) {
    std::vector<double> xs;
    xs.reserve(res.episodes.size());
    for (const auto& m : res.episodes) xs.push_back(metric_value(m, name));
    Rng rng = substream(cfg.experiment.seed,
                        {kBootstrapTag, std::bit_cast<std::uint64_t>(point.value),
                         text_hash(point.series), static_cast<std::uint64_t>(arm),
                         text_hash(name)});
    res.metrics[name] = bootstrap_mean(xs, cfg.experiment.bootstrap_resamples, rng);
  }
  return res;
}

const ArmResult* SweepResult::find(double value, Arm arm, const std::string& series) const {
  for (const ArmResult& r : rows)
    if (r.value == value && r.arm == arm && r.series == series) return &r;
  return nullptr;
}

SweepResult run_plan(const ExperimentPlan& plan, int threads,
                     const std::function<void(const std::string&)>& progress) {
  const std::vector<SweepPoint> points = expand(plan);
  struct Task {
    const SweepPoint* point;
    Arm arm;
  };
  std::vector<Task> tasks;
  SweepResult out;
  out.kind = plan.kind;
  for (const SweepPoint& p : points) {
    for (Arm a : p.arms) tasks.push_back({&p, a});
    for (const std::string& n : p.notes)
      out.notes.push_back(sweep_name(plan.kind) + "=" + fmt_value(p.value) +
                          (p.series.empty() ? "" : " " + p.series) + ": " + n);
  }

  std::vector<ArmResult> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        rows[k] = run_arm(*tasks[k].point, tasks[k].arm);
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(sweep_name(plan.kind) + "=" + fmt_value(rows[k].value) + " " +
                   rows[k].label() + " done");
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.rows = std::move(rows);
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "sweep_value,arm,mean,ci_low,ci_high,metric\n";
  for (const ArmResult& r : result.rows)
    for (const std::string& name : metric_names()) {
      const Interval& iv = r.metrics.at(name);
      os << fmt_value(r.value) << ',' << r.label() << ',' << fmt_value(iv.mean) << ','
         << fmt_value(iv.low) << ',' << fmt_value(iv.high) << ',' << name << '\n';
    }
}

void write_gnuplot_script(std::ostream& os, const SweepResult& result, const std::string& csv_name,
                          const std::string& metric) {
  std::vector<std::string> labels;
  for (const ArmResult& r : result.rows)
    if (std::find(labels.begin(), labels.end(), r.label()) == labels.end())
      labels.push_back(r.label());
  os << "set datafile separator ','\n"
     << "set key outside right\n"
     << "set xlabel '" << sweep_name(result.kind) << "'\n"
     << "set ylabel '" << metric << "'\n";
  if (result.kind == SweepKind::kTauSig) os << "set format x '%.2g'\n";
  os << "plot \\\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    os << "  '" << csv_name << "' every ::1 using 1:((strcol(2) eq '" << labels[k]
       << "' && strcol(6) eq '" << metric << "') ? $3 : NaN):4:5 with yerrorlines title '"
       << labels[k] << "'" << (k + 1 < labels.size() ? ", \\\n" : "\n");
  }
}

}  // namespace ehrelay
