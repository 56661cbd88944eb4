#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ehrelay/config_io.hpp"
#include "ehrelay/episode.hpp"

namespace ehrelay {

enum class SweepKind { kTauSig, kBuffer, kEmax, kLambda, kConvergence };

SweepKind parse_sweep(const std::string& name);
std::string sweep_name(SweepKind kind);
/// Default x values of a sweep (tau_sig as a fraction of tau).
std::vector<double> default_sweep_values(SweepKind kind);
std::vector<Arm> default_sweep_arms(SweepKind kind);

/// One scenario of a sweep: the x value, an optional series label (harvest
/// ratio, packet size) and the config with the point applied.
struct SweepPoint {
  double value = 0.0;
  std::string series;
  RunConfig config;
  std::vector<Arm> arms;
  std::vector<std::string> notes;  // arms dropped at this point and why
};

struct ExperimentPlan {
  SweepKind kind = SweepKind::kTauSig;
  std::vector<double> values;
  RunConfig base;
};

ExperimentPlan make_plan(const RunConfig& cfg);
std::vector<SweepPoint> expand(const ExperimentPlan& plan);

struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;

  bool above(const Interval& o) const noexcept { return low > o.high; }
};

/// Percentile bootstrap 95% interval of the mean.
Interval bootstrap_mean(std::span<const double> samples, int resamples, Rng& rng);

const std::vector<std::string>& metric_names();
double metric_value(const EpisodeMetrics& m, const std::string& metric);

struct ArmResult {
  double value = 0.0;
  std::string series;
  Arm arm = Arm::kMarl;
  std::vector<EpisodeMetrics> episodes;
  std::map<std::string, Interval> metrics;
  std::vector<std::uint64_t> realization_hashes;

  std::string label() const;
  const Interval& at(const std::string& metric) const { return metrics.at(metric); }
};

/// T episodes of one arm on the paired realizations of the point.
ArmResult run_arm(const SweepPoint& point, Arm arm, const TraceSink& sink = {});

struct SweepResult {
  SweepKind kind = SweepKind::kTauSig;
  std::vector<ArmResult> rows;  // ordered by (point, arm)
  std::vector<std::string> notes;

  const ArmResult* find(double value, Arm arm, const std::string& series = "") const;
};

/// Runs every (point, arm) pair on `threads` workers; the result order does
/// not depend on the number of workers.
SweepResult run_plan(const ExperimentPlan& plan, int threads = 0,
                     const std::function<void(const std::string&)>& progress = {});

/// CSV with columns sweep_value, arm, mean, ci_low, ci_high, metric.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// gnuplot script plotting `metric` means with interval bars from `csv_name`.
void write_gnuplot_script(std::ostream& os, const SweepResult& result, const std::string& csv_name,
                          const std::string& metric);

}  // namespace ehrelay
