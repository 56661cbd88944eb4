#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "ehrelay/config.hpp"

namespace ehrelay {

/// One simulated interval as seen by the environment.
struct TraceRow {
  int episode = 0;
  int interval = 0;
  std::array<double, kNodes> e_in{};
  std::array<double, kNodes> battery{};
  std::array<double, kNodes> abs_channel{};
  std::array<double, kNodes> buffer{};
  std::array<double, kNodes> power{};
  std::array<double, kNodes> sig_power{};
  std::array<double, kNodes> delivered{};
  double dropped_bits = 0.0;
  double battery_overflow = 0.0;
};

const std::vector<std::string>& trace_columns();
void write_trace_header(std::ostream& os);
/// Numbers are written with 9 significant digits.
void write_trace_row(std::ostream& os, const TraceRow& row);

}  // namespace ehrelay
