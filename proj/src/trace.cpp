#include "ehrelay/trace.hpp"

#include <cstdio>

namespace ehrelay {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "episode", "i",     "E1",    "E2",    "B1", "B2", "h1",    "h2",       "D1", "D2",
      "p1",      "p2",    "psig1", "psig2", "R1", "R2", "drops", "overflows"};
  return cols;
}

void write_trace_header(std::ostream& os) {
  const auto& cols = trace_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
}

void write_trace_row(std::ostream& os, const TraceRow& r) {
  os << r.episode << ',' << r.interval;
  for (const auto* a : {&r.e_in, &r.battery, &r.abs_channel, &r.buffer, &r.power, &r.sig_power,
                        &r.delivered})
    os << ',' << num((*a)[0]) << ',' << num((*a)[1]);
  os << ',' << num(r.dropped_bits) << ',' << num(r.battery_overflow) << '\n';
}

}  // namespace ehrelay
