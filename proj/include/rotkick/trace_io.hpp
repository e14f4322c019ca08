#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rotkick/analysis.hpp"
#include "rotkick/control.hpp"
#include "rotkick/signal.hpp"

namespace rotkick {

// Tab-separated trace with a commented header:
//   # rotkick trace v1
//   # version: rotkick <semver>
//   # config-begin / echoed config / # config-end
//   time_ps  chi_<species>...  signal
// Values are printed with 17 significant digits, so identical runs produce
// byte-identical files and a round-trip preserves every bit.
void write_signal_trace(std::ostream& out, const SignalTrace& trace,
                        const std::string& config_echo);
void write_signal_trace_file(const std::string& path, const SignalTrace& trace,
                             const std::string& config_echo);

// Reads the column data back (header is validated, echo is ignored).
SignalTrace read_signal_trace(std::istream& in, const std::string& origin);
SignalTrace read_signal_trace_file(const std::string& path);

// Delay-scan table: delay_ps, objective, then per-species rms columns.
void write_scan_table(std::ostream& out, const std::vector<DelayScanPoint>& points,
                      const std::vector<std::string>& species,
                      const std::string& config_echo);

void write_interference_table(std::ostream& out,
                              const std::vector<InterferenceEvent>& events,
                              const std::string& config_echo);

}  // namespace rotkick
