#include "rotkick/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rotkick/constants.hpp"
#include "rotkick/errors.hpp"

namespace rotkick {

namespace {
constexpr const char* kMagic = "# rotkick trace v1";

void put17(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void write_header(std::ostream& out, const std::string& config_echo) {
  out << kMagic << "\n";
  out << "# version: rotkick " << kVersion << "\n";
  out << "# config-begin\n";
  std::istringstream echo(config_echo);
  std::string line;
  while (std::getline(echo, line)) out << "# " << line << "\n";
  out << "# config-end\n";
}
}  // namespace

void write_signal_trace(std::ostream& out, const SignalTrace& trace,
                        const std::string& config_echo) {
  write_header(out, config_echo);
  out << "# norm ";
  put17(out, trace.norm);
  out << "\n";
  out << "time_ps";
  for (const auto& name : trace.species) out << "\tchi_" << name;
  out << "\tsignal\n";
  for (int i = 0; i < trace.grid.n; ++i) {
    put17(out, trace.grid.time(i));
    for (const auto& col : trace.chi) {
      out << '\t';
      put17(out, col[static_cast<size_t>(i)]);
    }
    out << '\t';
    put17(out, trace.signal[static_cast<size_t>(i)]);
    out << '\n';
  }
}

void write_signal_trace_file(const std::string& path, const SignalTrace& trace,
                             const std::string& config_echo) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace '" + path + "'");
  write_signal_trace(out, trace, config_echo);
  if (!out.good()) throw ConfigError("failed while writing trace '" + path + "'");
}

SignalTrace read_signal_trace(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ConfigError(origin + ": not a rotkick trace (bad magic line)");

  SignalTrace trace;
  bool have_columns = false;
  int lineno = 1;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line);
      std::string hash, key;
      ss >> hash >> key;
      if (key == "norm") ss >> trace.norm;
      continue;
    }
    if (!have_columns) {
      std::istringstream ss(line);
      std::string col;
      std::vector<std::string> cols;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (cols.size() < 2 || cols.front() != "time_ps" || cols.back() != "signal")
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unexpected column header");
      for (size_t i = 1; i + 1 < cols.size(); ++i) {
        if (cols[i].rfind("chi_", 0) != 0)
          throw ConfigError(origin + ":" + std::to_string(lineno) +
                            ": unexpected column '" + cols[i] + "'");
        trace.species.push_back(cols[i].substr(4));
      }
      trace.chi.resize(trace.species.size());
      have_columns = true;
      continue;
    }
    std::istringstream ss(line);
    double t;
    if (!(ss >> t))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad data row");
    times.push_back(t);
    for (auto& col : trace.chi) {
      double v;
      if (!(ss >> v))
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad data row");
      col.push_back(v);
    }
    double s;
    if (!(ss >> s))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad data row");
    trace.signal.push_back(s);
  }
  if (!have_columns || times.size() < 2)
    throw ConfigError(origin + ": trace holds no data");

  trace.grid.t0 = times.front();
  trace.grid.n = static_cast<int>(times.size());
  trace.grid.dt = (times.back() - times.front()) / (trace.grid.n - 1);
  trace.grid.validate();
  return trace;
}

SignalTrace read_signal_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  return read_signal_trace(in, path);
}

void write_scan_table(std::ostream& out, const std::vector<DelayScanPoint>& points,
                      const std::vector<std::string>& species,
                      const std::string& config_echo) {
  write_header(out, config_echo);
  out << "delay_ps\tobjective\tselectivity";
  for (const auto& name : species)
    out << "\trms_" << name << "\trms_single_" << name << "\tdE_" << name;
  out << "\n";
  for (const auto& pt : points) {
    put17(out, pt.delay_ps);
    out << '\t';
    put17(out, pt.objective);
    out << '\t';
    put17(out, pt.report.selectivity);
    for (const auto& m : pt.report.metrics) {
      out << '\t';
      put17(out, m.rms_chi);
      out << '\t';
      put17(out, m.rms_chi_single);
      out << '\t';
      put17(out, m.energy_gain);
    }
    out << '\n';
  }
}

void write_interference_table(std::ostream& out,
                              const std::vector<InterferenceEvent>& events,
                              const std::string& config_echo) {
  write_header(out, config_echo);
  out << "t_ps\tkind\tmultiple_a\tmultiple_b\n";
  for (const auto& ev : events) {
    put17(out, ev.t_ps);
    out << '\t' << to_string(ev.kind) << '\t';
    put17(out, ev.multiple_a);
    out << '\t';
    put17(out, ev.multiple_b);
    out << '\n';
  }
}

}  // namespace rotkick
