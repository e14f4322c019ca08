#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rotkick/control.hpp"
#include "rotkick/molecule.hpp"
#include "rotkick/signal.hpp"
#include "rotkick/time_grid.hpp"
#include "rotkick/wavepacket.hpp"

namespace rotkick {

// Parsed run description.  Strict line-oriented "key value..." format;
// unknown keys, malformed values and bad cross-references all raise
// ConfigError with the offending line number.
struct RunConfig {
  double temperature_k = 295.0;
  double t_start_ps = 0.0;
  std::optional<double> t_end_ps;
  double dt_ps = 0.01;

  std::vector<SignalComponent> components;  // resolved against the library
  PulseSequence pulses;

  std::optional<double> decay_tau_ps;  // "decay on" -> 200 ps
  std::optional<int> jmax;
  bool rigid = false;

  std::string target;  // species name for control runs; default: first
  double p1 = 3.0;
  double p2 = 3.0;
  std::optional<double> scan_from_ps, scan_to_ps;
  double scan_step_ps = 0.0;  // 0 -> min(T_rev)/40
  std::optional<double> horizon_ps;
  ControlObjective objective;

  double revival_index = 2.0;
  double interfere_tol_ps = 0.1;

  std::string library_path;  // empty -> builtin table

  // Derived accessors -------------------------------------------------
  TimeGrid grid() const;  // requires t_end; throws ConfigError otherwise
  SimOptions sim_options() const { return SimOptions{jmax, rigid}; }
  int target_index() const;  // index into components
  double default_horizon_ps() const;
  double max_revival_ps() const;
  double min_revival_ps() const;

  // Canonical key-value echo of every resolved setting; deterministic.
  std::string echo() const;
};

RunConfig parse_run_config(std::istream& in, const std::string& origin,
                           const MoleculeLibrary* library_override = nullptr);
RunConfig load_run_config(const std::string& path,
                          const MoleculeLibrary* library_override = nullptr);

}  // namespace rotkick
