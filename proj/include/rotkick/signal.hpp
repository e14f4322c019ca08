#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rotkick/ensemble.hpp"
#include "rotkick/molecule.hpp"
#include "rotkick/time_grid.hpp"
#include "rotkick/wavepacket.hpp"

namespace rotkick {

struct SignalComponent {
  IsotopologueSpec spec;
  double fraction = 1.0;
};

// Knobs shared by every simulation entry point.
struct SimOptions {
  std::optional<int> jmax;  // pin the basis size; disables auto-growth
  bool rigid = false;       // force D = 0
};

struct SignalTrace {
  TimeGrid grid;
  std::vector<std::string> species;       // component order preserved
  std::vector<double> fractions;
  std::vector<std::vector<double>> chi;   // chi_s(t) = <cos^2>_s - 1/3
  std::vector<double> signal;             // normalized |sum_s f_s chi_s env|^2
  double norm = 1.0;                      // raw signal / norm = stored signal
  std::optional<double> decay_tau_ps;
  PulseSequence pulses;
};

// Alignment of one species at temperature T with automatic basis sizing:
// start from the thermal cutoff plus kick headroom, grow until the post-kick
// truncation leak drops below 1e-8.  A pinned jmax that still leaks is a
// NumericalError.
AlignmentTrace species_alignment(const IsotopologueSpec& spec, double temperature_k,
                                 const PulseSequence& pulses, const TimeGrid& grid,
                                 const SimOptions& opt = {});

// Heterodyne-free four-wave-mixing signal of an isotopic mixture:
//   S(t) = [ sum_s f_s * chi_s(t) * env(t) ]^2,  env = exp(-t/tau) if set.
// S is scaled so the first post-kick maximum of the equivalent pure
// first-component signal equals 1; chi columns are stored unscaled.
SignalTrace mixture_fwm_signal(const std::vector<SignalComponent>& components,
                               const PulseSequence& pulses, double temperature_k,
                               const TimeGrid& grid,
                               std::optional<double> decay_tau_ps = std::nullopt,
                               const SimOptions& opt = {});

}  // namespace rotkick
