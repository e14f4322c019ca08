#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rotkick/rotor.hpp"
#include "rotkick/time_grid.hpp"
#include "rotkick/wavepacket.hpp"

namespace rotkick {

// One thermally occupied initial condition.  Only m0 >= 0 is stored: the
// dynamics depend on M^2, so the -m0 partner is folded into the weight.
struct InitialState {
  int j0 = 0;
  int m0 = 0;
  double weight = 0.0;
};

struct ThermalEnsemble {
  std::shared_ptr<const RotorBasis> basis;
  double temperature_k = 0.0;
  int j0max = 0;                     // highest occupied shell kept
  std::vector<InitialState> states;  // ascending (j0, m0); weights sum to 1

  // Boltzmann weight of one signed (j0, m0) pair, before +-m folding.
  double state_weight(int j0) const;
  double thermal_energy() const;  // ensemble <E> before any pulse

 private:
  friend ThermalEnsemble boltzmann_weights(std::shared_ptr<const RotorBasis>,
                                           double, int);
  std::vector<double> shell_weight_;  // per (j0,m0) weight, index j0
};

// Smallest cutoff whose top two shells carry < 1e-6 of the population.
int thermal_shell_cutoff(const IsotopologueSpec& spec, double temperature_k);

// Populations w(J0,M0) ~ g_J0 * exp(-E_J0 / kT), equal across M0, spin
// weights g from spin_weight().  Normalized to 1.  Throws NumericalError
// if the top two shells at j0max still hold >= 1e-6 of the population, and
// ConfigError if the basis cannot hold j0max.
ThermalEnsemble boltzmann_weights(std::shared_ptr<const RotorBasis> basis,
                                  double temperature_k, int j0max);

// <cos^2>(t) averaged over the thermal ensemble after `pulses`.
struct AlignmentTrace {
  std::string species;
  TimeGrid grid;
  std::vector<double> cos2;      // ensemble <cos^2>
  std::vector<double> chi;       // cos2 - 1/3
  double energy_after = 0.0;     // ensemble <E> after the last pulse, cm^-1
  double energy_thermal = 0.0;   // ensemble <E> with no pulses
  double max_leak = 0.0;         // worst top-two-shell population seen
};

AlignmentTrace ensemble_alignment(const ThermalEnsemble& ensemble,
                                  const PulseSequence& pulses,
                                  const TimeGrid& grid);

}  // namespace rotkick
