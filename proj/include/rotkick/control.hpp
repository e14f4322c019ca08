#pragma once

#include <string>
#include <vector>

#include "rotkick/signal.hpp"

namespace rotkick {

// Everything two_pulse_response measures for one species.
struct SpeciesControlMetrics {
  std::string species;
  double rms_chi = 0.0;         // rms of chi over the scoring window
  double rms_chi_single = 0.0;  // same window, first pulse only
  double energy_gain = 0.0;     // <E>_after - <E>_thermal, cm^-1
  double energy_gain_single = 0.0;
};

struct SelectivityReport {
  double delay_ps = 0.0;
  int target_index = 0;
  std::vector<SpeciesControlMetrics> metrics;  // component order
  // rms_target / max over other species of rms; infinity-free: single
  // species mixtures report the plain rms ratio vs the single-pulse run.
  double selectivity = 0.0;
  bool single_species = false;
};

struct ControlObjective {
  enum Kind { Selectivity, Suppression } kind = Selectivity;
  // Selectivity: maximize rms_target / max_other rms.
  // Suppression: minimize the target's energy gain.
};

// Applies P1 at t=0 and P2 at t=delay to each species of the mixture and
// scores alignment over the window [delay + 0.05*maxT_rev, horizon], where
// maxT_rev is the longest revival period in the mixture.  The same window
// is used for the single-pulse reference (P1 only).
SelectivityReport two_pulse_response(const std::vector<SignalComponent>& components,
                                     int target_index, double p1, double p2,
                                     double delay_ps, double temperature_k,
                                     double horizon_ps, double dt_ps = 0.01,
                                     const SimOptions& opt = {});

struct DelayScanPoint {
  double delay_ps = 0.0;
  double objective = 0.0;
  SelectivityReport report;
};

std::vector<DelayScanPoint> scan_delay(const std::vector<SignalComponent>& components,
                                       int target_index, double p1, double p2,
                                       const TimeGrid& delays, double temperature_k,
                                       double horizon_ps,
                                       const ControlObjective& objective,
                                       double dt_ps = 0.01,
                                       const SimOptions& opt = {});

struct OptimizeResult {
  double delay_ps = 0.0;
  double objective = 0.0;
  SelectivityReport report;
};

// Coarse scan (step = shortest T_rev / 40) over [delay_lo, delay_hi], then
// golden-section refinement of the best interior bracket to 1e-3 ps.
// Throws AnalysisError (code E_NO_OPTIMUM) when the objective is flat or
// achieves its best value only at the bracket edge.
OptimizeResult optimize_delay(const std::vector<SignalComponent>& components,
                              int target_index, double p1, double p2,
                              double delay_lo_ps, double delay_hi_ps,
                              double temperature_k, double horizon_ps,
                              const ControlObjective& objective, double dt_ps = 0.01,
                              const SimOptions& opt = {});

}  // namespace rotkick
