#pragma once

#include <span>
#include <string>
#include <vector>

#include "rotkick/molecule.hpp"
#include "rotkick/signal.hpp"
#include "rotkick/time_grid.hpp"

namespace rotkick {

struct PeriodEstimate {
  double period_ps = 0.0;
  double rel_uncertainty = 0.0;  // conservative, from comb-peak curvature
  double contrast = 0.0;         // autocorrelation comb peak height (0..1)
  int comb_peaks = 0;            // number of comb peaks used in the fit
};

// Recovers the dominant revival period of a trace by normalized
// autocorrelation (lags up to half the record) followed by a least-squares
// fit through the full comb of correlation peaks.  `halved_ok` enables the
// subharmonic check used for squared-law signals, where half-revivals make
// every other comb peak (set it when feeding S rather than chi).
// Throws AnalysisError (code E_NO_COMB) when no periodic comb stands out.
PeriodEstimate estimate_revival_period(std::span<const double> values,
                                       const TimeGrid& grid, bool halved_ok = false);

// Trace convenience: species_index >= 0 analyzes that chi column (signed,
// no subharmonic ambiguity); -1 analyzes the squared signal column with the
// subharmonic correction enabled.
PeriodEstimate estimate_revival_period(const SignalTrace& trace, int species_index);

// Counts consecutive revival features: window k covers
// [t_from + (k-1/2)*T, t_from + (k+1/2)*T] and holds a feature when its
// maximum clears the window's quiet floor by a fixed contrast.  The count
// stops at the first empty or truncated window, so it measures how long the
// revival comb persists.
int count_revival_features(std::span<const double> values, const TimeGrid& grid,
                           double period_ps, double t_from_ps = 0.0);

enum class InterferenceKind { Constructive, Destructive, Fractional };

struct InterferenceEvent {
  double t_ps = 0.0;
  InterferenceKind kind = InterferenceKind::Fractional;
  double multiple_a = 0.0;  // t / T_rev(A), a quarter-integer
  double multiple_b = 0.0;
};

const char* to_string(InterferenceKind kind);

// Coincidences of quarter-revival epochs of two species within `horizon_ps`:
// times where t/T_A and t/T_B are both quarter-integers, within tol_ps.
// integer+integer or half+half -> constructive, integer+half -> destructive,
// anything involving odd quarters -> fractional.
std::vector<InterferenceEvent> predict_interference_times(
    const IsotopologueSpec& a, const IsotopologueSpec& b, double horizon_ps,
    double tol_ps = 0.1);

struct ResolvedPeak {
  std::string species;
  double t_ps = 0.0;
  double amplitude = 0.0;  // signal height at the peak
};

// Locates, near revival_index * T_rev(s) for each species s, the signal
// peak belonging to that species, and checks the peaks are mutually
// resolved (every valley between neighbours drops below half the smaller
// adjacent peak).  revival_index may be half-integer (0.5 = half revival).
// Throws AnalysisError (code E_UNRESOLVED) when the peaks overlap into an
// unresolved clump.
std::vector<ResolvedPeak> resolve_isotopologue_peaks(
    const SignalTrace& trace, std::span<const IsotopologueSpec> species,
    double revival_index);

struct AbundanceEstimate {
  std::vector<double> fractions;  // normalized to sum 1
};

// Mixing fractions from resolved signal peak heights: the signal is
// quadratic in f_s*chi_s, so fractions go as sqrt(peak amplitude).
AbundanceEstimate estimate_abundances(std::span<const double> peak_amplitudes);

}  // namespace rotkick
