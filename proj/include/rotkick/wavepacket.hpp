#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "rotkick/rotor.hpp"
#include "rotkick/time_grid.hpp"

namespace rotkick {

struct PulseEvent {
  double t_ps = 0.0;
  double strength = 0.0;  // dimensionless kick strength P
};

struct PulseSequence {
  std::vector<PulseEvent> events;  // strictly increasing in time

  static PulseSequence single(double t_ps, double strength) {
    return PulseSequence{{{t_ps, strength}}};
  }

  double total_strength() const;
  void validate() const;  // throws ConfigError on disorder or negative P
};

// One rotational wavepacket at fixed M: amplitudes a_J for J in
// [|M|, basis.jmax], the phase convention being
//   a_J(t + dt) = a_J(t) * exp(-i * 2*pi*c * E_J * dt).
class WavepacketState {
 public:
  // Eigenstate |j0, m> at time t0.
  WavepacketState(std::shared_ptr<const RotorBasis> basis, int m, int j0,
                  double t0_ps = 0.0);

  const RotorBasis& basis() const { return *basis_; }
  std::shared_ptr<const RotorBasis> basis_ptr() const { return basis_; }
  int m() const { return m_; }
  int jmin() const { return std::abs(m_); }
  int size() const { return static_cast<int>(amp_.size()); }
  double t_ps() const { return t_ps_; }

  std::complex<double>& amp(int j);  // by absolute J
  const std::complex<double>& amp(int j) const;
  std::vector<std::complex<double>>& amplitudes() { return amp_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  double norm() const;

  void set_time(double t_ps) { t_ps_ = t_ps; }

 private:
  std::shared_ptr<const RotorBasis> basis_;
  int m_;
  double t_ps_;
  std::vector<std::complex<double>> amp_;
};

// amp <- exp(i*strength*cos^2) amp; time unchanged (impulsive limit).
// Throws NumericalError if the norm drifts by more than 1e-9.
void apply_kick(WavepacketState& state, double strength);

// Free evolution by dt_ps (may be negative).
void free_propagate(WavepacketState& state, double dt_ps);

// <cos^2(theta)>; throws NumericalError if outside [0,1] beyond round-off.
double expectation_cos2(const WavepacketState& state);

// <E> in cm^-1.
double expectation_energy(const WavepacketState& state);

// Fraction of population in the top two J shells of the basis; used to
// detect truncation pressure after a kick.
double truncation_leak(const WavepacketState& state);

// Evolves through `pulses`, recording <cos^2> at each sample time.
// Samples must be nondecreasing and start at or after the state's time.
// A sample at exactly a pulse time is recorded before the kick.
std::vector<double> run_sequence(WavepacketState state, const PulseSequence& pulses,
                                 std::span<const double> sample_times_ps);

// Result of the grid runner below; cheap diagnostics come along for free.
struct TrajectoryResult {
  double energy_after = 0.0;  // <E> after the last pulse
  double max_leak = 0.0;      // max top-two-shell population seen post-kick
};

// Fast path for uniform grids: one cached phase factor per J advances the
// whole trajectory sample-to-sample.  Identical semantics, same convention
// for pulse/sample coincidence.  out_cos2 must have room for grid.n values.
TrajectoryResult run_sequence_grid(WavepacketState state, const PulseSequence& pulses,
                                   const TimeGrid& grid, double* out_cos2);

// Rows "J  Re(a_J)  Im(a_J)" for debugging / external plotting.
void dump_amplitudes(std::ostream& out, const WavepacketState& state);

}  // namespace rotkick
