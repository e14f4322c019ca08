#include "rotkick/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "rotkick/constants.hpp"
#include "rotkick/errors.hpp"

namespace rotkick {

namespace {
constexpr double kNormTol = 1e-9;
// A pulse and a sample closer than this (ps) are treated as coincident,
// in which case the sample is recorded before the kick.
constexpr double kEventTol = 1e-9;

double angular_rate(double energy_cm1) {
  // radians per ps for a level at energy_cm1
  return 2.0 * std::numbers::pi * kSpeedOfLightCmPerPs * energy_cm1;
}

void check_norm(const WavepacketState& state, const char* where) {
  double n = state.norm();
  if (std::abs(n - 1.0) > kNormTol)
    throw NumericalError(std::string("wavepacket norm drifted to ") +
                         std::to_string(n) + " " + where);
}
}  // namespace

double PulseSequence::total_strength() const {
  double p = 0.0;
  for (const auto& e : events) p += e.strength;
  return p;
}

void PulseSequence::validate() const {
  for (size_t i = 0; i < events.size(); ++i) {
    if (!(events[i].strength >= 0.0))
      throw ConfigError("pulse strength must be nonnegative");
    if (!std::isfinite(events[i].t_ps) || !std::isfinite(events[i].strength))
      throw ConfigError("pulse parameters must be finite");
    if (i > 0 && !(events[i].t_ps > events[i - 1].t_ps))
      throw ConfigError("pulse times must be strictly increasing");
  }
}

WavepacketState::WavepacketState(std::shared_ptr<const RotorBasis> basis, int m,
                                 int j0, double t0_ps)
    : basis_(std::move(basis)), m_(m), t_ps_(t0_ps) {
  if (!basis_) throw ConfigError("wavepacket needs a basis");
  int am = std::abs(m_);
  if (am > basis_->jmax() || j0 < am || j0 > basis_->jmax())
    throw ConfigError("initial state |j0=" + std::to_string(j0) +
                      ", m=" + std::to_string(m_) + "> outside basis");
  amp_.assign(static_cast<size_t>(basis_->jmax() - am + 1), {0.0, 0.0});
  amp_[static_cast<size_t>(j0 - am)] = {1.0, 0.0};
}

std::complex<double>& WavepacketState::amp(int j) {
  return amp_[static_cast<size_t>(j - jmin())];
}

const std::complex<double>& WavepacketState::amp(int j) const {
  return amp_[static_cast<size_t>(j - jmin())];
}

double WavepacketState::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

void apply_kick(WavepacketState& state, double strength) {
  const Cos2Block& block = state.basis().block(state.m());
  block.apply_kick(state.amplitudes().data(), strength);
  check_norm(state, "after kick");
}

void free_propagate(WavepacketState& state, double dt_ps) {
  if (dt_ps == 0.0) return;
  const RotorBasis& basis = state.basis();
  const int jmin = state.jmin();
  auto& amp = state.amplitudes();
  for (int k = 0; k < state.size(); ++k) {
    double ang = -angular_rate(basis.energy(jmin + k)) * dt_ps;
    amp[static_cast<size_t>(k)] *= std::complex<double>(std::cos(ang), std::sin(ang));
  }
  state.set_time(state.t_ps() + dt_ps);
}

double expectation_cos2(const WavepacketState& state) {
  const Cos2Block& block = state.basis().block(state.m());
  double v = block.expectation(state.amplitudes().data());
  if (v < -1e-9 || v > 1.0 + 1e-9)
    throw NumericalError("<cos^2> = " + std::to_string(v) + " outside [0,1]");
  return v;
}

double expectation_energy(const WavepacketState& state) {
  const RotorBasis& basis = state.basis();
  const int jmin = state.jmin();
  double e = 0.0;
  for (int k = 0; k < state.size(); ++k)
    e += std::norm(state.amplitudes()[static_cast<size_t>(k)]) *
         basis.energy(jmin + k);
  return e;
}

double truncation_leak(const WavepacketState& state) {
  const auto& amp = state.amplitudes();
  size_t n = amp.size();
  double leak = std::norm(amp[n - 1]);
  if (n >= 2) leak += std::norm(amp[n - 2]);
  return leak;
}

std::vector<double> run_sequence(WavepacketState state, const PulseSequence& pulses,
                                 std::span<const double> sample_times_ps) {
  pulses.validate();
  for (size_t i = 1; i < sample_times_ps.size(); ++i)
    if (sample_times_ps[i] < sample_times_ps[i - 1])
      throw ConfigError("sample times must be nondecreasing");
  if (!sample_times_ps.empty() && sample_times_ps[0] < state.t_ps())
    throw ConfigError("sample times precede the state's time");
  if (!pulses.events.empty() && pulses.events[0].t_ps < state.t_ps() - kEventTol)
    throw ConfigError("pulse precedes the state's time");

  std::vector<double> out;
  out.reserve(sample_times_ps.size());
  size_t p = 0;
  for (double ts : sample_times_ps) {
    while (p < pulses.events.size() && pulses.events[p].t_ps < ts - kEventTol) {
      free_propagate(state, pulses.events[p].t_ps - state.t_ps());
      apply_kick(state, pulses.events[p].strength);
      ++p;
    }
    free_propagate(state, ts - state.t_ps());
    out.push_back(expectation_cos2(state));
    // pulses coincident with this sample fire immediately after it
    while (p < pulses.events.size() && pulses.events[p].t_ps <= ts + kEventTol) {
      apply_kick(state, pulses.events[p].strength);
      ++p;
    }
  }
  return out;
}

TrajectoryResult run_sequence_grid(WavepacketState state, const PulseSequence& pulses,
                                   const TimeGrid& grid, double* out_cos2) {
  grid.validate();
  pulses.validate();
  if (grid.t0 < state.t_ps())
    throw ConfigError("sample grid precedes the state's time");
  if (!pulses.events.empty() && pulses.events[0].t_ps < state.t_ps() - kEventTol)
    throw ConfigError("pulse precedes the state's time");

  const RotorBasis& basis = state.basis();
  const Cos2Block& block = basis.block(state.m());
  const int jmin = state.jmin();
  const int n = state.size();

  // One phase factor per J advances a whole grid step.
  std::vector<std::complex<double>> step(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double ang = -angular_rate(basis.energy(jmin + k)) * grid.dt;
    step[static_cast<size_t>(k)] = {std::cos(ang), std::sin(ang)};
  }

  TrajectoryResult res;
  auto* amp = state.amplitudes().data();
  auto fire = [&](const PulseEvent& ev) {
    free_propagate(state, ev.t_ps - state.t_ps());
    block.apply_kick(amp, ev.strength);
    check_norm(state, "after kick");
    res.max_leak = std::max(res.max_leak, truncation_leak(state));
  };

  size_t p = 0;
  int i = 0;
  while (i < grid.n) {
    // Samples up to (and including) the next pulse time belong to this
    // free-evolution segment.
    int seg_end = grid.n - 1;
    if (p < pulses.events.size()) {
      double tp = pulses.events[p].t_ps;
      if (grid.time(i) > tp + kEventTol) {  // pulse strictly before next sample
        fire(pulses.events[p]);
        ++p;
        continue;
      }
      int est = static_cast<int>(std::floor((tp + kEventTol - grid.t0) / grid.dt));
      seg_end = std::min(seg_end, std::max(i, est + 1));
      while (seg_end > i && grid.time(seg_end) > tp + kEventTol) --seg_end;
    }
    free_propagate(state, grid.time(i) - state.t_ps());
    out_cos2[i] = block.expectation(amp);
    for (int k = i + 1; k <= seg_end; ++k) {
      const auto* s = step.data();
      for (int q = 0; q < n; ++q) amp[q] *= s[q];
      out_cos2[k] = block.expectation(amp);
    }
    state.set_time(grid.time(seg_end));
    i = seg_end + 1;
  }
  while (p < pulses.events.size()) {  // pulses beyond the sampled window
    fire(pulses.events[p]);
    ++p;
  }
  check_norm(state, "after run");
  res.energy_after = expectation_energy(state);
  return res;
}

void dump_amplitudes(std::ostream& out, const WavepacketState& state) {
  const int jmin = state.jmin();
  out << "# t_ps " << state.t_ps() << " m " << state.m() << "\n";
  out << "# J\tRe\tIm\n";
  char buf[80];
  for (int k = 0; k < state.size(); ++k) {
    const auto& a = state.amplitudes()[static_cast<size_t>(k)];
    std::snprintf(buf, sizeof buf, "%d\t%.17g\t%.17g\n", jmin + k, a.real(), a.imag());
    out << buf;
  }
}

}  // namespace rotkick
