#include "rotkick/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rotkick/constants.hpp"
#include "rotkick/errors.hpp"
#include "rotkick/parallel.hpp"

namespace rotkick {

namespace {
constexpr double kTailLimit = 1e-6;  // allowed weight in the top two shells

// Unnormalized weight of one (j0, m0) state: g_J * exp(-E_J / kT).
double raw_state_weight(const IsotopologueSpec& spec, double temperature_k, int j0) {
  double g = spin_weight(spec, j0);
  if (g == 0.0) return 0.0;
  double e = rotational_energy(spec, j0);
  return g * std::exp(-e / (kBoltzmannCmPerK * temperature_k));
}
}  // namespace

double ThermalEnsemble::state_weight(int j0) const {
  if (j0 < 0 || j0 > j0max) return 0.0;
  return shell_weight_[static_cast<size_t>(j0)];
}

double ThermalEnsemble::thermal_energy() const {
  double e = 0.0;
  for (int j0 = 0; j0 <= j0max; ++j0)
    e += shell_weight_[static_cast<size_t>(j0)] * (2.0 * j0 + 1.0) *
         rotational_energy(basis->spec(), j0);
  return e;
}

int thermal_shell_cutoff(const IsotopologueSpec& spec, double temperature_k) {
  if (!(temperature_k > 0.0)) throw ConfigError("temperature must be positive");
  constexpr int kHardCap = 2000;
  std::vector<double> w;
  double total = 0.0;
  for (int j0 = 0; j0 <= kHardCap; ++j0) {
    w.push_back(raw_state_weight(spec, temperature_k, j0) * (2.0 * j0 + 1.0));
    total += w.back();
    if (j0 >= 2) {
      double tail = w[static_cast<size_t>(j0)] + w[static_cast<size_t>(j0) - 1];
      if (tail < kTailLimit * total) return j0;
    }
  }
  throw NumericalError("thermal population does not converge below J=" +
                       std::to_string(kHardCap) + " for species '" + spec.name + "'",
                       "E_JMAX");
}

ThermalEnsemble boltzmann_weights(std::shared_ptr<const RotorBasis> basis,
                                  double temperature_k, int j0max) {
  if (!basis) throw ConfigError("ensemble needs a basis");
  if (!(temperature_k > 0.0)) throw ConfigError("temperature must be positive");
  if (j0max < 0) throw ConfigError("j0max must be nonnegative");
  if (j0max > basis->jmax())
    throw ConfigError("ensemble j0max exceeds the basis (jmax=" +
                      std::to_string(basis->jmax()) + ")");
  const IsotopologueSpec& spec = basis->spec();

  std::vector<double> shell(static_cast<size_t>(j0max) + 1);
  double z = 0.0;
  for (int j0 = 0; j0 <= j0max; ++j0) {
    shell[static_cast<size_t>(j0)] = raw_state_weight(spec, temperature_k, j0);
    z += shell[static_cast<size_t>(j0)] * (2.0 * j0 + 1.0);
  }
  if (!(z > 0.0))
    throw NumericalError("thermal partition function vanished for species '" +
                         spec.name + "'");
  double tail = 0.0;
  if (j0max >= 1)
    tail = (shell[static_cast<size_t>(j0max)] * (2.0 * j0max + 1.0) +
            shell[static_cast<size_t>(j0max) - 1] * (2.0 * j0max - 1.0)) /
           z;
  else
    tail = 1.0;
  if (tail >= kTailLimit)
    throw NumericalError(
        "thermal tail " + std::to_string(tail) + " at j0max=" + std::to_string(j0max) +
            " for species '" + spec.name + "'; need j0max >= " +
            std::to_string(thermal_shell_cutoff(spec, temperature_k)),
        "E_JMAX");

  ThermalEnsemble ens;
  ens.basis = std::move(basis);
  ens.temperature_k = temperature_k;
  ens.j0max = j0max;
  for (auto& s : shell) s /= z;
  ens.shell_weight_ = shell;
  for (int j0 = 0; j0 <= j0max; ++j0) {
    double w = shell[static_cast<size_t>(j0)];
    if (w == 0.0) continue;  // spin-forbidden shell
    for (int m0 = 0; m0 <= j0; ++m0)
      ens.states.push_back({j0, m0, m0 == 0 ? w : 2.0 * w});  // +-m0 folded
  }
  return ens;
}

AlignmentTrace ensemble_alignment(const ThermalEnsemble& ensemble,
                                  const PulseSequence& pulses, const TimeGrid& grid) {
  grid.validate();
  pulses.validate();
  if (!ensemble.basis) throw ConfigError("ensemble needs a basis");
  if (ensemble.states.empty()) throw ConfigError("ensemble has no populated states");

  // Thermal eigenstates are stationary, so the birth time only has to be
  // no later than the first event.
  double t_init = grid.t0;
  if (!pulses.events.empty()) t_init = std::min(t_init, pulses.events.front().t_ps);

  const int nshell = ensemble.j0max + 1;
  const size_t nsamp = static_cast<size_t>(grid.n);

  // One worker owns one J0 shell; reduction runs in fixed shell order below,
  // so results are bit-identical for any thread count.
  std::vector<int> shell_begin(static_cast<size_t>(nshell) + 1, 0);
  {
    int idx = 0;
    for (int j0 = 0; j0 < nshell; ++j0) {
      shell_begin[static_cast<size_t>(j0)] = idx;
      while (idx < static_cast<int>(ensemble.states.size()) &&
             ensemble.states[static_cast<size_t>(idx)].j0 == j0)
        ++idx;
    }
    shell_begin[static_cast<size_t>(nshell)] = idx;
  }

  std::vector<std::vector<double>> shell_cos2(static_cast<size_t>(nshell));
  std::vector<double> shell_energy(static_cast<size_t>(nshell), 0.0);
  std::vector<double> shell_leak(static_cast<size_t>(nshell), 0.0);

  parallel_for(nshell, [&](int j0) {
    int b = shell_begin[static_cast<size_t>(j0)];
    int e = shell_begin[static_cast<size_t>(j0) + 1];
    if (b == e) return;
    auto& acc = shell_cos2[static_cast<size_t>(j0)];
    acc.assign(nsamp, 0.0);
    std::vector<double> tmp(nsamp);
    for (int idx = b; idx < e; ++idx) {
      const InitialState& st = ensemble.states[static_cast<size_t>(idx)];
      WavepacketState wp(ensemble.basis, st.m0, st.j0, t_init);
      TrajectoryResult res = run_sequence_grid(std::move(wp), pulses, grid, tmp.data());
      for (size_t i = 0; i < nsamp; ++i) acc[i] += st.weight * tmp[i];
      shell_energy[static_cast<size_t>(j0)] += st.weight * res.energy_after;
      shell_leak[static_cast<size_t>(j0)] =
          std::max(shell_leak[static_cast<size_t>(j0)], res.max_leak);
    }
  });

  AlignmentTrace trace;
  trace.species = ensemble.basis->spec().name;
  trace.grid = grid;
  trace.cos2.assign(nsamp, 0.0);
  for (int j0 = 0; j0 < nshell; ++j0) {
    const auto& acc = shell_cos2[static_cast<size_t>(j0)];
    if (acc.empty()) continue;
    for (size_t i = 0; i < nsamp; ++i) trace.cos2[i] += acc[i];
    trace.energy_after += shell_energy[static_cast<size_t>(j0)];
    trace.max_leak = std::max(trace.max_leak, shell_leak[static_cast<size_t>(j0)]);
  }
  trace.energy_thermal = ensemble.thermal_energy();

  double first_pulse = pulses.events.empty()
                           ? std::numeric_limits<double>::infinity()
                           : pulses.events.front().t_ps;
  trace.chi.resize(nsamp);
  for (size_t i = 0; i < nsamp; ++i) {
    double a = trace.cos2[i];
    if (a < -1e-9 || a > 1.0 + 1e-9)
      throw NumericalError("ensemble <cos^2> left [0,1] at t=" +
                           std::to_string(grid.time(static_cast<int>(i))));
    if (grid.time(static_cast<int>(i)) < first_pulse - 1e-9 &&
        std::abs(a - 1.0 / 3.0) > 1e-9)
      throw NumericalError("pre-pulse ensemble <cos^2> deviates from 1/3 at t=" +
                           std::to_string(grid.time(static_cast<int>(i))));
    trace.chi[i] = a - 1.0 / 3.0;
  }
  return trace;
}

}  // namespace rotkick
