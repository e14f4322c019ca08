#include "rotkick/signal.hpp"

#include <cmath>
#include <memory>

#include "rotkick/errors.hpp"

namespace rotkick {

namespace {
constexpr double kLeakLimit = 1e-8;

IsotopologueSpec effective_spec(const IsotopologueSpec& spec, const SimOptions& opt) {
  IsotopologueSpec s = spec;
  if (opt.rigid) s.d_cm1 = 0.0;
  return s;
}

// Basis truncation: thermal reach plus kick headroom.  A kick of total
// strength P ladders population up by a few units of P in J.
int headroom_jmax(int j0max, double total_strength) {
  return j0max + static_cast<int>(std::ceil(4.0 * total_strength)) + 10;
}
}  // namespace

AlignmentTrace species_alignment(const IsotopologueSpec& spec, double temperature_k,
                                 const PulseSequence& pulses, const TimeGrid& grid,
                                 const SimOptions& opt) {
  IsotopologueSpec s = effective_spec(spec, opt);
  validate_spec(s);
  int j0max = thermal_shell_cutoff(s, temperature_k);

  if (opt.jmax) {
    if (*opt.jmax < j0max)
      throw ConfigError("jmax=" + std::to_string(*opt.jmax) +
                        " cannot hold the thermal ensemble of '" + s.name +
                        "' (needs >= " + std::to_string(j0max) + ")");
    auto basis = std::make_shared<const RotorBasis>(s, *opt.jmax);
    auto ens = boltzmann_weights(basis, temperature_k, j0max);
    AlignmentTrace trace = ensemble_alignment(ens, pulses, grid);
    if (trace.max_leak >= kLeakLimit)
      throw NumericalError("population leaked into the top of the pinned basis "
                           "(leak=" + std::to_string(trace.max_leak) +
                           ", jmax=" + std::to_string(*opt.jmax) + ")",
                           "E_JMAX");
    return trace;
  }

  int jmax = headroom_jmax(j0max, pulses.total_strength());
  constexpr int kGrowthSteps = 6;
  for (int attempt = 0;; ++attempt) {
    auto basis = std::make_shared<const RotorBasis>(s, jmax);
    auto ens = boltzmann_weights(basis, temperature_k, j0max);
    AlignmentTrace trace = ensemble_alignment(ens, pulses, grid);
    if (trace.max_leak < kLeakLimit) return trace;
    if (attempt + 1 >= kGrowthSteps)
      throw NumericalError("basis growth did not tame truncation leak for '" +
                           s.name + "' (leak=" + std::to_string(trace.max_leak) +
                           " at jmax=" + std::to_string(jmax) + ")",
                           "E_JMAX");
    jmax += 8;
  }
}

SignalTrace mixture_fwm_signal(const std::vector<SignalComponent>& components,
                               const PulseSequence& pulses, double temperature_k,
                               const TimeGrid& grid,
                               std::optional<double> decay_tau_ps,
                               const SimOptions& opt) {
  if (components.empty()) throw ConfigError("mixture needs at least one component");
  double fsum = 0.0;
  for (const auto& c : components) {
    if (c.fraction < 0.0) throw ConfigError("mixture fractions must be nonnegative");
    fsum += c.fraction;
  }
  if (std::abs(fsum - 1.0) > 1e-9)
    throw ConfigError("mixture fractions sum to " + std::to_string(fsum) +
                      ", expected 1");
  if (decay_tau_ps && !(*decay_tau_ps > 0.0))
    throw ConfigError("decay time must be positive");

  SignalTrace trace;
  trace.grid = grid;
  trace.pulses = pulses;
  trace.decay_tau_ps = decay_tau_ps;
  for (const auto& c : components) {
    AlignmentTrace at = species_alignment(c.spec, temperature_k, pulses, grid, opt);
    trace.species.push_back(c.spec.name);
    trace.fractions.push_back(c.fraction);
    trace.chi.push_back(std::move(at.chi));
  }

  const size_t nsamp = static_cast<size_t>(grid.n);
  std::vector<double> env(nsamp, 1.0);
  if (decay_tau_ps)
    for (size_t i = 0; i < nsamp; ++i)
      env[i] = std::exp(-grid.time(static_cast<int>(i)) / *decay_tau_ps);

  // Scale reference: the pure first-component signal, normalized to its
  // first maximum after the last pulse.
  std::vector<double> ref(nsamp);
  for (size_t i = 0; i < nsamp; ++i) {
    double x = trace.chi[0][i] * env[i];
    ref[i] = x * x;
  }
  double t_last = pulses.events.empty() ? grid.t0 : pulses.events.back().t_ps;
  trace.norm = 0.0;
  for (size_t i = 1; i + 1 < nsamp; ++i) {
    if (grid.time(static_cast<int>(i)) <= t_last) continue;
    if (ref[i] >= ref[i - 1] && ref[i] > ref[i + 1] && ref[i] > 0.0) {
      trace.norm = ref[i];
      break;
    }
  }
  if (trace.norm == 0.0)
    for (double v : ref) trace.norm = std::max(trace.norm, v);
  if (trace.norm == 0.0) trace.norm = 1.0;

  trace.signal.assign(nsamp, 0.0);
  for (size_t i = 0; i < nsamp; ++i) {
    double mix = 0.0;
    for (size_t s = 0; s < trace.chi.size(); ++s)
      mix += trace.fractions[s] * trace.chi[s][i];
    mix *= env[i];
    trace.signal[i] = mix * mix / trace.norm;
  }
  return trace;
}

}  // namespace rotkick
