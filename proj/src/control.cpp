#include "rotkick/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "rotkick/ensemble.hpp"
#include "rotkick/errors.hpp"

namespace rotkick {

namespace {
constexpr double kLeakLimit = 1e-8;
constexpr double kWindowLead = 0.05;  // dead time after the second pulse, in maxT
constexpr double kDelayTol = 1e-3;    // golden-section convergence, ps

struct SpeciesSetup {
  std::string name;
  std::shared_ptr<const RotorBasis> basis;
  ThermalEnsemble ensemble;
  double e_thermal = 0.0;
  // First-pulse-only reference on the full grid, for O(1) window rms.
  std::vector<double> chi2_prefix;
  double e_single_after = 0.0;
};

struct ControlContext {
  std::vector<SpeciesSetup> setups;
  TimeGrid full;  // anchored at t=0, spacing dt, covering [0, horizon]
  int target = 0;
  double p1 = 0.0, p2 = 0.0;
  double max_revival = 0.0, min_revival = 0.0;
};

ControlContext make_context(const std::vector<SignalComponent>& components,
                            int target_index, double p1, double p2,
                            double temperature_k, double horizon_ps, double dt_ps,
                            const SimOptions& opt) {
  if (components.empty()) throw ConfigError("control run needs at least one species");
  if (target_index < 0 || target_index >= static_cast<int>(components.size()))
    throw ConfigError("target species index out of range");
  if (!(p1 >= 0.0) || !(p2 >= 0.0)) throw ConfigError("pulse strengths must be >= 0");
  if (!(dt_ps > 0.0)) throw ConfigError("dt must be positive");
  if (!(horizon_ps > dt_ps)) throw ConfigError("horizon must exceed dt");

  ControlContext ctx;
  ctx.target = target_index;
  ctx.p1 = p1;
  ctx.p2 = p2;
  ctx.full = TimeGrid::span(0.0, horizon_ps, dt_ps);
  ctx.max_revival = 0.0;
  ctx.min_revival = std::numeric_limits<double>::infinity();

  PulseSequence first_only = PulseSequence::single(0.0, p1);
  for (const auto& c : components) {
    IsotopologueSpec s = c.spec;
    if (opt.rigid) s.d_cm1 = 0.0;
    validate_spec(s);
    double trev = revival_time_ps(s);
    ctx.max_revival = std::max(ctx.max_revival, trev);
    ctx.min_revival = std::min(ctx.min_revival, trev);

    SpeciesSetup setup;
    setup.name = s.name;
    int j0max = thermal_shell_cutoff(s, temperature_k);
    int jmax = opt.jmax ? *opt.jmax
                        : j0max + static_cast<int>(std::ceil(4.0 * (p1 + p2))) + 10;
    if (jmax < j0max)
      throw ConfigError("jmax too small for the thermal ensemble of '" + s.name + "'");
    setup.basis = std::make_shared<const RotorBasis>(s, jmax);
    setup.ensemble = boltzmann_weights(setup.basis, temperature_k, j0max);
    setup.e_thermal = setup.ensemble.thermal_energy();

    AlignmentTrace single = ensemble_alignment(setup.ensemble, first_only, ctx.full);
    if (single.max_leak >= kLeakLimit)
      throw NumericalError("basis too small for '" + s.name +
                           "' in the control run (leak=" +
                           std::to_string(single.max_leak) + ")",
                           "E_JMAX");
    setup.e_single_after = single.energy_after;
    setup.chi2_prefix.assign(static_cast<size_t>(ctx.full.n) + 1, 0.0);
    for (int i = 0; i < ctx.full.n; ++i) {
      double x = single.chi[static_cast<size_t>(i)];
      setup.chi2_prefix[static_cast<size_t>(i) + 1] =
          setup.chi2_prefix[static_cast<size_t>(i)] + x * x;
    }
    ctx.setups.push_back(std::move(setup));
  }
  return ctx;
}

SelectivityReport evaluate_delay(const ControlContext& ctx, double delay_ps) {
  if (!(delay_ps > 0.0)) throw ConfigError("pulse delay must be positive");
  double wstart = delay_ps + kWindowLead * ctx.max_revival;
  int i0 = static_cast<int>(std::ceil((wstart - ctx.full.t0) / ctx.full.dt - 1e-9));
  i0 = std::max(i0, 0);
  int nwin = ctx.full.n - i0;
  if (nwin < 8)
    throw ConfigError("horizon leaves no scoring window after delay " +
                      std::to_string(delay_ps) + " ps");
  TimeGrid window{ctx.full.time(i0), ctx.full.dt, nwin};

  PulseSequence both;
  both.events = {{0.0, ctx.p1}, {delay_ps, ctx.p2}};

  SelectivityReport report;
  report.delay_ps = delay_ps;
  report.target_index = ctx.target;
  report.single_species = ctx.setups.size() == 1;

  for (const auto& setup : ctx.setups) {
    AlignmentTrace two = ensemble_alignment(setup.ensemble, both, window);
    if (two.max_leak >= kLeakLimit)
      throw NumericalError("basis too small for '" + setup.name +
                           "' in the control run (leak=" +
                           std::to_string(two.max_leak) + ")",
                           "E_JMAX");
    double acc = 0.0;
    for (double x : two.chi) acc += x * x;
    SpeciesControlMetrics m;
    m.species = setup.name;
    m.rms_chi = std::sqrt(acc / nwin);
    double ref = setup.chi2_prefix[static_cast<size_t>(ctx.full.n)] -
                 setup.chi2_prefix[static_cast<size_t>(i0)];
    m.rms_chi_single = std::sqrt(ref / nwin);
    m.energy_gain = two.energy_after - setup.e_thermal;
    m.energy_gain_single = setup.e_single_after - setup.e_thermal;
    report.metrics.push_back(std::move(m));
  }

  const auto& tgt = report.metrics[static_cast<size_t>(ctx.target)];
  if (report.single_species) {
    double ref = std::max(tgt.rms_chi_single, 1e-300);
    report.selectivity = tgt.rms_chi / ref;
  } else {
    double other = 0.0;
    for (size_t i = 0; i < report.metrics.size(); ++i)
      if (static_cast<int>(i) != ctx.target)
        other = std::max(other, report.metrics[i].rms_chi);
    report.selectivity = tgt.rms_chi / std::max(other, 1e-300);
  }
  return report;
}

double objective_value(const ControlObjective& objective,
                       const SelectivityReport& report) {
  if (objective.kind == ControlObjective::Suppression)
    return -report.metrics[static_cast<size_t>(report.target_index)].energy_gain;
  return report.selectivity;
}
}  // namespace

SelectivityReport two_pulse_response(const std::vector<SignalComponent>& components,
                                     int target_index, double p1, double p2,
                                     double delay_ps, double temperature_k,
                                     double horizon_ps, double dt_ps,
                                     const SimOptions& opt) {
  ControlContext ctx = make_context(components, target_index, p1, p2, temperature_k,
                                    horizon_ps, dt_ps, opt);
  return evaluate_delay(ctx, delay_ps);
}

std::vector<DelayScanPoint> scan_delay(const std::vector<SignalComponent>& components,
                                       int target_index, double p1, double p2,
                                       const TimeGrid& delays, double temperature_k,
                                       double horizon_ps,
                                       const ControlObjective& objective,
                                       double dt_ps, const SimOptions& opt) {
  delays.validate();
  ControlContext ctx = make_context(components, target_index, p1, p2, temperature_k,
                                    horizon_ps, dt_ps, opt);
  std::vector<DelayScanPoint> points;
  points.reserve(static_cast<size_t>(delays.n));
  for (int i = 0; i < delays.n; ++i) {
    DelayScanPoint pt;
    pt.delay_ps = delays.time(i);
    pt.report = evaluate_delay(ctx, pt.delay_ps);
    pt.objective = objective_value(objective, pt.report);
    points.push_back(std::move(pt));
  }
  return points;
}

OptimizeResult optimize_delay(const std::vector<SignalComponent>& components,
                              int target_index, double p1, double p2,
                              double delay_lo_ps, double delay_hi_ps,
                              double temperature_k, double horizon_ps,
                              const ControlObjective& objective, double dt_ps,
                              const SimOptions& opt) {
  if (!(delay_lo_ps > 0.0) || !(delay_hi_ps > delay_lo_ps))
    throw ConfigError("need 0 < delay_lo < delay_hi");
  ControlContext ctx = make_context(components, target_index, p1, p2, temperature_k,
                                    horizon_ps, dt_ps, opt);

  double step = ctx.min_revival / 40.0;
  int npts = static_cast<int>(std::floor((delay_hi_ps - delay_lo_ps) / step)) + 1;
  if (npts < 9) {
    npts = 9;
    step = (delay_hi_ps - delay_lo_ps) / (npts - 1);
  }

  std::vector<double> ds(static_cast<size_t>(npts)), fs(static_cast<size_t>(npts));
  for (int i = 0; i < npts; ++i) {
    ds[static_cast<size_t>(i)] = delay_lo_ps + i * step;
    fs[static_cast<size_t>(i)] =
        objective_value(objective, evaluate_delay(ctx, ds[static_cast<size_t>(i)]));
  }

  auto [mn, mx] = std::minmax_element(fs.begin(), fs.end());
  if (*mx - *mn <= 1e-6 * std::max(std::abs(*mx), 1.0))
    throw AnalysisError("objective is flat over the delay bracket", "E_NO_OPTIMUM");
  int best = static_cast<int>(mx - fs.begin());
  if (best == 0 || best == npts - 1)
    throw AnalysisError("objective peaks at the edge of the delay bracket; widen it",
                        "E_NO_OPTIMUM");

  // Golden-section refinement inside the coarse bracket around the winner.
  double a = ds[static_cast<size_t>(best) - 1];
  double b = ds[static_cast<size_t>(best) + 1];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = objective_value(objective, evaluate_delay(ctx, c));
  double fd = objective_value(objective, evaluate_delay(ctx, d));
  while (b - a > kDelayTol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = objective_value(objective, evaluate_delay(ctx, c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = objective_value(objective, evaluate_delay(ctx, d));
    }
  }

  OptimizeResult res;
  res.delay_ps = 0.5 * (a + b);
  res.report = evaluate_delay(ctx, res.delay_ps);
  res.objective = objective_value(objective, res.report);
  return res;
}

}  // namespace rotkick
