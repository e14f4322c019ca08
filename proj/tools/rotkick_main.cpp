#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rotkick/analysis.hpp"
#include "rotkick/config.hpp"
#include "rotkick/constants.hpp"
#include "rotkick/control.hpp"
#include "rotkick/errors.hpp"
#include "rotkick/parallel.hpp"
#include "rotkick/signal.hpp"
#include "rotkick/trace_io.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  int jmax_flag = 0;  // 0 -> not given
  std::optional<int> jmax;
  int threads = 0;
  bool quiet = false;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void apply_common(CommonOpts& opts) {
  if (opts.threads > 0) rotkick::set_max_threads(opts.threads);
  if (opts.jmax_flag > 0) opts.jmax = opts.jmax_flag;
}

rotkick::RunConfig load_config(const CommonOpts& opts) {
  if (opts.config_path.empty())
    throw rotkick::ConfigError("this command needs --config");
  rotkick::RunConfig cfg = rotkick::load_run_config(opts.config_path);
  if (opts.jmax) cfg.jmax = opts.jmax;
  if (!opts.quiet) {
    for (const auto& c : cfg.components)
      for (const auto& w : rotkick::validate_spec(c.spec))
        std::cerr << "warning: " << w << "\n";
  }
  return cfg;
}

// Writes through a sink so "--out -" (or no --out) means stdout.
void with_output(const CommonOpts& opts, const std::function<void(std::ostream&)>& fn) {
  if (opts.out_path.empty() || opts.out_path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(opts.out_path);
  if (!out)
    throw rotkick::ConfigError("cannot write output '" + opts.out_path + "'");
  fn(out);
  if (!out.good())
    throw rotkick::ConfigError("failed while writing '" + opts.out_path + "'");
}

int run_simulate(const CommonOpts& opts) {
  rotkick::RunConfig cfg = load_config(opts);
  rotkick::SignalTrace trace = rotkick::mixture_fwm_signal(
      cfg.components, cfg.pulses, cfg.temperature_k, cfg.grid(), cfg.decay_tau_ps,
      cfg.sim_options());
  with_output(opts, [&](std::ostream& out) {
    rotkick::write_signal_trace(out, trace, cfg.echo());
  });
  return 0;
}

int run_interfere(const CommonOpts& opts) {
  rotkick::RunConfig cfg = load_config(opts);
  if (cfg.components.size() != 2)
    throw rotkick::ConfigError("interfere needs exactly two species");
  auto events = rotkick::predict_interference_times(
      cfg.components[0].spec, cfg.components[1].spec, cfg.default_horizon_ps(),
      cfg.interfere_tol_ps);
  with_output(opts, [&](std::ostream& out) {
    rotkick::write_interference_table(out, events, cfg.echo());
  });
  return 0;
}

int run_scan(const CommonOpts& opts) {
  rotkick::RunConfig cfg = load_config(opts);
  if (!cfg.scan_from_ps || !cfg.scan_to_ps)
    throw rotkick::ConfigError("scan needs scan_from_ps and scan_to_ps");
  double step = cfg.scan_step_ps > 0.0 ? cfg.scan_step_ps : cfg.min_revival_ps() / 40.0;
  rotkick::TimeGrid delays =
      rotkick::TimeGrid::span(*cfg.scan_from_ps, *cfg.scan_to_ps, step);
  auto points = rotkick::scan_delay(cfg.components, cfg.target_index(), cfg.p1,
                                    cfg.p2, delays, cfg.temperature_k,
                                    cfg.default_horizon_ps(), cfg.objective,
                                    cfg.dt_ps, cfg.sim_options());
  std::vector<std::string> names;
  for (const auto& c : cfg.components) names.push_back(c.spec.name);
  with_output(opts, [&](std::ostream& out) {
    rotkick::write_scan_table(out, points, names, cfg.echo());
  });
  return 0;
}

int run_optimize(const CommonOpts& opts) {
  rotkick::RunConfig cfg = load_config(opts);
  if (!cfg.scan_from_ps || !cfg.scan_to_ps)
    throw rotkick::ConfigError(
        "optimize needs scan_from_ps and scan_to_ps as the delay bracket");
  rotkick::OptimizeResult res = rotkick::optimize_delay(
      cfg.components, cfg.target_index(), cfg.p1, cfg.p2, *cfg.scan_from_ps,
      *cfg.scan_to_ps, cfg.temperature_k, cfg.default_horizon_ps(), cfg.objective,
      cfg.dt_ps, cfg.sim_options());
  with_output(opts, [&](std::ostream& out) {
    out << "delay_ps " << fmt17(res.delay_ps) << "\n";
    out << "objective " << fmt17(res.objective) << "\n";
    out << "selectivity " << fmt17(res.report.selectivity) << "\n";
    for (const auto& m : res.report.metrics) {
      out << "species " << m.species << " rms " << fmt17(m.rms_chi) << " rms_single "
          << fmt17(m.rms_chi_single) << " dE " << fmt17(m.energy_gain)
          << " dE_single " << fmt17(m.energy_gain_single) << "\n";
    }
  });
  return 0;
}

int run_analyze(const CommonOpts& opts, const std::string& in_path) {
  rotkick::RunConfig cfg;  // optional: revival_index / library come from it
  bool have_cfg = !opts.config_path.empty();
  if (have_cfg) cfg = rotkick::load_run_config(opts.config_path);

  rotkick::SignalTrace trace = rotkick::read_signal_trace_file(in_path);
  const rotkick::MoleculeLibrary* lib = &rotkick::builtin_molecule_library();
  rotkick::MoleculeLibrary loaded;
  if (have_cfg && !cfg.library_path.empty()) {
    loaded = rotkick::load_molecule_library(cfg.library_path);
    lib = &loaded;
  }

  std::vector<rotkick::IsotopologueSpec> specs;
  for (const auto& name : trace.species) specs.push_back(lib->find(name));

  std::ostringstream report;
  for (size_t i = 0; i < specs.size(); ++i) {
    rotkick::PeriodEstimate est =
        rotkick::estimate_revival_period(trace, static_cast<int>(i));
    report << "species " << specs[i].name << "\n";
    report << "  period_ps " << fmt17(est.period_ps) << "\n";
    report << "  period_rel_uncertainty " << fmt17(est.rel_uncertainty) << "\n";
    report << "  contrast " << fmt17(est.contrast) << "\n";
    report << "  comb_peaks " << est.comb_peaks << "\n";
    if (specs.size() == 1) {
      int revivals = rotkick::count_revival_features(trace.signal, trace.grid,
                                                     est.period_ps, 0.0);
      report << "  revivals " << revivals << "\n";
    }
  }
  if (specs.size() >= 2) {
    double idx = have_cfg ? cfg.revival_index : 2.0;
    auto peaks = rotkick::resolve_isotopologue_peaks(trace, specs, idx);
    // The squared signal keeps a permanent-alignment pedestal between
    // revivals; subtract it in field units before inverting peak heights,
    // or the smallest fraction comes out badly inflated.
    std::vector<double> floor_probe = trace.signal;
    size_t q25 = floor_probe.size() / 4;
    std::nth_element(floor_probe.begin(), floor_probe.begin() + q25,
                     floor_probe.end());
    double quiet = std::sqrt(floor_probe[q25]);
    report << "quiet_floor " << fmt17(floor_probe[q25]) << "\n";
    std::vector<double> amps;
    for (const auto& p : peaks) {
      report << "peak " << p.species << " t_ps " << fmt17(p.t_ps) << " amplitude "
             << fmt17(p.amplitude) << "\n";
      double corrected = std::max(0.0, std::sqrt(p.amplitude) - quiet);
      amps.push_back(corrected * corrected);
    }
    rotkick::AbundanceEstimate ab = rotkick::estimate_abundances(amps);
    for (size_t i = 0; i < peaks.size(); ++i)
      report << "abundance " << peaks[i].species << " "
             << fmt17(ab.fractions[i]) << "\n";
  }
  with_output(opts, [&](std::ostream& out) { out << report.str(); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"impulsive rotational alignment of thermal linear molecules: "
               "simulation, interference prediction, and two-pulse control"};
  app.set_version_flag("--version", std::string("rotkick ") + rotkick::kVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string in_path;
  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", opts.config_path, "run configuration file");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_path, "output file ('-' for stdout)");
    cmd->add_option("--jmax", opts.jmax_flag, "pin the basis truncation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", opts.threads, "worker thread cap");
    cmd->add_flag("--quiet", opts.quiet, "suppress warnings");
  };

  auto* sim = app.add_subcommand("simulate", "simulate a mixture signal trace");
  add_common(sim, true);
  auto* inter = app.add_subcommand("interfere",
                                   "predict revival coincidences of two species");
  add_common(inter, true);
  auto* scan = app.add_subcommand("scan", "tabulate two-pulse response vs delay");
  add_common(scan, true);
  auto* optm = app.add_subcommand("optimize", "optimize the two-pulse delay");
  add_common(optm, true);
  auto* ana = app.add_subcommand("analyze", "recover periods/abundances from a trace");
  add_common(ana, false);
  ana->add_option("--in", in_path, "trace file to analyze")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    apply_common(opts);
    if (sim->parsed()) return run_simulate(opts);
    if (inter->parsed()) return run_interfere(opts);
    if (scan->parsed()) return run_scan(opts);
    if (optm->parsed()) return run_optimize(opts);
    if (ana->parsed()) return run_analyze(opts, in_path);
    throw rotkick::ConfigError("no subcommand given");
  } catch (const rotkick::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
