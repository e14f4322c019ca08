#include "rotkick/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rotkick/errors.hpp"
#include "rotkick/parallel.hpp"
#include "rotkick/rotor.hpp"

namespace rotkick {

namespace {
// Internal thresholds of the comb estimator.
constexpr double kMinContrast = 0.1;    // weakest acceptable comb peak
constexpr double kHarmonicGuard = 0.85; // catch argmax landing on tooth 2
constexpr double kToothFloor = 0.05;    // a tooth below this ends the comb

// Feature-counting thresholds.
constexpr double kFeatureContrast = 5.0;  // peak over the window's quiet floor
constexpr double kFeatureAbsFloor = 1e-8; // relative to the global maximum

// Peak-resolution internals: the signal is squared, so every zero crossing
// of the underlying response notches it; a moving-max envelope with a fixed
// bridge width hides those notches while keeping genuine gaps between
// species features visible.
constexpr double kResolveBridgePs = 0.35;
constexpr double kResolveValleyRatio = 0.5;

double parabolic_offset(double y1, double y2, double y3) {
  double den = y1 - 2.0 * y2 + y3;
  if (den >= 0.0) return 0.0;  // not a proper maximum
  double d = 0.5 * (y1 - y3) / den;
  return std::clamp(d, -0.5, 0.5);
}
}  // namespace

PeriodEstimate estimate_revival_period(std::span<const double> values,
                                       const TimeGrid& grid, bool halved_ok) {
  grid.validate();
  const int n = static_cast<int>(values.size());
  if (n != grid.n) throw ConfigError("trace length does not match its grid");
  if (n < 32)
    throw AnalysisError("record too short for period analysis", "E_NO_COMB");

  std::vector<double> x(values.begin(), values.end());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double& v : x) {
    v -= mean;
    var += v * v;
  }
  if (!(var > 0.0) || !std::isfinite(var))
    throw AnalysisError("trace carries no oscillation", "E_NO_COMB");

  // Biased normalized autocorrelation up to half the record.  Each lag is
  // independent, so dynamic scheduling cannot change the result.
  const int nlag = n / 2;
  std::vector<double> r(static_cast<size_t>(nlag));
  const double* xd = x.data();
  parallel_for(nlag, [&](int lag) {
    double acc = 0.0;
    const int m = n - lag;
    for (int i = 0; i < m; ++i) acc += xd[i] * xd[i + lag];
    r[static_cast<size_t>(lag)] = acc / var;
  });

  int lag0 = -1;
  for (int lag = 1; lag < nlag; ++lag) {
    if (r[static_cast<size_t>(lag)] <= 0.0) {
      lag0 = lag;
      break;
    }
  }
  if (lag0 < 0)
    throw AnalysisError("autocorrelation never decorrelates; no revival comb",
                        "E_NO_COMB");

  int peak = -1;
  double contrast = 0.0;
  for (int lag = lag0; lag < nlag; ++lag) {
    if (r[static_cast<size_t>(lag)] > contrast) {
      contrast = r[static_cast<size_t>(lag)];
      peak = lag;
    }
  }
  if (peak < 0 || contrast < kMinContrast)
    throw AnalysisError("no revival comb above contrast " +
                            std::to_string(kMinContrast),
                        "E_NO_COMB");

  // If the strongest tooth is actually the second one, a near-equal tooth
  // sits at half its lag.
  {
    int half = peak / 2;
    int w = std::max(2, peak / 6);
    int best = -1;
    double besty = 0.0;
    for (int lag = std::max(lag0, half - w); lag <= half + w && lag < nlag; ++lag) {
      if (r[static_cast<size_t>(lag)] > besty) {
        besty = r[static_cast<size_t>(lag)];
        best = lag;
      }
    }
    if (best > 0 && besty >= kHarmonicGuard * contrast) peak = best;
  }

  // Least-squares comb fit: tooth k sits near k*spacing.  The fit carries an
  // intercept because the biased autocorrelation shifts every tooth apex by
  // a common sub-sample offset (window and envelope slopes); an intercept
  // absorbs that shift instead of leaking it into the spacing.
  double spacing = peak;
  std::vector<double> tooth_k, tooth_lag, tooth_w;
  for (int k = 1;; ++k) {
    double center = spacing * k;
    int c = static_cast<int>(std::lround(center));
    int w = std::max(2, static_cast<int>(std::lround(spacing / 3.0)));
    // A window clipped by the lag range can catch the shoulder of an
    // out-of-range tooth, so only fully covered windows may contribute.
    if (c + w >= nlag) break;
    int lo = std::max(1, c - w);
    int best = -1;
    double besty = -std::numeric_limits<double>::infinity();
    for (int lag = lo; lag <= c + w; ++lag) {
      if (r[static_cast<size_t>(lag)] > besty) {
        besty = r[static_cast<size_t>(lag)];
        best = lag;
      }
    }
    if (best <= 0 || besty < kToothFloor) break;
    if (best == lo || best == c + w) break;  // boundary max: not a real tooth
    double frac = best;
    if (best > 0 && best + 1 < nlag)
      frac += parabolic_offset(r[static_cast<size_t>(best) - 1],
                               r[static_cast<size_t>(best)],
                               r[static_cast<size_t>(best) + 1]);
    tooth_k.push_back(k);
    tooth_lag.push_back(frac);
    tooth_w.push_back(std::max(besty, 0.0));
    spacing = frac / k;  // track comb drift for the next window
  }
  if (tooth_k.empty())
    throw AnalysisError("revival comb fit found no usable teeth", "E_NO_COMB");

  const int nk = static_cast<int>(tooth_k.size());
  double sw = 0.0, swk = 0.0, swl = 0.0, swkk = 0.0, swkl = 0.0;
  for (int i = 0; i < nk; ++i) {
    double w = tooth_w[static_cast<size_t>(i)];
    double k = tooth_k[static_cast<size_t>(i)];
    double l = tooth_lag[static_cast<size_t>(i)];
    sw += w;
    swk += w * k;
    swl += w * l;
    swkk += w * k * k;
    swkl += w * k * l;
  }
  double det = sw * swkk - swk * swk;
  double slope, sigma_slope;
  if (nk >= 2 && det > 0.0) {
    slope = (sw * swkl - swk * swl) / det;  // comb spacing in lag units
    double icept = (swl - slope * swk) / sw;
    double resid2 = 0.0;
    for (int i = 0; i < nk; ++i) {
      double e = tooth_lag[static_cast<size_t>(i)] - icept -
                 slope * tooth_k[static_cast<size_t>(i)];
      resid2 += tooth_w[static_cast<size_t>(i)] * e * e;
    }
    int dof = std::max(nk - 2, 1);
    sigma_slope = std::sqrt(std::max(resid2, 0.0) * sw / (det * dof));
  } else {
    slope = tooth_lag.front() / tooth_k.front();
    sigma_slope = 0.0;
  }
  if (!(slope > 0.0))
    throw AnalysisError("revival comb fit collapsed", "E_NO_COMB");
  double kmax = tooth_k.back();
  double sigma_lags = sigma_slope + 0.5 / kmax;  // quantization floor

  PeriodEstimate est;
  est.period_ps = slope * grid.dt;
  est.contrast = contrast;
  est.comb_peaks = nk;
  if (halved_ok) est.period_ps *= 2.0;  // squared two-parity response
  est.rel_uncertainty = sigma_lags * grid.dt / est.period_ps;
  return est;
}

PeriodEstimate estimate_revival_period(const SignalTrace& trace, int species_index) {
  if (species_index >= 0) {
    if (species_index >= static_cast<int>(trace.chi.size()))
      throw ConfigError("no such species column in trace");
    return estimate_revival_period(trace.chi[static_cast<size_t>(species_index)],
                                   trace.grid, false);
  }
  return estimate_revival_period(trace.signal, trace.grid, true);
}

int count_revival_features(std::span<const double> values, const TimeGrid& grid,
                           double period_ps, double t_from_ps) {
  grid.validate();
  if (static_cast<int>(values.size()) != grid.n)
    throw ConfigError("trace length does not match its grid");
  if (!(period_ps > 0.0)) throw ConfigError("period must be positive");

  double global_max = 0.0;
  for (double v : values) global_max = std::max(global_max, v);
  if (global_max <= 0.0) return 0;

  int count = 0;
  std::vector<double> window;
  for (int k = 1;; ++k) {
    double lo = t_from_ps + (k - 0.5) * period_ps;
    double hi = t_from_ps + (k + 0.5) * period_ps;
    int ilo = static_cast<int>(std::ceil((lo - grid.t0) / grid.dt));
    int ihi = static_cast<int>(std::floor((hi - grid.t0) / grid.dt));
    if (ilo < 0 || ihi >= grid.n) break;  // only full windows count
    window.assign(values.begin() + ilo, values.begin() + ihi + 1);
    double peak = *std::max_element(window.begin(), window.end());
    size_t q = window.size() / 4;
    std::nth_element(window.begin(), window.begin() + q, window.end());
    double quiet = window[q];
    bool present = peak >= kFeatureAbsFloor * global_max &&
                   peak >= kFeatureContrast * std::max(quiet, 0.0);
    if (!present) break;
    ++count;
  }
  return count;
}

const char* to_string(InterferenceKind kind) {
  switch (kind) {
    case InterferenceKind::Constructive: return "constructive";
    case InterferenceKind::Destructive: return "destructive";
    default: return "fractional";
  }
}

std::vector<InterferenceEvent> predict_interference_times(
    const IsotopologueSpec& a, const IsotopologueSpec& b, double horizon_ps,
    double tol_ps) {
  validate_spec(a);
  validate_spec(b);
  if (!(horizon_ps > 0.0)) throw ConfigError("horizon must be positive");
  double ta = revival_time_ps(a);
  double tb = revival_time_ps(b);
  if (!(tol_ps > 0.0) || tol_ps > 0.125 * std::min(ta, tb))
    throw ConfigError("coincidence tolerance must lie in (0, min(T_rev)/8]");

  std::vector<InterferenceEvent> events;
  for (int k = 1; k * ta / 4.0 <= horizon_ps + tol_ps; ++k) {
    double t_a = k * ta / 4.0;
    long long m = std::llround(4.0 * t_a / tb);
    if (m < 1) continue;
    double t_b = static_cast<double>(m) * tb / 4.0;
    if (std::abs(t_a - t_b) >= tol_ps) continue;
    double t = 0.5 * (t_a + t_b);
    if (t > horizon_ps) continue;
    int ka = k % 4;
    int kb = static_cast<int>(m % 4);
    InterferenceKind kind;
    if (ka % 2 != 0 || kb % 2 != 0)
      kind = InterferenceKind::Fractional;
    else if (ka == kb)  // integer+integer or half+half epochs add up
      kind = InterferenceKind::Constructive;
    else
      kind = InterferenceKind::Destructive;
    events.push_back({t, kind, k / 4.0, static_cast<double>(m) / 4.0});
  }
  return events;
}

std::vector<ResolvedPeak> resolve_isotopologue_peaks(
    const SignalTrace& trace, std::span<const IsotopologueSpec> species,
    double revival_index) {
  trace.grid.validate();
  if (species.empty()) throw ConfigError("no species to resolve");
  if (!(revival_index > 0.0)) throw ConfigError("revival index must be positive");
  const auto& s = trace.signal;
  if (static_cast<int>(s.size()) != trace.grid.n)
    throw ConfigError("trace length does not match its grid");

  struct Exp {
    size_t input_index;
    double t_expect;
  };
  std::vector<Exp> order(species.size());
  for (size_t i = 0; i < species.size(); ++i)
    order[i] = {i, revival_index * revival_time_ps(species[i])};
  std::sort(order.begin(), order.end(),
            [](const Exp& l, const Exp& r) { return l.t_expect < r.t_expect; });

  // Search half-width per species: just under half the gap to the nearest
  // expected neighbour, so windows never overlap.
  std::vector<double> half(species.size());
  for (size_t i = 0; i < order.size(); ++i) {
    double gap = std::numeric_limits<double>::infinity();
    if (i > 0) gap = std::min(gap, order[i].t_expect - order[i - 1].t_expect);
    if (i + 1 < order.size()) gap = std::min(gap, order[i + 1].t_expect - order[i].t_expect);
    if (!std::isfinite(gap)) gap = 0.4 * revival_time_ps(species[order[i].input_index]);
    half[i] = 0.45 * gap;
  }

  auto index_of = [&](double t) {
    return static_cast<int>(std::lround((t - trace.grid.t0) / trace.grid.dt));
  };

  std::vector<ResolvedPeak> peaks(species.size());
  std::vector<int> peak_idx(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    int lo = index_of(order[i].t_expect - half[i]);
    int hi = index_of(order[i].t_expect + half[i]);
    if (lo < 0 || hi >= trace.grid.n || lo >= hi)
      throw ConfigError("trace does not cover the requested revival window of '" +
                        species[order[i].input_index].name + "'");
    int best = lo;
    for (int j = lo; j <= hi; ++j)
      if (s[static_cast<size_t>(j)] > s[static_cast<size_t>(best)]) best = j;
    peak_idx[i] = best;
    double t = trace.grid.time(best);
    if (best > 0 && best + 1 < trace.grid.n)
      t += parabolic_offset(s[static_cast<size_t>(best) - 1],
                            s[static_cast<size_t>(best)],
                            s[static_cast<size_t>(best) + 1]) *
           trace.grid.dt;
    peaks[order[i].input_index] = {species[order[i].input_index].name, t,
                                   s[static_cast<size_t>(best)]};
  }

  if (order.size() >= 2) {
    // Moving-max envelope bridges the zero-crossing notches inside one
    // species' revival feature; a resolved pair keeps a deep envelope
    // valley between the two features.
    int bridge = std::max(1, static_cast<int>(std::lround(kResolveBridgePs /
                                                          trace.grid.dt)));
    int lo = std::max(0, peak_idx.front() - bridge);
    int hi = std::min(trace.grid.n - 1, peak_idx.back() + bridge);
    std::vector<double> env(static_cast<size_t>(hi - lo + 1));
    for (int j = lo; j <= hi; ++j) {
      int wlo = std::max(lo, j - bridge);
      int whi = std::min(hi, j + bridge);
      double m = 0.0;
      for (int q = wlo; q <= whi; ++q) m = std::max(m, s[static_cast<size_t>(q)]);
      env[static_cast<size_t>(j - lo)] = m;
    }
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      double pa = env[static_cast<size_t>(peak_idx[i] - lo)];
      double pb = env[static_cast<size_t>(peak_idx[i + 1] - lo)];
      double valley = std::numeric_limits<double>::infinity();
      for (int j = peak_idx[i]; j <= peak_idx[i + 1]; ++j)
        valley = std::min(valley, env[static_cast<size_t>(j - lo)]);
      if (!(valley <= kResolveValleyRatio * std::min(pa, pb)))
        throw AnalysisError(
            "revival features of '" + peaks[order[i].input_index].species +
                "' and '" + peaks[order[i + 1].input_index].species +
                "' are not resolved at revival index " +
                std::to_string(revival_index),
            "E_UNRESOLVED");
    }
  }
  return peaks;
}

AbundanceEstimate estimate_abundances(std::span<const double> peak_amplitudes) {
  if (peak_amplitudes.empty()) throw ConfigError("no peak amplitudes given");
  AbundanceEstimate est;
  double sum = 0.0;
  for (double a : peak_amplitudes) {
    double f = a > 0.0 ? std::sqrt(a) : 0.0;
    est.fractions.push_back(f);
    sum += f;
  }
  if (!(sum > 0.0))
    throw AnalysisError("all peak amplitudes vanish; cannot infer abundances",
                        "E_UNRESOLVED");
  for (double& f : est.fractions) f /= sum;
  return est;
}

}  // namespace rotkick
