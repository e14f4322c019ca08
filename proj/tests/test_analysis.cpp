#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rotkick/analysis.hpp"
#include "rotkick/errors.hpp"
#include "rotkick/molecule.hpp"
#include "rotkick/rotor.hpp"

using namespace rotkick;

namespace {

// Rotational-style comb: only odd harmonics of 1/T appear (ladder spacings
// go as 2J+3), so the oscillation flips sign after half a period.
std::vector<double> odd_harmonic_comb(const TimeGrid& grid, double period,
                                      double tau, double offset) {
  std::vector<double> x(static_cast<size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.time(i);
    double osc = 0.0;
    for (int h : {3, 5, 7, 9, 11, 13})
      osc += std::exp(-0.25 * h) *
             std::cos(2.0 * std::numbers::pi * h * t / period);
    x[static_cast<size_t>(i)] = offset + 0.05 * osc * std::exp(-t / tau);
  }
  return x;
}

}  // namespace

TEST_CASE("period recovery from a generic decaying comb") {
  const double period = 7.37;
  TimeGrid grid{0.0, 0.01, 12000};
  std::vector<double> x(static_cast<size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.time(i);
    double v = 0.0;
    for (int h = 1; h <= 6; ++h)
      v += (0.05 / h) * std::cos(2.0 * std::numbers::pi * h * t / period);
    x[static_cast<size_t>(i)] = 0.04 + v * std::exp(-t / 80.0);
  }

  PeriodEstimate est = estimate_revival_period(x, grid);
  CHECK(std::abs(est.period_ps - period) / period < 5e-4);
  CHECK(est.contrast > 0.3);
  CHECK(est.comb_peaks >= 6);
  CHECK(est.rel_uncertainty > 0.0);
  CHECK(est.rel_uncertainty < 5e-3);

  SUBCASE("a constant offset cannot move the estimate") {
    std::vector<double> shifted = x;
    for (double& v : shifted) v += 0.3;
    PeriodEstimate est2 = estimate_revival_period(shifted, grid);
    CHECK(est2.period_ps == doctest::Approx(est.period_ps).epsilon(1e-9));
  }
}

TEST_CASE("signed rotational combs resolve the full period") {
  const double period = 8.383;
  TimeGrid grid{0.0, 0.01, 14000};
  std::vector<double> chi = odd_harmonic_comb(grid, period, 90.0, 0.05);

  // chi(t + T/2) = -chi(t) + const: the anti-teeth at half-integer multiples
  // keep the estimator off the T/2 subharmonic even without halved_ok.
  PeriodEstimate est = estimate_revival_period(chi, grid, false);
  CHECK(std::abs(est.period_ps - period) / period < 5e-4);

  SUBCASE("squared response needs the subharmonic correction") {
    std::vector<double> sq(chi.size());
    for (size_t i = 0; i < chi.size(); ++i) {
      double osc = chi[i] - 0.05;  // drop the constant offset, keep the comb
      sq[i] = osc * osc;           // exactly T/2-periodic up to the decay envelope
    }
    PeriodEstimate raw = estimate_revival_period(sq, grid, false);
    CHECK(std::abs(raw.period_ps - 0.5 * period) / period < 5e-4);
    PeriodEstimate fixed = estimate_revival_period(sq, grid, true);
    CHECK(std::abs(fixed.period_ps - period) / period < 1e-3);
  }
}

TEST_CASE("traces without a comb are rejected") {
  TimeGrid grid{0.0, 0.01, 4000};

  SUBCASE("constant trace") {
    std::vector<double> flat(static_cast<size_t>(grid.n), 0.7);
    CHECK_THROWS_AS(estimate_revival_period(flat, grid), AnalysisError);
  }

  SUBCASE("pure drift") {
    std::vector<double> ramp(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) ramp[static_cast<size_t>(i)] = 1e-3 * i;
    CHECK_THROWS_AS(estimate_revival_period(ramp, grid), AnalysisError);
  }

  SUBCASE("white noise") {
    std::mt19937 rng(987654321u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> noise(static_cast<size_t>(grid.n));
    for (double& v : noise) v = u(rng);
    try {
      estimate_revival_period(noise, grid);
      FAIL("noise must not yield a period");
    } catch (const AnalysisError& e) {
      CHECK(e.code() == "E_NO_COMB");
      CHECK(e.exit_code() == 4);
    }
  }

  SUBCASE("record too short") {
    std::vector<double> tiny(16, 0.0);
    TimeGrid small{0.0, 0.01, 16};
    CHECK_THROWS_AS(estimate_revival_period(tiny, small), AnalysisError);
  }
}

TEST_CASE("trace overload picks the requested column") {
  TimeGrid grid{0.0, 0.005, 20000};
  SignalTrace trace;
  trace.grid = grid;
  trace.species = {"A", "B"};
  trace.fractions = {0.5, 0.5};
  trace.chi.push_back(odd_harmonic_comb(grid, 5.0, 70.0, 0.02));
  trace.chi.push_back(odd_harmonic_comb(grid, 6.5, 70.0, 0.02));
  trace.signal.resize(static_cast<size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    double osc = trace.chi[0][static_cast<size_t>(i)] - 0.02;
    trace.signal[static_cast<size_t>(i)] = osc * osc;
  }

  CHECK(estimate_revival_period(trace, 0).period_ps ==
        doctest::Approx(5.0).epsilon(1e-3));
  CHECK(estimate_revival_period(trace, 1).period_ps ==
        doctest::Approx(6.5).epsilon(1e-3));
  // squared column: subharmonic correction engaged automatically
  CHECK(estimate_revival_period(trace, -1).period_ps ==
        doctest::Approx(5.0).epsilon(2e-3));
  CHECK_THROWS_AS(estimate_revival_period(trace, 2), ConfigError);
}

TEST_CASE("revival feature counting") {
  const double period = 5.0;
  TimeGrid grid{0.0, 0.01, 11000};  // 0..110 ps, 21 full windows

  auto lobes = [&](int alive_max, double floor_scale) {
    std::vector<double> x(static_cast<size_t>(grid.n), 0.0);
    for (int k = 1; k <= 21; ++k) {
      double amp = k <= alive_max ? std::exp(-k / 8.0) : floor_scale;
      double c = k * period;
      for (int i = 0; i < grid.n; ++i) {
        double t = grid.time(i);
        if (std::abs(t - c) > 1.5) continue;
        x[static_cast<size_t>(i)] += amp * std::exp(-0.5 * std::pow((t - c) / 0.25, 2));
      }
    }
    return x;
  };

  SUBCASE("counts every populated full window") {
    std::vector<double> x = lobes(21, 0.0);
    CHECK(count_revival_features(x, grid, period) == 21);
  }

  SUBCASE("stops at the first dead window") {
    std::vector<double> x = lobes(12, 0.0);
    CHECK(count_revival_features(x, grid, period) == 12);
  }

  SUBCASE("the absolute floor silences numerically dead lobes") {
    std::vector<double> x = lobes(9, 1e-12);
    CHECK(count_revival_features(x, grid, period) == 9);
  }

  SUBCASE("a slow drift has no revival features") {
    // within each window the quiet floor sits right under the peak
    std::vector<double> x(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
      x[static_cast<size_t>(i)] =
          0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * grid.time(i) / 50.0);
    CHECK(count_revival_features(x, grid, period) == 0);
  }

  SUBCASE("input validation") {
    std::vector<double> x = lobes(21, 0.0);
    CHECK_THROWS_AS(count_revival_features(x, grid, 0.0), ConfigError);
    CHECK_THROWS_AS(count_revival_features(x, TimeGrid{0.0, 0.01, 64}, period),
                    ConfigError);
  }
}

TEST_CASE("quarter-revival coincidences of the nitrogen pair") {
  const MoleculeLibrary& lib = builtin_molecule_library();
  IsotopologueSpec a = lib.find("N2-14");
  IsotopologueSpec b = lib.find("N2-15");
  const double ta = revival_time_ps(a);
  const double tb = revival_time_ps(b);

  std::vector<InterferenceEvent> events = predict_interference_times(a, b, 130.0);
  REQUIRE(events.size() == 4);

  // quarter-epoch indices 15/14, 30/28, 45/42, 60/56
  const int ka[] = {15, 30, 45, 60};
  const int kb[] = {14, 28, 42, 56};
  const InterferenceKind kinds[] = {
      InterferenceKind::Fractional, InterferenceKind::Destructive,
      InterferenceKind::Fractional, InterferenceKind::Constructive};
  for (int i = 0; i < 4; ++i) {
    const InterferenceEvent& e = events[static_cast<size_t>(i)];
    double expected = 0.5 * (ka[i] * ta / 4.0 + kb[i] * tb / 4.0);
    CHECK(e.t_ps == doctest::Approx(expected).epsilon(1e-12));
    CHECK(e.kind == kinds[i]);
    CHECK(e.multiple_a == doctest::Approx(ka[i] / 4.0));
    CHECK(e.multiple_b == doctest::Approx(kb[i] / 4.0));
  }

  // The rotational constants are nearly commensurate (B_b ~ 14/15 B_a, up
  // to the rounding of the stored constants), so the destructive event sits
  // at 7.5 T_a = 7 T_b within a microsecond-scale residual.
  CHECK(std::abs(events[1].t_ps - 7.5 * ta) < 1e-5);
  CHECK(std::abs(events[3].t_ps - 15.0 * ta) < 1e-5);
  CHECK(std::abs(7.5 * ta - 7.0 * tb) < 1e-5);

  SUBCASE("tolerance must stay below an eighth of a period") {
    CHECK_THROWS_AS(predict_interference_times(a, b, 130.0, 1.2), ConfigError);
    CHECK_THROWS_AS(predict_interference_times(a, b, 130.0, 0.0), ConfigError);
    CHECK_THROWS_AS(predict_interference_times(a, b, -5.0), ConfigError);
  }

  SUBCASE("string names") {
    CHECK(std::string(to_string(InterferenceKind::Constructive)) == "constructive");
    CHECK(std::string(to_string(InterferenceKind::Destructive)) == "destructive");
    CHECK(std::string(to_string(InterferenceKind::Fractional)) == "fractional");
  }
}

namespace {
// Synthetic chlorine-like trace: one Gaussian revival lobe per species at
// revival_index * T_rev(s), heights = squared mixing fractions.
SignalTrace gaussian_peaks_trace(std::span<const IsotopologueSpec> species,
                                 std::span<const double> fractions, double index,
                                 double sigma_ps) {
  SignalTrace tr;
  tr.grid = TimeGrid{128.0, 0.01, 2200};  // 128..150 ps
  tr.norm = 1.0;
  tr.signal.assign(static_cast<size_t>(tr.grid.n), 0.0);
  for (size_t s = 0; s < species.size(); ++s) {
    tr.species.push_back(species[s].name);
    tr.fractions.push_back(fractions[s]);
    double c = index * revival_time_ps(species[s]);
    double amp = fractions[s] * fractions[s];
    for (int i = 0; i < tr.grid.n; ++i) {
      double t = tr.grid.time(i);
      tr.signal[static_cast<size_t>(i)] +=
          amp * std::exp(-0.5 * std::pow((t - c) / sigma_ps, 2));
    }
  }
  return tr;
}
}  // namespace

TEST_CASE("isotopologue peak resolution and abundances") {
  const MoleculeLibrary& lib = builtin_molecule_library();
  std::vector<IsotopologueSpec> trio = {
      lib.find("Cl2-35-35"), lib.find("Cl2-35-37"), lib.find("Cl2-37-37")};
  std::vector<double> fr = {trio[0].abundance, trio[1].abundance,
                            trio[2].abundance};

  SUBCASE("well separated lobes resolve and invert to fractions") {
    SignalTrace tr = gaussian_peaks_trace(trio, fr, 2.0, 0.45);
    std::vector<ResolvedPeak> peaks = resolve_isotopologue_peaks(tr, trio, 2.0);
    REQUIRE(peaks.size() == 3);
    std::vector<double> amps;
    for (size_t s = 0; s < 3; ++s) {
      CHECK(peaks[s].species == trio[s].name);
      CHECK(std::abs(peaks[s].t_ps - 2.0 * revival_time_ps(trio[s])) < 0.02);
      amps.push_back(peaks[s].amplitude);
    }
    AbundanceEstimate est = estimate_abundances(amps);
    for (size_t s = 0; s < 3; ++s)
      CHECK(std::abs(est.fractions[s] - fr[s]) < 1e-4);
  }

  SUBCASE("zero-crossing notches are bridged by the envelope") {
    SignalTrace tr = gaussian_peaks_trace(trio, fr, 2.0, 0.45);
    // carve fast quadratic-signal notches into every lobe
    for (int i = 0; i < tr.grid.n; ++i)
      tr.signal[static_cast<size_t>(i)] *=
          std::pow(std::cos(2.0 * std::numbers::pi * tr.grid.time(i) / 0.9), 2);
    std::vector<ResolvedPeak> peaks = resolve_isotopologue_peaks(tr, trio, 2.0);
    for (size_t s = 0; s < 3; ++s)
      CHECK(std::abs(peaks[s].t_ps - 2.0 * revival_time_ps(trio[s])) < 0.3);
  }

  SUBCASE("overlapping lobes throw the unresolved error") {
    SignalTrace tr = gaussian_peaks_trace(trio, fr, 2.0, 2.0);
    try {
      resolve_isotopologue_peaks(tr, trio, 2.0);
      FAIL("overlapping lobes must not resolve");
    } catch (const AnalysisError& e) {
      CHECK(e.code() == "E_UNRESOLVED");
      CHECK(e.exit_code() == 4);
    }
  }

  SUBCASE("windows outside the trace are a config error") {
    SignalTrace tr = gaussian_peaks_trace(trio, fr, 2.0, 0.45);
    CHECK_THROWS_AS(resolve_isotopologue_peaks(tr, trio, 1.0), ConfigError);
    CHECK_THROWS_AS(resolve_isotopologue_peaks(tr, trio, -2.0), ConfigError);
  }
}

TEST_CASE("abundance estimation from peak heights") {
  SUBCASE("squared fractions invert exactly") {
    std::vector<double> amps = {0.25, 0.25};
    AbundanceEstimate est = estimate_abundances(amps);
    CHECK(est.fractions[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.fractions[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("negative amplitudes clamp to zero") {
    std::vector<double> amps = {1e-3, 0.0, -0.1};
    AbundanceEstimate est = estimate_abundances(amps);
    CHECK(est.fractions[0] == doctest::Approx(1.0));
    CHECK(est.fractions[1] == 0.0);
    CHECK(est.fractions[2] == 0.0);
  }
  SUBCASE("degenerate inputs") {
    std::vector<double> zeros = {0.0, 0.0};
    CHECK_THROWS_AS(estimate_abundances(zeros), AnalysisError);
    CHECK_THROWS_AS(estimate_abundances(std::vector<double>{}), ConfigError);
  }
}
