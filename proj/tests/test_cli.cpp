// End-to-end checks of the command-line tool: every subcommand is exercised
// through std::system against the real binary (path injected by the build as
// ROTKICK_CLI_PATH), with configs and traces staged in a scratch directory.

#include <doctest.h>
#include <sys/wait.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rotkick/ensemble.hpp"
#include "rotkick/molecule.hpp"
#include "rotkick/rotor.hpp"
#include "rotkick/signal.hpp"
#include "rotkick/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rotkick_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_in(const std::string& name) { return (scratch() / name).string(); }

std::string write_file(const std::string& name, const std::string& text) {
  std::string p = path_in(name);
  std::ofstream f(p);
  f << text;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int seq = 0;
  std::string out_p = path_in("cap_out." + std::to_string(seq));
  std::string err_p = path_in("cap_err." + std::to_string(seq));
  ++seq;
  std::string cmd =
      std::string(ROTKICK_CLI_PATH) + " " + args + " >" + out_p + " 2>" + err_p;
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_p);
  r.err = slurp(err_p);
  return r;
}

// First number following `key` in a report (throws the test on a miss).
double value_after(const std::string& text, const std::string& key) {
  size_t pos = text.find(key);
  REQUIRE_MESSAGE(pos != std::string::npos, "missing '" << key << "' in:\n" << text);
  return std::stod(text.substr(pos + key.size()));
}

int data_rows(const std::string& table) {
  int rows = 0;
  std::istringstream in(table);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() &&
        (std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-'))
      ++rows;
  return rows;
}

const char* kColdNitrogen =
    "species N2-14 1\n"
    "temperature_K 60\n"
    "t_start_ps 0\n"
    "t_end_ps 70\n"
    "dt_ps 0.02\n"
    "pulse 0 1.5\n";

}  // namespace

TEST_CASE("version, help, and argument errors") {
  CliResult v = run_cli("--version");
  CHECK(v.status == 0);
  CHECK(v.out == "rotkick 1.0.0\n");

  CliResult h = run_cli("--help");
  CHECK(h.status == 0);
  CHECK(h.out.find("simulate") != std::string::npos);
  CHECK(h.out.find("analyze") != std::string::npos);

  CHECK(run_cli("").status == 2);                    // a subcommand is required
  CHECK(run_cli("frobnicate").status == 2);          // unknown subcommand
  CHECK(run_cli("simulate").status == 2);            // --config is required
  CHECK(run_cli("analyze").status == 2);             // --in is required
  std::string cfg = write_file("args.cfg", kColdNitrogen);
  CHECK(run_cli("simulate --config " + cfg + " --jmax 0").status == 2);
  CHECK(run_cli("simulate --config " + cfg + " --frobnicate").status == 2);
}

TEST_CASE("simulate writes a trace and analyze recovers the revival period") {
  std::string cfg = write_file("n2.cfg", kColdNitrogen);
  std::string trace = path_in("n2.trace");

  CliResult sim = run_cli("simulate --config " + cfg + " --out " + trace);
  CHECK(sim.status == 0);
  CHECK(sim.err.empty());
  std::string bytes = slurp(trace);
  CHECK(bytes.rfind("# rotkick trace v1\n", 0) == 0);
  CHECK(bytes.find("\tchi_N2-14\tsignal\n") != std::string::npos);

  CliResult ana = run_cli("analyze --in " + trace);
  CHECK(ana.status == 0);
  CHECK(ana.out.find("species N2-14\n") != std::string::npos);
  double t14 = rotkick::revival_time_ps(rotkick::builtin_molecule_library().find("N2-14"));
  CHECK(std::abs(value_after(ana.out, "period_ps ") - t14) < 0.02);
  CHECK(value_after(ana.out, "contrast ") > 0.1);
  CHECK(value_after(ana.out, "comb_peaks ") >= 3);
  // eight full revival windows fit into 70 ps
  CHECK(value_after(ana.out, "revivals ") >= 6);

  SUBCASE("reruns and thread counts do not change a single byte") {
    std::string again = path_in("n2_again.trace");
    CHECK(run_cli("simulate --config " + cfg + " --out " + again).status == 0);
    CHECK(slurp(again) == bytes);

    std::string t1 = path_in("n2_t1.trace");
    std::string t3 = path_in("n2_t3.trace");
    CHECK(run_cli("simulate --config " + cfg + " --threads 1 --out " + t1).status == 0);
    CHECK(run_cli("simulate --config " + cfg + " --threads 3 --out " + t3).status == 0);
    CHECK(slurp(t1) == bytes);
    CHECK(slurp(t3) == bytes);
  }
}

TEST_CASE("omitting --out (or passing '-') streams the same bytes to stdout") {
  std::string cfg = write_file("short.cfg",
                               "species N2-14 1\n"
                               "temperature_K 60\n"
                               "t_end_ps 12\n"
                               "dt_ps 0.02\n"
                               "pulse 0 1.5\n");
  std::string trace = path_in("short.trace");
  REQUIRE(run_cli("simulate --config " + cfg + " --out " + trace).status == 0);
  std::string bytes = slurp(trace);

  CliResult dash = run_cli("simulate --config " + cfg + " --out -");
  CHECK(dash.status == 0);
  CHECK(dash.out == bytes);

  CliResult none = run_cli("simulate --config " + cfg);
  CHECK(none.status == 0);
  CHECK(none.out == bytes);
}

TEST_CASE("configuration mistakes exit with status 2") {
  CliResult missing = run_cli("simulate --config " + path_in("nowhere.cfg"));
  CHECK(missing.status == 2);
  CHECK(missing.err.find("error [E_CONFIG]") != std::string::npos);

  std::string bad = write_file("bad.cfg", "species N2-14 1\nt_end_ps 10\nwibble 3\n");
  CliResult unknown = run_cli("simulate --config " + bad);
  CHECK(unknown.status == 2);
  CHECK(unknown.err.find("unknown key") != std::string::npos);
  CHECK(unknown.err.find("bad.cfg:3") != std::string::npos);

  std::string one = write_file("one.cfg", kColdNitrogen);
  CliResult inter = run_cli("interfere --config " + one);
  CHECK(inter.status == 2);
  CHECK(inter.err.find("exactly two species") != std::string::npos);

  CHECK(run_cli("scan --config " + one).status == 2);      // no scan range
  CHECK(run_cli("optimize --config " + one).status == 2);  // no bracket

  CliResult sink =
      run_cli("simulate --config " + one + " --out /nonexistent_dir_zq/trace");
  CHECK(sink.status == 2);
  CHECK(sink.err.find("cannot write") != std::string::npos);

  CHECK(run_cli("analyze --in " + path_in("nowhere.trace")).status == 2);
}

TEST_CASE("a pinned basis fails with the matching status") {
  std::string cfg = write_file("warm.cfg",
                               "species N2-14 1\n"
                               "temperature_K 295\n"
                               "t_end_ps 1\n"
                               "dt_ps 0.05\n"
                               "pulse 0 2\n");

  // far below the thermal population: rejected as a configuration problem
  CliResult low = run_cli("simulate --config " + cfg + " --jmax 6");
  CHECK(low.status == 2);
  CHECK(low.err.find("cannot hold the thermal ensemble") != std::string::npos);

  // holds the ensemble but leaves no headroom for the kick: numerical failure
  int cut = rotkick::thermal_shell_cutoff(
      rotkick::builtin_molecule_library().find("N2-14"), 295.0);
  CliResult leak =
      run_cli("simulate --config " + cfg + " --jmax " + std::to_string(cut + 1));
  CHECK(leak.status == 3);
  CHECK(leak.err.find("error [E_JMAX]") != std::string::npos);
}

TEST_CASE("a trace with no revival comb exits with status 4") {
  // hand-built featureless trace: constant columns carry no comb at all
  rotkick::SignalTrace flat;
  flat.grid = rotkick::TimeGrid{0.0, 0.05, 400};
  flat.species = {"N2-14"};
  flat.fractions = {1.0};
  flat.chi.assign(1, std::vector<double>(400, 0.02));
  flat.signal.assign(400, 0.0004);
  std::string p = path_in("flat.trace");
  rotkick::write_signal_trace_file(p, flat, "");

  CliResult r = run_cli("analyze --in " + p);
  CHECK(r.status == 4);
  CHECK(r.err.find("error [E_NO_COMB]") != std::string::npos);
}

TEST_CASE("interfere tabulates the coincidences of the nitrogen pair") {
  std::string cfg = write_file("pair.cfg",
                               "species N2-14 0.5\n"
                               "species N2-15 0.5\n"
                               "horizon_ps 130\n");
  CliResult r = run_cli("interfere --config " + cfg + " --out -");
  CHECK(r.status == 0);
  CHECK(r.out.find("t_ps\tkind\tmultiple_a\tmultiple_b\n") != std::string::npos);
  CHECK(data_rows(r.out) == 4);
  // 15/14 quarter-epoch ladder: 3.75/3.5, 7.5/7, 11.25/10.5, 15/14
  CHECK(r.out.find("\tfractional\t3.75\t3.5\n") != std::string::npos);
  CHECK(r.out.find("\tdestructive\t7.5\t7\n") != std::string::npos);
  CHECK(r.out.find("\tconstructive\t15\t14\n") != std::string::npos);
  CHECK(std::abs(value_after(r.out, "multiple_b\n") - 31.44) < 0.05);
}

TEST_CASE("scan and optimize report two-pulse metrics") {
  std::string cfg = write_file("ctl.cfg",
                               "species N2-14 1\n"
                               "temperature_K 30\n"
                               "dt_ps 0.02\n"
                               "p1 1\n"
                               "p2 1\n"
                               "scan_from_ps 7.9\n"
                               "scan_to_ps 8.9\n"
                               "scan_step_ps 0.5\n"
                               "horizon_ps 22\n"
                               "objective selectivity\n");
  double t14 = rotkick::revival_time_ps(rotkick::builtin_molecule_library().find("N2-14"));

  CliResult scan = run_cli("scan --config " + cfg + " --out -");
  CHECK(scan.status == 0);
  CHECK(scan.out.find("delay_ps\tobjective\tselectivity\t") != std::string::npos);
  CHECK(scan.out.find("rms_N2-14") != std::string::npos);
  CHECK(data_rows(scan.out) == 3);  // 7.9, 8.4, 8.9

  CliResult opt = run_cli("optimize --config " + cfg + " --out -");
  CHECK(opt.status == 0);
  CHECK(std::abs(value_after(opt.out, "delay_ps ") - t14) < 0.1);
  CHECK(value_after(opt.out, "objective ") > 1.5);
  CHECK(opt.out.find("species N2-14 rms ") != std::string::npos);
  CHECK(opt.out.find(" dE_single ") != std::string::npos);
}

TEST_CASE("analyze resolves species peaks and abundances from a mixed trace") {
  using rotkick::builtin_molecule_library;
  const auto& lib = builtin_molecule_library();
  double ta = rotkick::revival_time_ps(lib.find("Cl2-35-35"));
  double tb = rotkick::revival_time_ps(lib.find("Cl2-35-37"));

  rotkick::SignalTrace mix;
  mix.grid = rotkick::TimeGrid{0.0, 0.05, 6000};
  mix.species = {"Cl2-35-35", "Cl2-35-37"};
  mix.fractions = {0.7, 0.3};
  mix.chi.assign(2, std::vector<double>(6000, 0.0));
  mix.signal.assign(6000, 0.0);
  const double periods[2] = {ta, tb};
  const double sigma = 0.45;
  for (int i = 0; i < 6000; ++i) {
    double t = mix.grid.time(i);
    for (int s = 0; s < 2; ++s) {
      for (int h = 1; h <= 5; h += 2)
        mix.chi[s][i] +=
            0.03 * std::exp(-0.25 * h) * std::cos(2.0 * M_PI * h * t / periods[s]);
      double d = t - 2.0 * periods[s];  // lobe at the second revival
      double f = mix.fractions[s];
      mix.signal[i] += f * f * std::exp(-0.5 * d * d / (sigma * sigma));
    }
  }
  std::string p = path_in("cl2.trace");
  rotkick::write_signal_trace_file(p, mix, "");

  CliResult r = run_cli("analyze --in " + p);
  CHECK(r.status == 0);
  CHECK(std::abs(value_after(r.out, "species Cl2-35-35\n  period_ps ") - ta) <
        0.005 * ta);
  CHECK(std::abs(value_after(r.out, "species Cl2-35-37\n  period_ps ") - tb) <
        0.005 * tb);
  CHECK(std::abs(value_after(r.out, "peak Cl2-35-35 t_ps ") - 2.0 * ta) < 0.1);
  CHECK(std::abs(value_after(r.out, "peak Cl2-35-37 t_ps ") - 2.0 * tb) < 0.1);
  CHECK(std::abs(value_after(r.out, "abundance Cl2-35-35 ") - 0.7) < 0.01);
  CHECK(std::abs(value_after(r.out, "abundance Cl2-35-37 ") - 0.3) < 0.01);
}
