#include "rotkick/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "rotkick/errors.hpp"
#include "rotkick/rotor.hpp"

namespace rotkick {

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Cursor {
  const std::string& origin;
  int lineno;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  }
};

double parse_double(const std::string& tok, const Cursor& at, const char* what) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    at.fail(std::string("cannot parse ") + what + " '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v))
    at.fail(std::string("cannot parse ") + what + " '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const Cursor& at, const char* what) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    at.fail(std::string("cannot parse ") + what + " '" + tok + "'");
  }
  if (used != tok.size()) at.fail(std::string("cannot parse ") + what + " '" + tok + "'");
  return static_cast<int>(v);
}

bool parse_switch(const std::string& tok, const Cursor& at, const char* what) {
  if (tok == "on") return true;
  if (tok == "off") return false;
  at.fail(std::string(what) + " must be 'on' or 'off', got '" + tok + "'");
}
}  // namespace

TimeGrid RunConfig::grid() const {
  if (!t_end_ps) throw ConfigError("config needs t_end_ps for a trace run");
  return TimeGrid::span(t_start_ps, *t_end_ps, dt_ps);
}

int RunConfig::target_index() const {
  for (size_t i = 0; i < components.size(); ++i)
    if (components[i].spec.name == target) return static_cast<int>(i);
  throw ConfigError("target '" + target + "' is not among the listed species");
}

double RunConfig::max_revival_ps() const {
  double t = 0.0;
  for (const auto& c : components) t = std::max(t, revival_time_ps(c.spec));
  return t;
}

double RunConfig::min_revival_ps() const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& c : components) t = std::min(t, revival_time_ps(c.spec));
  return t;
}

double RunConfig::default_horizon_ps() const {
  if (horizon_ps) return *horizon_ps;
  if (scan_to_ps) return *scan_to_ps + 2.05 * max_revival_ps();
  if (t_end_ps) return *t_end_ps;
  throw ConfigError("config needs horizon_ps (or scan_to_ps / t_end_ps)");
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  out << "temperature_K " << fmt17(temperature_k) << "\n";
  out << "t_start_ps " << fmt17(t_start_ps) << "\n";
  if (t_end_ps) out << "t_end_ps " << fmt17(*t_end_ps) << "\n";
  out << "dt_ps " << fmt17(dt_ps) << "\n";
  out << "rigid " << (rigid ? "on" : "off") << "\n";
  if (decay_tau_ps)
    out << "decay " << fmt17(*decay_tau_ps) << "\n";
  else
    out << "decay off\n";
  if (jmax) out << "jmax " << *jmax << "\n";
  if (!library_path.empty()) out << "library " << library_path << "\n";
  for (const auto& c : components)
    out << "species " << c.spec.name << " " << fmt17(c.fraction) << "\n";
  for (const auto& e : pulses.events)
    out << "pulse " << fmt17(e.t_ps) << " " << fmt17(e.strength) << "\n";
  out << "p1 " << fmt17(p1) << "\n";
  out << "p2 " << fmt17(p2) << "\n";
  if (!components.empty()) out << "target " << target << "\n";
  out << "objective "
      << (objective.kind == ControlObjective::Suppression ? "suppression"
                                                          : "selectivity")
      << "\n";
  out << "revival_index " << fmt17(revival_index) << "\n";
  out << "interfere_tol_ps " << fmt17(interfere_tol_ps) << "\n";
  if (scan_from_ps) out << "scan_from_ps " << fmt17(*scan_from_ps) << "\n";
  if (scan_to_ps) out << "scan_to_ps " << fmt17(*scan_to_ps) << "\n";
  if (scan_step_ps > 0.0) out << "scan_step_ps " << fmt17(scan_step_ps) << "\n";
  if (horizon_ps) out << "horizon_ps " << fmt17(*horizon_ps) << "\n";
  return out.str();
}

RunConfig parse_run_config(std::istream& in, const std::string& origin,
                           const MoleculeLibrary* library_override) {
  RunConfig cfg;
  struct RawSpecies {
    std::string name;
    std::optional<double> fraction;
    Cursor at;
  };
  std::vector<RawSpecies> raw_species;
  std::set<std::string> seen;  // scalar keys given so far

  std::string line;
  int lineno = 0;
  bool target_given = false;
  while (std::getline(in, line)) {
    ++lineno;
    Cursor at{origin, lineno};
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];

    auto args = [&](size_t lo, size_t hi) {
      if (tok.size() - 1 < lo || tok.size() - 1 > hi)
        at.fail("key '" + key + "' takes " + std::to_string(lo) +
                (hi != lo ? "-" + std::to_string(hi) : "") + " value(s)");
    };
    auto once = [&] {
      if (!seen.insert(key).second) at.fail("duplicate key '" + key + "'");
    };

    if (key == "species") {
      args(1, 2);
      RawSpecies rs{tok[1], std::nullopt, at};
      if (tok.size() == 3) rs.fraction = parse_double(tok[2], at, "fraction");
      for (const auto& prev : raw_species)
        if (prev.name == rs.name) at.fail("species '" + rs.name + "' listed twice");
      raw_species.push_back(std::move(rs));
    } else if (key == "pulse") {
      args(2, 2);
      cfg.pulses.events.push_back({parse_double(tok[1], at, "pulse time"),
                                   parse_double(tok[2], at, "pulse strength")});
    } else if (key == "temperature_K") {
      args(1, 1);
      once();
      cfg.temperature_k = parse_double(tok[1], at, "temperature");
      if (!(cfg.temperature_k > 0.0)) at.fail("temperature must be positive");
    } else if (key == "t_start_ps") {
      args(1, 1);
      once();
      cfg.t_start_ps = parse_double(tok[1], at, "t_start_ps");
    } else if (key == "t_end_ps") {
      args(1, 1);
      once();
      cfg.t_end_ps = parse_double(tok[1], at, "t_end_ps");
    } else if (key == "dt_ps") {
      args(1, 1);
      once();
      cfg.dt_ps = parse_double(tok[1], at, "dt_ps");
      if (!(cfg.dt_ps > 0.0)) at.fail("dt_ps must be positive");
    } else if (key == "decay") {
      args(1, 1);
      once();
      if (tok[1] == "on")
        cfg.decay_tau_ps = 200.0;
      else if (tok[1] == "off")
        cfg.decay_tau_ps.reset();
      else {
        cfg.decay_tau_ps = parse_double(tok[1], at, "decay time");
        if (!(*cfg.decay_tau_ps > 0.0)) at.fail("decay time must be positive");
      }
    } else if (key == "rigid") {
      args(1, 1);
      once();
      cfg.rigid = parse_switch(tok[1], at, "rigid");
    } else if (key == "jmax") {
      args(1, 1);
      once();
      int v = parse_int(tok[1], at, "jmax");
      if (v < 4) at.fail("jmax must be at least 4");
      cfg.jmax = v;
    } else if (key == "target") {
      args(1, 1);
      once();
      cfg.target = tok[1];
      target_given = true;
    } else if (key == "p1") {
      args(1, 1);
      once();
      cfg.p1 = parse_double(tok[1], at, "p1");
      if (cfg.p1 < 0.0) at.fail("p1 must be nonnegative");
    } else if (key == "p2") {
      args(1, 1);
      once();
      cfg.p2 = parse_double(tok[1], at, "p2");
      if (cfg.p2 < 0.0) at.fail("p2 must be nonnegative");
    } else if (key == "scan_from_ps") {
      args(1, 1);
      once();
      cfg.scan_from_ps = parse_double(tok[1], at, "scan_from_ps");
    } else if (key == "scan_to_ps") {
      args(1, 1);
      once();
      cfg.scan_to_ps = parse_double(tok[1], at, "scan_to_ps");
    } else if (key == "scan_step_ps") {
      args(1, 1);
      once();
      cfg.scan_step_ps = parse_double(tok[1], at, "scan_step_ps");
      if (!(cfg.scan_step_ps > 0.0)) at.fail("scan_step_ps must be positive");
    } else if (key == "horizon_ps") {
      args(1, 1);
      once();
      cfg.horizon_ps = parse_double(tok[1], at, "horizon_ps");
      if (!(*cfg.horizon_ps > 0.0)) at.fail("horizon_ps must be positive");
    } else if (key == "objective") {
      args(1, 1);
      once();
      if (tok[1] == "selectivity")
        cfg.objective.kind = ControlObjective::Selectivity;
      else if (tok[1] == "suppression")
        cfg.objective.kind = ControlObjective::Suppression;
      else
        at.fail("objective must be 'selectivity' or 'suppression'");
    } else if (key == "revival_index") {
      args(1, 1);
      once();
      cfg.revival_index = parse_double(tok[1], at, "revival_index");
      if (!(cfg.revival_index > 0.0)) at.fail("revival_index must be positive");
    } else if (key == "interfere_tol_ps") {
      args(1, 1);
      once();
      cfg.interfere_tol_ps = parse_double(tok[1], at, "interfere_tol_ps");
      if (!(cfg.interfere_tol_ps > 0.0)) at.fail("interfere_tol_ps must be positive");
    } else if (key == "library") {
      args(1, 1);
      once();
      cfg.library_path = tok[1];
    } else {
      at.fail("unknown key '" + key + "'");
    }
  }

  if (raw_species.empty())
    throw ConfigError(origin + ": config lists no species");

  const MoleculeLibrary* lib = library_override ? library_override
                                                : &builtin_molecule_library();
  MoleculeLibrary loaded;
  if (!cfg.library_path.empty()) {
    loaded = load_molecule_library(cfg.library_path);
    lib = &loaded;
  }

  size_t explicit_count = 0;
  for (const auto& rs : raw_species)
    if (rs.fraction) ++explicit_count;
  if (explicit_count != 0 && explicit_count != raw_species.size())
    throw ConfigError(origin +
                      ": give fractions for all species or for none of them");

  double fsum = 0.0;
  for (const auto& rs : raw_species) {
    const IsotopologueSpec& spec = lib->find(rs.name);
    double f = rs.fraction ? *rs.fraction : spec.abundance;
    if (rs.fraction && (*rs.fraction < 0.0 || *rs.fraction > 1.0))
      rs.at.fail("fraction must lie in [0,1]");
    cfg.components.push_back({spec, f});
    fsum += f;
  }
  if (std::abs(fsum - 1.0) > 1e-9) {
    std::string how = explicit_count ? "fractions" : "library abundances";
    throw ConfigError(origin + ": " + how + " of the listed species sum to " +
                      fmt17(fsum) + ", expected 1 (fractions are never "
                      "renormalized implicitly)");
  }

  cfg.pulses.validate();
  if (cfg.t_end_ps && *cfg.t_end_ps < cfg.t_start_ps)
    throw ConfigError(origin + ": t_end_ps precedes t_start_ps");
  if (cfg.scan_from_ps && cfg.scan_to_ps && !(*cfg.scan_from_ps < *cfg.scan_to_ps))
    throw ConfigError(origin + ": scan_from_ps must be below scan_to_ps");

  if (!target_given)
    cfg.target = cfg.components.front().spec.name;
  else
    (void)cfg.target_index();  // validates the name

  return cfg;
}

RunConfig load_run_config(const std::string& path,
                          const MoleculeLibrary* library_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_run_config(in, path, library_override);
}

}  // namespace rotkick
