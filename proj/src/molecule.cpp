#include "rotkick/molecule.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rotkick/errors.hpp"

namespace rotkick {

namespace {
bool near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) < tol;
}
}  // namespace

bool spin_is_fermionic(double nuclear_spin) {
  double twice = 2.0 * nuclear_spin;
  if (!near_integer(twice) || twice < 0.0)
    throw ConfigError("nuclear spin must be a nonnegative multiple of 1/2", "E_SPEC");
  return static_cast<long long>(std::llround(twice)) % 2 != 0;
}

std::vector<std::string> validate_spec(const IsotopologueSpec& spec) {
  auto fail = [&](const std::string& msg) {
    throw ConfigError("species '" + spec.name + "': " + msg, "E_SPEC");
  };
  if (spec.name.empty()) fail("missing name");
  if (!(spec.b_cm1 > 0.0)) fail("rotational constant must be positive");
  if (spec.d_cm1 < 0.0) fail("centrifugal constant must be nonnegative");
  if (!(spec.mass_a > 0.0) || !(spec.mass_b > 0.0)) fail("masses must be positive");
  if (spec.abundance < 0.0 || spec.abundance > 1.0)
    fail("abundance must lie in [0,1]");
  double twice_spin = 2.0 * spec.nuclear_spin;
  if (!near_integer(twice_spin) || twice_spin < 0.0)
    fail("nuclear spin must be a nonnegative multiple of 1/2");
  if (spec.homonuclear && spec.mass_a != spec.mass_b)
    fail("homonuclear species needs equal masses");

  std::vector<std::string> warnings;
  if (spec.d_cm1 > 1e-3 * spec.b_cm1)
    warnings.push_back("species '" + spec.name +
                       "': centrifugal constant is large relative to B; "
                       "the rigid-rotor revival picture degrades");
  return warnings;
}

const IsotopologueSpec* MoleculeLibrary::try_find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

const IsotopologueSpec& MoleculeLibrary::find(const std::string& name) const {
  const IsotopologueSpec* e = try_find(name);
  if (!e) {
    std::string known;
    for (const auto& k : entries) known += (known.empty() ? "" : ", ") + k.name;
    throw ConfigError("unknown species '" + name + "' (library has: " + known + ")");
  }
  return *e;
}

MoleculeLibrary parse_molecule_library(std::istream& in, const std::string& origin) {
  MoleculeLibrary lib;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string name;
    if (!(ss >> name)) continue;  // blank or comment-only

    auto bad = [&](const std::string& msg) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    IsotopologueSpec spec;
    spec.name = name;
    long long spin2 = 0;
    if (!(ss >> spec.mass_a >> spec.mass_b >> spec.b_cm1 >> spec.d_cm1 >> spin2 >>
          spec.abundance))
      bad("expected: name mass_a mass_b B_cm1 D_cm1 spin2 abundance");
    std::string extra;
    if (ss >> extra) bad("trailing token '" + extra + "'");
    if (spin2 < 0) bad("spin2 must be nonnegative");
    spec.nuclear_spin = 0.5 * static_cast<double>(spin2);
    spec.homonuclear = spec.mass_a == spec.mass_b;
    if (lib.try_find(name)) bad("duplicate species '" + name + "'");
    validate_spec(spec);  // warnings are not errors when loading a table
    lib.entries.push_back(std::move(spec));
  }
  if (lib.entries.empty())
    throw ConfigError(origin + ": no species defined");
  return lib;
}

MoleculeLibrary load_molecule_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open molecule library '" + path + "'");
  return parse_molecule_library(in, path);
}

const MoleculeLibrary& builtin_molecule_library() {
  // B and D in cm^-1.  Within each element the isotopologue constants are
  // tied by the reduced-mass ratio, which is what makes the revival combs
  // commensurate (7 vs 7.5 periods for the two N2 species, etc.).
  // Cl2 abundances follow the 75.77/24.23 binomial and sum to 1 exactly.
  static const char* table =
      "# name      mass_a mass_b B_cm1      D_cm1        spin2 abundance\n"
      "N2-14       14     14     1.98958    5.76e-6      2     0.9927\n"
      "N2-15       15     15     1.8569413  5.0176e-6    1     1.32e-5\n"
      "Cl2-35-35   35     35     0.2440     1.86e-7      3     0.57410929\n"
      "Cl2-35-37   35     37     0.23740541 1.7608e-7    3     0.36718142\n"
      "Cl2-37-37   37     37     0.23081081 1.6644e-7    3     0.05870929\n";
  static const MoleculeLibrary lib = [] {
    std::istringstream ss(table);
    return parse_molecule_library(ss, "<builtin>");
  }();
  return lib;
}

}  // namespace rotkick
