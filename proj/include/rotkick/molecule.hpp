#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rotkick {

// One isotopologue of a linear molecule, described by its spectroscopic
// constants.  Energies: E_J = B*J(J+1) - D*J^2(J+1)^2, in cm^-1.
struct IsotopologueSpec {
  std::string name;
  double mass_a = 0.0;        // nuclear masses in amu (labels only;
  double mass_b = 0.0;        // B and D carry the actual inertia)
  double b_cm1 = 0.0;         // rotational constant
  double d_cm1 = 0.0;         // centrifugal distortion
  double nuclear_spin = 0.0;  // per-nucleus spin I; relevant when homonuclear
  bool homonuclear = false;
  double abundance = 1.0;     // default mixing fraction from the library
};

// Throws ConfigError (code E_SPEC) on invalid constants; returns
// human-readable warnings for suspicious but legal ones (e.g. D not << B).
std::vector<std::string> validate_spec(const IsotopologueSpec& spec);

// True when 2*I is odd (fermionic nuclei).
bool spin_is_fermionic(double nuclear_spin);

struct MoleculeLibrary {
  std::vector<IsotopologueSpec> entries;

  const IsotopologueSpec* try_find(const std::string& name) const;
  // Throws ConfigError for unknown names.
  const IsotopologueSpec& find(const std::string& name) const;
};

// Whitespace-separated columns, one species per line, '#' comments:
//   name mass_a mass_b B_cm1 D_cm1 spin2 abundance
// spin2 is 2*I (integer), so half-integer spins stay exact.  A species is
// homonuclear when mass_a == mass_b.
MoleculeLibrary parse_molecule_library(std::istream& in, const std::string& origin);
MoleculeLibrary load_molecule_library(const std::string& path);

// Table compiled into the library so the CLI works without data files.
// data/molecules.dat ships the same rows.
const MoleculeLibrary& builtin_molecule_library();

}  // namespace rotkick
