#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "rotkick/molecule.hpp"

namespace rotkick {

// E_J = B*J(J+1) - D*J^2(J+1)^2, in cm^-1.
double rotational_energy(const IsotopologueSpec& spec, int j);

// Energies for J = 0..jmax.  Throws NumericalError if the ladder is not
// strictly increasing (centrifugal turnover inside the basis).
std::vector<double> energy_table(const IsotopologueSpec& spec, int jmax);

// Full revival period 1/(2*B*c) in ps (rigid-rotor part; D only dephases).
double revival_time_ps(const IsotopologueSpec& spec);

// Nuclear-spin statistical weight of level J.  Heteronuclear: 1 for all J.
// Homonuclear with bosonic nuclei: even J -> (I+1)(2I+1), odd J -> I(2I+1);
// fermionic nuclei swap the two.
double spin_weight(const IsotopologueSpec& spec, int j);

// cos^2(theta) restricted to fixed M, J in [|M|, jmax], in the |J,M> basis.
// The operator is pentadiagonal in J (couples J with J and J+-2); the block
// stores the nonzero bands and its eigendecomposition, which turns the
// impulsive kick exp(i*P*cos^2) into two small dense mat-vecs.
class Cos2Block {
 public:
  Cos2Block(int m, int jmax);

  int m() const { return m_; }
  int jmin() const { return m_; }
  int jmax() const { return jmax_; }
  int size() const { return size_; }

  // <J,M|cos^2|J,M> and <J+2,M|cos^2|J,M>; j is the absolute quantum number.
  double diag(int j) const { return diag_[static_cast<size_t>(j - m_)]; }
  double off2(int j) const { return off2_[static_cast<size_t>(j - m_)]; }

  const std::vector<double>& diag_band() const { return diag_; }
  const std::vector<double>& off2_band() const { return off2_; }

  Eigen::MatrixXd dense() const;  // for tests / cross-checks
  const Eigen::VectorXd& eigenvalues() const { return eigval_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigvec_; }

  // amp <- exp(i*strength*cos^2) amp, amp has size() entries (J ascending).
  // Unitary up to round-off for real strength.  Thread-safe (const state).
  void apply_kick(std::complex<double>* amp, double strength) const;

  // <cos^2> for a normalized amplitude vector; O(size).
  double expectation(const std::complex<double>* amp) const;

 private:
  int m_;
  int jmax_;
  int size_;
  std::vector<double> diag_;   // diag_[k] = <m+k|cos^2|m+k>
  std::vector<double> off2_;   // off2_[k] = <m+k+2|cos^2|m+k>, 0 beyond band
  Eigen::VectorXd eigval_;
  Eigen::MatrixXd eigvec_;     // columns are eigenvectors
};

// Energies plus cos^2 blocks for every |M| of one species at one truncation.
// Immutable after construction; shared read-only across threads.
class RotorBasis {
 public:
  RotorBasis(IsotopologueSpec spec, int jmax);

  const IsotopologueSpec& spec() const { return spec_; }
  int jmax() const { return jmax_; }
  double energy(int j) const { return energies_[static_cast<size_t>(j)]; }
  const std::vector<double>& energies() const { return energies_; }
  double revival_time_ps() const { return revival_ps_; }

  // Block for |m| <= jmax (blocks for +m and -m coincide).
  const Cos2Block& block(int m) const;

 private:
  IsotopologueSpec spec_;
  int jmax_;
  double revival_ps_;
  std::vector<double> energies_;
  std::vector<std::unique_ptr<Cos2Block>> blocks_;  // index |m|
};

}  // namespace rotkick
