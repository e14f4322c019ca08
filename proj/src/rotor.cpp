#include "rotkick/rotor.hpp"

#include <cmath>

#include "rotkick/constants.hpp"
#include "rotkick/errors.hpp"
#include "rotkick/parallel.hpp"

namespace rotkick {

double rotational_energy(const IsotopologueSpec& spec, int j) {
  double x = static_cast<double>(j) * (j + 1.0);
  return spec.b_cm1 * x - spec.d_cm1 * x * x;
}

std::vector<double> energy_table(const IsotopologueSpec& spec, int jmax) {
  if (jmax < 0) throw ConfigError("jmax must be nonnegative");
  std::vector<double> e(static_cast<size_t>(jmax) + 1);
  for (int j = 0; j <= jmax; ++j) e[static_cast<size_t>(j)] = rotational_energy(spec, j);
  for (int j = 1; j <= jmax; ++j) {
    if (!(e[static_cast<size_t>(j)] > e[static_cast<size_t>(j) - 1]))
      throw NumericalError("species '" + spec.name +
                           "': energy ladder turns over at J=" + std::to_string(j) +
                           " (centrifugal term dominates; reduce jmax or D)");
  }
  return e;
}

double revival_time_ps(const IsotopologueSpec& spec) {
  return 1.0 / (2.0 * spec.b_cm1 * kSpeedOfLightCmPerPs);
}

double spin_weight(const IsotopologueSpec& spec, int j) {
  if (!spec.homonuclear) return 1.0;
  double i = spec.nuclear_spin;
  double sym = (i + 1.0) * (2.0 * i + 1.0);  // weight of the symmetric spin set
  double anti = i * (2.0 * i + 1.0);
  bool even = j % 2 == 0;
  if (spin_is_fermionic(i)) return even ? anti : sym;
  return even ? sym : anti;
}

namespace {
// <j+1,m|cos(theta)|j,m>; zero when j < m (no such state).
double cos_ladder(int j, int m) {
  if (j < m) return 0.0;
  double jj = j;
  double num = (jj + 1.0) * (jj + 1.0) - static_cast<double>(m) * m;
  return std::sqrt(num / ((2.0 * jj + 1.0) * (2.0 * jj + 3.0)));
}
}  // namespace

Cos2Block::Cos2Block(int m, int jmax) : m_(std::abs(m)), jmax_(jmax) {
  if (jmax_ < m_) throw ConfigError("cos^2 block needs jmax >= |m|");
  size_ = jmax_ - m_ + 1;
  diag_.resize(static_cast<size_t>(size_));
  off2_.assign(static_cast<size_t>(size_), 0.0);
  for (int k = 0; k < size_; ++k) {
    int j = m_ + k;
    double lo = cos_ladder(j - 1, m_);
    double hi = cos_ladder(j, m_);
    diag_[static_cast<size_t>(k)] = lo * lo + hi * hi;
    if (k + 2 < size_)
      off2_[static_cast<size_t>(k)] = hi * cos_ladder(j + 1, m_);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense());
  if (es.info() != Eigen::Success)
    throw NumericalError("cos^2 eigendecomposition failed for |m|=" +
                         std::to_string(m_));
  eigval_ = es.eigenvalues();
  eigvec_ = es.eigenvectors();
  for (int k = 0; k < size_; ++k) {
    if (!(eigval_[k] > 0.0 && eigval_[k] < 1.0))
      throw NumericalError("cos^2 eigenvalue outside (0,1) for |m|=" +
                           std::to_string(m_));
  }
}

Eigen::MatrixXd Cos2Block::dense() const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(size_, size_);
  for (int k = 0; k < size_; ++k) {
    c(k, k) = diag_[static_cast<size_t>(k)];
    if (k + 2 < size_) {
      c(k, k + 2) = off2_[static_cast<size_t>(k)];
      c(k + 2, k) = off2_[static_cast<size_t>(k)];
    }
  }
  return c;
}

void Cos2Block::apply_kick(std::complex<double>* amp, double strength) const {
  // Complex amplitudes viewed as an n x 2 real matrix: the unitary
  // V diag(e^{i P lambda}) V^T applies as two real mat-vecs plus a
  // per-eigenmode rotation.
  using Mat2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
  Eigen::Map<Mat2> x(reinterpret_cast<double*>(amp), size_, 2);
  Mat2 y = eigvec_.transpose() * x;
  for (int k = 0; k < size_; ++k) {
    double ang = strength * eigval_[k];
    double c = std::cos(ang), s = std::sin(ang);
    double re = y(k, 0), im = y(k, 1);
    y(k, 0) = c * re - s * im;
    y(k, 1) = c * im + s * re;
  }
  x.noalias() = eigvec_ * y;
}

double Cos2Block::expectation(const std::complex<double>* amp) const {
  const double* a = reinterpret_cast<const double*>(amp);
  const double* d = diag_.data();
  const double* o = off2_.data();
  const int n = size_;
  double acc = 0.0;
  for (int k = 0; k < n; ++k)
    acc += d[k] * (a[2 * k] * a[2 * k] + a[2 * k + 1] * a[2 * k + 1]);
  double off = 0.0;
  for (int k = 0; k + 2 < n; ++k)
    off += o[k] * (a[2 * k] * a[2 * k + 4] + a[2 * k + 1] * a[2 * k + 5]);
  return acc + 2.0 * off;
}

RotorBasis::RotorBasis(IsotopologueSpec spec, int jmax)
    : spec_(std::move(spec)), jmax_(jmax) {
  validate_spec(spec_);
  if (jmax_ < 2) throw ConfigError("basis needs jmax >= 2");
  energies_ = energy_table(spec_, jmax_);
  revival_ps_ = rotkick::revival_time_ps(spec_);
  blocks_.resize(static_cast<size_t>(jmax_) + 1);
  parallel_for(jmax_ + 1, [&](int m) {
    blocks_[static_cast<size_t>(m)] = std::make_unique<Cos2Block>(m, jmax_);
  });
}

const Cos2Block& RotorBasis::block(int m) const {
  int am = std::abs(m);
  if (am > jmax_) throw ConfigError("no cos^2 block for |m| > jmax");
  return *blocks_[static_cast<size_t>(am)];
}

}  // namespace rotkick
