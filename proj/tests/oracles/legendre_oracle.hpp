#pragma once

// Test-only oracle: matrix elements of cos^2(theta) between spherical
// harmonics, computed by Gauss-Legendre quadrature over fully normalized
// associated Legendre functions.  Deliberately independent of the library's
// ladder-coefficient route so the two can cross-check each other.

#include <vector>

namespace oracle {

// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].
struct Quadrature {
  std::vector<double> x;
  std::vector<double> w;
};
Quadrature gauss_legendre(int n);

// Fully normalized associated Legendre values P~_J^M(x) for J = M..jmax:
// integral of P~_J^M(x)^2 dx over [-1,1] equals 1.
std::vector<double> normalized_assoc_legendre(int jmax, int m, double x);

// <J1, M| cos^2(theta) |J2, M> by quadrature (exact for polynomials).
double cos2_element(int j1, int j2, int m);

}  // namespace oracle
