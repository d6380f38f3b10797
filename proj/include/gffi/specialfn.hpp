#pragma once

// Jacobi polynomials with parameters (a, -1/2), a = -1/2 or +1/2, written
// as Laurent polynomials in z where x = (z + 1/z) / 2.

#include <complex>

#include "gffi/lattice.hpp"

namespace gffi {

using cplx = std::complex<double>;

/// a = -1/2: (z^s + z^-s) / 2.
/// a = +1/2: (z^{s+1/2} - z^{-s-1/2}) / (z^{1/2} - z^{-1/2}), evaluated as
/// (z^{s+1} - z^{-s}) / (z - 1) so no square root is needed; near z = 1 the
/// finite sum z^-s + ... + z^s is used instead.
cplx jacobi(Shift a, int s, cplx z);

/// W^{(a,-1/2)}(s).
double weight(Shift a, int s);

/// Density of m_a against dtheta on the unit circle z = e^{i theta}.
double measure_density(Shift a, double theta);

}  // namespace gffi
