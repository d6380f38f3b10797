#pragma once

// Macroscopic limit shape and fluctuation data: the action G, its critical
// point Omega, the frozen boundary, the limiting density, the Green's
// function, Wick pairings and the saddle-point estimate of the kernel.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace gffi {

using cplx = std::complex<double>;

struct MacroPoint {
  double nu = 0.0;
  double eta = 1.0;
  double tau = 1.0;
};

struct FrozenBoundary {
  double q1 = 0.0;
  double q2 = 0.0;
};

FrozenBoundary frozen_boundary(double eta, double tau);

/// q1(eta, tau) < nu < q2(eta, tau).
bool in_domain(const MacroPoint& p);

/// G(z) = tau (z + 1/z)/2 + eta log((z + 1/z)/2 - 1) - nu log z, principal logs.
cplx action(const MacroPoint& p, cplx z);
/// dG/dz = p(z) / (2 z^2 (z - 1)).
cplx d_action(const MacroPoint& p, cplx z);
cplx d2_action(const MacroPoint& p, cplx z);
/// d^2 G / dz dnu = -1/z.
cplx d_action_dnu_dz(cplx z);

/// Coefficients c0..c3 of p(z) = c0 + c1 z + c2 z^2 + c3 z^3.
std::array<double, 4> critical_cubic(const MacroPoint& p);

/// All three roots of a real cubic c0 + c1 z + c2 z^2 + c3 z^3, c3 != 0.
std::array<cplx, 3> cubic_roots(const std::array<double, 4>& c);

/// Root of the critical cubic in the open upper half-plane, polished by
/// Newton steps on G'. No domain check on nu, so negative nu is allowed.
/// Throws OutOfDomain when all roots are real.
cplx omega(const MacroPoint& p);

/// arg Omega / pi.
double density(const MacroPoint& p);

/// (1/2) arg G''(Omega) mapped into [0, pi).
double theta(const MacroPoint& p);

struct SaddleData {
  cplx omega;
  cplx g;   // G(Omega)
  cplx g2;  // G''(Omega)
  double theta = 0.0;
};

SaddleData saddle_data(const MacroPoint& p);

/// Dirichlet Green's function on H - D:
/// (1/2pi) log |(U_z - conj U_w) / (U_z - U_w)|, U_z = z + 1/z.
double green(cplx z, cplx w);

/// Sum over fixed-point-free involutions of prod cov(i, j); 0 for odd k.
double wick_sum(int k, const std::function<double(int, int)>& cov);

/// wick_sum with cov = green(Omega_i, Omega_j).
double wick_moment(const std::vector<cplx>& omegas);

/// f(u, v) = (1/v) (1 - u^-2) / (v + 1/v - u - 1/u).
cplx cross_factor(cplx u, cplx v);

struct CycleResidual {
  cplx residual;
  double scale = 0.0;  // sum of |term| over all cycles
  double relative() const { return scale > 0 ? std::abs(residual) / scale : 0.0; }
};

/// Sum over all l-cycles of prod f(z_i, z_next) / G'_nu(z_i).
CycleResidual cycle_cancellation_check(const std::vector<cplx>& points);

/// Sum over all l-cycles of prod 1 / (u_i - u_next).
CycleResidual cycle_identity_u(const std::vector<cplx>& u);

enum class CrossOrientation {
  Direct,  // f(Omega_1, Omega_2) as printed
  Kernel,  // f(Omega_2, Omega_1), the factor carried by the kernel integrand
};

enum class PhaseConvention {
  Printed,          // phases e^{+-i N Im G -+ i theta} exactly as printed
  SteepestDescent,  // adds the orientation factor of each descent path
};

struct SaddleEstimate {
  double envelope = 0.0;     // sum of the four term moduli
  std::array<cplx, 4> terms;
  double value = 0.0;        // real part of the sum
  double imag = 0.0;         // imaginary part of the sum (zero up to rounding)
  SaddleData s1, s2;
};

/// Main term of the double contour integral with e^{N G_1(z)} on the
/// z-contour and e^{-N G_2(v)} on the v-contour, both positively oriented.
SaddleEstimate saddle_kernel_estimate(const MacroPoint& p1, const MacroPoint& p2, double n,
                                      CrossOrientation orient = CrossOrientation::Kernel,
                                      PhaseConvention phase = PhaseConvention::SteepestDescent);

}  // namespace gffi
