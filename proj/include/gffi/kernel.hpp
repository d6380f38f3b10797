#pragma once

// Correlation kernel of the wall-reflected particle system, evaluated by
// periodic trapezoid quadrature of its double and single contour integrals.

#include <optional>
#include <string>
#include <vector>

#include "gffi/lattice.hpp"

namespace gffi {

struct KernelQuery {
  LevelIndex lv1;
  int s1 = 0;
  LevelIndex lv2;
  int s2 = 0;
  double t = 0.0;
};

struct QuadratureSpec {
  int nodes = 512;
  // Radius of the v-contour. Unset means both radii are chosen per query to
  // minimise cancellation (the z-contour then leaves the unit circle too).
  std::optional<double> v_radius;
  double tol = 1e-9;
  int max_doublings = 6;
  bool force_extended = false;  // always sum in 113-bit precision
};

struct KernelResult {
  double value = 0.0;
  double imag_residue = 0.0;
  double double_integral = 0.0;
  double extra_integral = 0.0;
  int nodes = 0;
  int doublings = 0;
  double last_change = 0.0;
  double z_radius = 1.0;
  double v_radius = 0.0;
  bool extended_precision = false;
  double digits_lost = 0.0;  // log10 of largest term over result scale
};

void validate(const KernelQuery& q);
void validate(const QuadratureSpec& spec);

KernelResult kernel_value(const KernelQuery& q, const QuadratureSpec& spec = {});

/// Shorthand taking linear levels.
double kernel(int ell1, int s1, int ell2, int s2, double t,
              const QuadratureSpec& spec = {});

/// C0(n, a, s).
double conjugation_factor(const LevelIndex& lv, int s);

/// c0 = C0(lv1, s1) / C0(lv2, s2).
double conjugation(const LevelIndex& lv1, int s1, const LevelIndex& lv2, int s2);

/// c0 * K, the kernel entering the lozenge formulas. Linear levels.
double conjugated_kernel(int ell1, int x1, int ell2, int x2, double t,
                         const QuadratureSpec& spec = {});

/// Determinant with partial pivoting; a is row-major n x n and is consumed.
double determinant(std::vector<double> a, int n);

struct SitePoint {
  LevelIndex level;
  int s = 0;
};

/// det[K(p_i, p_j, t)].
double correlation_det(const std::vector<SitePoint>& points, double t,
                       const QuadratureSpec& spec = {});

/// Same determinant built from c0 * K.
double correlation_det_conjugated(const std::vector<SitePoint>& points,
                                  double t, const QuadratureSpec& spec = {});

/// Test hook: builds the matrix without the distinctness check.
double correlation_det_unchecked(const std::vector<SitePoint>& points, double t,
                                 const QuadratureSpec& spec = {});

/// Probability of a non-overlapping lozenge pattern, all triangles at
/// positions > 1.
double lozenge_probability(const LozengePattern& pattern, double t,
                           const QuadratureSpec& spec = {});

struct TriangleSample {
  int x = 0;
  int level = 1;
  int x2 = 0;
  int level2 = 1;
};

struct TriangleReport {
  double max_residual_black = 0.0;  // sums over whites around a black triangle
  double max_residual_white = 0.0;  // sums over blacks around a white triangle
  int evaluated = 0;
  double max_residual() const {
    return max_residual_black > max_residual_white ? max_residual_black
                                                   : max_residual_white;
  }
};

TriangleReport check_triangle_identities(
    const std::vector<TriangleSample>& samples, double t,
    const QuadratureSpec& spec = {});

struct FarRightRow {
  int s = 0;
  double type_ii = 0.0;   // c0 K(s, l; s - 1 + delta_l, l + 1)
  double type_iii = 0.0;  // c0 K(s, l; s + delta_l, l + 1)
};

std::vector<FarRightRow> check_far_right_limits(const LevelIndex& lv, double t,
                                                const std::vector<int>& s_grid,
                                                const QuadratureSpec& spec = {});

}  // namespace gffi
