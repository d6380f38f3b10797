#include "gffi/kernel.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "gffi/error.hpp"
#include "gffi/specialfn.hpp"

namespace gffi {

namespace {

using quad = __float128;

// std::complex<__float128> cannot use the std transcendental overloads, so a
// bare-bones complex type is carried for both precisions.
template <class T>
struct Cx {
  T re{}, im{};
};

template <class T>
Cx<T> operator+(Cx<T> a, Cx<T> b) { return {a.re + b.re, a.im + b.im}; }
template <class T>
Cx<T> operator-(Cx<T> a, Cx<T> b) { return {a.re - b.re, a.im - b.im}; }
template <class T>
Cx<T> operator*(Cx<T> a, Cx<T> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T>
Cx<T> operator*(T s, Cx<T> a) { return {s * a.re, s * a.im}; }

inline double m_exp(double x) { return std::exp(x); }
inline double m_log(double x) { return std::log(x); }
inline double m_cos(double x) { return std::cos(x); }
inline double m_sin(double x) { return std::sin(x); }
inline double m_hypot(double x, double y) { return std::hypot(x, y); }
inline double m_atan2(double y, double x) { return std::atan2(y, x); }
inline quad m_exp(quad x) { return expq(x); }
inline quad m_log(quad x) { return logq(x); }
inline quad m_cos(quad x) { return cosq(x); }
inline quad m_sin(quad x) { return sinq(x); }
inline quad m_hypot(quad x, quad y) { return hypotq(x, y); }
inline quad m_atan2(quad y, quad x) { return atan2q(y, x); }

template <class T>
T pi_v() {
  if constexpr (std::is_same_v<T, quad>) {
    return M_PIq;
  } else {
    return std::numbers::pi;
  }
}

template <class T>
Cx<T> c_log(Cx<T> w) { return {m_log(m_hypot(w.re, w.im)), m_atan2(w.im, w.re)}; }

template <class T>
Cx<T> c_exp(Cx<T> w) {
  const T m = m_exp(w.re);
  return {m * m_cos(w.im), m * m_sin(w.im)};
}

// Log of the z-side integrand at z = rho e^{i th}:
//   t X + n1 log(X - 1) - s1 log z [+ log(1 - 1/z)]
template <class T>
Cx<T> log_a(const KernelQuery& q, T logrho, T th) {
  const T rho = m_exp(logrho);
  const T c = m_cos(th), s = m_sin(th);
  const T half = T(0.5);
  const Cx<T> x{half * (rho + 1 / rho) * c, half * (rho - 1 / rho) * s};
  const T t = T(q.t);
  Cx<T> out = t * x;
  if (q.lv1.n > 0) {
    const Cx<T> xm1 = x - Cx<T>{T(1), T(0)};
    if (xm1.re == 0 && xm1.im == 0) {
      return {-T(std::numeric_limits<double>::infinity()), T(0)};
    }
    out = out + T(q.lv1.n) * c_log(xm1);
  }
  out = out - T(q.s1) * Cx<T>{logrho, th};
  if (q.lv1.a == Shift::Plus) {
    const Cx<T> w{T(1) - c / rho, s / rho};
    if (w.re == 0 && w.im == 0) return {-T(std::numeric_limits<double>::infinity()), T(0)};
    out = out + c_log(w);
  }
  return out;
}

// Log of the v-side integrand at v = r e^{i ph}:
//   -t Y - n2 log(Y - 1) + log J(v) + log(1 - v^-2) + log v
template <class T>
Cx<T> log_b(const KernelQuery& q, T logr, T ph) {
  const T r = m_exp(logr);
  const T c = m_cos(ph), s = m_sin(ph);
  const T half = T(0.5);
  const Cx<T> y{half * (r + 1 / r) * c, half * (r - 1 / r) * s};
  const Cx<T> logv{logr, ph};
  const T t = T(q.t);
  Cx<T> out = T(-1) * (t * y);
  out = out - T(q.lv2.n) * c_log(y - Cx<T>{T(1), T(0)});
  const int s2 = q.s2;
  if (q.lv2.a == Shift::Minus) {
    // J = v^s (1 + v^{-2s}) / 2
    const Cx<T> w = c_exp(T(-2 * s2) * logv);
    out = out + T(s2) * logv + c_log(half * (Cx<T>{T(1), T(0)} + w));
  } else {
    // J = v^{s+1} (1 - v^{-2s-1}) / (v - 1)
    const Cx<T> w = c_exp(T(-2 * s2 - 1) * logv);
    const Cx<T> v{r * c, r * s};
    out = out + T(s2 + 1) * logv + c_log(Cx<T>{T(1), T(0)} - w) -
          c_log(v - Cx<T>{T(1), T(0)});
  }
  const Cx<T> vm2 = c_exp(T(-2) * logv);
  out = out + c_log(Cx<T>{T(1), T(0)} - vm2) + logv;
  return out;
}

double max_re_log_a(const KernelQuery& q, double logrho, int samples) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double th = 2 * std::numbers::pi * (i + 0.5) / samples;
    best = std::max(best, log_a<double>(q, logrho, th).re);
  }
  return best;
}

double max_re_log_b(const KernelQuery& q, double logr, int samples) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double ph = 2 * std::numbers::pi * i / samples;
    best = std::max(best, log_b<double>(q, logr, ph).re);
  }
  return best;
}

double ellipse_gap(double rho, double r) {
  return 0.5 * ((r + 1 / r) - (rho + 1 / rho));
}

constexpr double kMinRatio = 1.08;
constexpr double kDoubleDigits = 6.0;
constexpr double kDoubleEps = 1e-16;
constexpr double kQuadEps = 1e-33;

struct Contours {
  double rho = 1.0;
  double r = 1.25;
  double digits = 0.0;
};

double digits_for(const KernelQuery& q, double rho, double r) {
  const double w = weight(q.lv1.a, q.s1);
  const double la = max_re_log_a(q, std::log(rho), 128);
  const double lb = max_re_log_b(q, std::log(r), 128);
  return (std::log(w) + la + lb - std::log(ellipse_gap(rho, r))) / std::log(10.0);
}

Contours choose_contours(const KernelQuery& q, const QuadratureSpec& spec) {
  if (spec.v_radius) {
    return {1.0, *spec.v_radius, digits_for(q, 1.0, *spec.v_radius)};
  }
  constexpr int kR = 48, kRho = 64, kSamples = 128;
  const double umin = std::log(kMinRatio), umax = std::log(8.0);
  std::vector<double> lb(kR), lr(kR);
  for (int j = 0; j < kR; ++j) {
    lr[j] = umin + (umax - umin) * j / (kR - 1);
    lb[j] = max_re_log_b(q, lr[j], kSamples);
  }
  const double pmax = umax - umin;
  std::vector<double> la(kRho), lp(kRho);
  for (int i = 0; i < kRho; ++i) {
    lp[i] = pmax * i / (kRho - 1);
    la[i] = max_re_log_a(q, lp[i], kSamples);
  }
  Contours best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kR; ++j) {
    for (int i = 0; i < kRho; ++i) {
      if (lp[i] > lr[j] - umin + 1e-12) break;
      const double rho = std::exp(lp[i]), r = std::exp(lr[j]);
      const double cost = la[i] + lb[j] - std::log(ellipse_gap(rho, r));
      if (cost < best_cost) {
        best_cost = cost;
        best = {rho, r, 0.0};
      }
    }
  }
  best.digits = (std::log(weight(q.lv1.a, q.s1)) + best_cost) / std::log(10.0);
  return best;
}

struct Pair {
  double full_re = 0, full_im = 0;
  double half_re = 0, half_im = 0;
  double scale_log = 0;  // result = exp(scale_log) * value
};

// Trapezoid sum of the double integral on `nodes` points per circle, plus the
// same sum restricted to the even-indexed subgrid (nodes / 2 per circle).
template <class T>
Pair double_integral(const KernelQuery& q, const Contours& c, int nodes) {
  const T logrho = m_log(T(c.rho));
  const T logr = m_log(T(c.r));
  const T two_pi = 2 * pi_v<T>();
  const T rho = T(c.rho), r = T(c.r);
  const T half = T(0.5);

  std::vector<Cx<T>> a(nodes), b(nodes), x(nodes), y(nodes);
  T la = -T(std::numeric_limits<double>::infinity());
  T lb = -T(std::numeric_limits<double>::infinity());
  for (int i = 0; i < nodes; ++i) {
    const T th = two_pi * T(i) / T(nodes);
    a[i] = log_a<T>(q, logrho, th);
    b[i] = log_b<T>(q, logr, th);
    if (a[i].re > la) la = a[i].re;
    if (b[i].re > lb) lb = b[i].re;
    x[i] = {half * (rho + 1 / rho) * m_cos(th), half * (rho - 1 / rho) * m_sin(th)};
    y[i] = {half * (r + 1 / r) * m_cos(th), half * (r - 1 / r) * m_sin(th)};
  }
  for (int i = 0; i < nodes; ++i) {
    a[i] = std::isinf(static_cast<double>(a[i].re))
               ? Cx<T>{}
               : c_exp(Cx<T>{a[i].re - la, a[i].im});
    b[i] = c_exp(Cx<T>{b[i].re - lb, b[i].im});
  }

  Cx<T> full{}, halfsum{};
  for (int i = 0; i < nodes; ++i) {
    if (a[i].re == 0 && a[i].im == 0) continue;
    Cx<T> inner{}, inner_even{};
    const Cx<T> xi = x[i];
    for (int j = 0; j < nodes; ++j) {
      const T dr = 2 * (xi.re - y[j].re);
      const T di = 2 * (xi.im - y[j].im);
      const T den = dr * dr + di * di;
      const Cx<T> term{(b[j].re * dr + b[j].im * di) / den,
                       (b[j].im * dr - b[j].re * di) / den};
      inner = inner + term;
      if ((j & 1) == 0) inner_even = inner_even + term;
    }
    const Cx<T> ai = a[i];
    full = full + ai * inner;
    if ((i & 1) == 0) halfsum = halfsum + ai * inner_even;
  }
  const T w = T(weight(q.lv1.a, q.s1));
  const T nn = T(nodes) * T(nodes);
  const T hh = nn / 4;
  const T scale = m_exp(la + lb);
  Pair p;
  p.full_re = static_cast<double>(w * scale * full.re / nn);
  p.full_im = static_cast<double>(w * scale * full.im / nn);
  p.half_re = static_cast<double>(w * scale * halfsum.re / hh);
  p.half_im = static_cast<double>(w * scale * halfsum.im / hh);
  p.scale_log = static_cast<double>(la + lb);
  return p;
}

Pair extra_integral(const KernelQuery& q, int nodes) {
  const int d = q.lv1.n - q.lv2.n;
  if (d < 0) {
    throw Error(ErrorKind::InvalidArgument,
                "level ordering fired with n1 < n2; exponent would be negative");
  }
  Pair p;
  for (int i = 0; i < nodes; ++i) {
    const double th = 2 * std::numbers::pi * i / nodes;
    const cplx z = std::polar(1.0, th);
    const double x = std::cos(th);
    const cplx f = jacobi(q.lv1.a, q.s1, z) * jacobi(q.lv2.a, q.s2, z) *
                   std::pow(x - 1.0, d) * measure_density(q.lv1.a, th);
    p.full_re += f.real();
    p.full_im += f.imag();
    if ((i & 1) == 0) {
      p.half_re += f.real();
      p.half_im += f.imag();
    }
  }
  const double w = weight(q.lv1.a, q.s1);
  p.full_re *= 2 * w / nodes;
  p.full_im *= 2 * w / nodes;
  p.half_re *= 4 * w / nodes;
  p.half_im *= 4 * w / nodes;
  return p;
}

}  // namespace

void validate(const KernelQuery& q) {
  if (q.lv1.n < 1 || q.lv2.n < 1) {
    throw Error(ErrorKind::InvalidArgument, "level n must be >= 1");
  }
  if (q.s1 < 0 || q.s2 < 0) {
    throw Error(ErrorKind::WallViolation, "kernel positions must be >= 0");
  }
  if (!(q.t >= 0.0) || !std::isfinite(q.t)) {
    throw Error(ErrorKind::InvalidArgument, "kernel time must be >= 0");
  }
}

void validate(const QuadratureSpec& spec) {
  if (spec.nodes < 4 || (spec.nodes & (spec.nodes - 1)) != 0) {
    throw Error(ErrorKind::InvalidArgument, "nodes must be a power of two >= 4");
  }
  if (spec.v_radius && !(*spec.v_radius > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "v_radius must exceed 1");
  }
  if (!(spec.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be > 0");
  if (spec.max_doublings < 0) {
    throw Error(ErrorKind::InvalidArgument, "max_doublings must be >= 0");
  }
}

KernelResult kernel_value(const KernelQuery& q, const QuadratureSpec& spec) {
  validate(q);
  validate(spec);
  const Contours c = choose_contours(q, spec);
  const bool extra = dominates(q.lv1, q.lv2);

  auto run = [&](bool extended) {
    KernelResult res;
    res.z_radius = c.rho;
    res.v_radius = c.r;
    res.extended_precision = extended;
    // The first pass at 2*nodes also yields the nodes-point estimate.
    int nodes = spec.nodes * 2;
    for (int k = 0; k <= spec.max_doublings; ++k, nodes *= 2) {
      const Pair d = extended ? double_integral<quad>(q, c, nodes)
                              : double_integral<double>(q, c, nodes);
      Pair e;
      if (extra) e = extra_integral(q, nodes);
      const double fine = d.full_re + e.full_re;
      const double coarse = d.half_re + e.half_re;
      res.double_integral = d.full_re;
      res.extra_integral = e.full_re;
      res.value = fine;
      res.imag_residue = std::abs(d.full_im + e.full_im);
      res.nodes = nodes;
      res.doublings = k;
      res.last_change = std::abs(fine - coarse);
      if (res.last_change < spec.tol * (1.0 + std::abs(fine))) {
        res.digits_lost = c.digits - std::log10(std::max(1.0, std::abs(fine)));
        return res;
      }
    }
    throw Error(ErrorKind::NonConvergence,
                "kernel quadrature did not converge after " +
                    std::to_string(spec.max_doublings) + " doublings (last change " +
                    std::to_string(res.last_change) + ")");
  };

  // Rounding error is bounded by unit roundoff times the largest term.
  auto rounding_ok = [&](const KernelResult& r) {
    const double eps = r.extended_precision ? kQuadEps : kDoubleEps;
    return eps * std::pow(10.0, r.digits_lost) < spec.tol;
  };

  KernelResult res = run(spec.force_extended || c.digits > kDoubleDigits);
  if (!rounding_ok(res) && !res.extended_precision) res = run(true);
  if (!rounding_ok(res)) {
    throw Error(ErrorKind::NonConvergence,
                "kernel integrand cancels over ~" +
                    std::to_string(static_cast<int>(res.digits_lost)) +
                    " digits; beyond extended precision");
  }
  if (res.imag_residue >= spec.tol * (1.0 + std::abs(res.value))) {
    throw Error(ErrorKind::NonConvergence,
                "imaginary residue " + std::to_string(res.imag_residue) +
                    " exceeds tolerance");
  }
  return res;
}

double kernel(int ell1, int s1, int ell2, int s2, double t,
              const QuadratureSpec& spec) {
  return kernel_value({LevelIndex::from_linear(ell1), s1,
                       LevelIndex::from_linear(ell2), s2, t},
                      spec)
      .value;
}

double conjugation_factor(const LevelIndex& lv, int s) {
  const double sign = s % 2 == 0 ? 1.0 : -1.0;
  const int e = lv.a == Shift::Minus ? lv.n - 1 : lv.n;
  return sign * std::pow(-2.0, e);
}

double conjugation(const LevelIndex& lv1, int s1, const LevelIndex& lv2, int s2) {
  return conjugation_factor(lv1, s1) / conjugation_factor(lv2, s2);
}

double conjugated_kernel(int ell1, int x1, int ell2, int x2, double t,
                         const QuadratureSpec& spec) {
  const auto l1 = LevelIndex::from_linear(ell1);
  const auto l2 = LevelIndex::from_linear(ell2);
  return conjugation(l1, x1, l2, x2) * kernel_value({l1, x1, l2, x2, t}, spec).value;
}

double determinant(std::vector<double> a, int n) {
  if (static_cast<int>(a.size()) != n * n) {
    throw Error(ErrorKind::InvalidArgument, "determinant needs an n x n matrix");
  }
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    if (a[piv * n + col] == 0.0) return 0.0;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(a[piv * n + k], a[col * n + k]);
      det = -det;
    }
    const double p = a[col * n + col];
    det *= p;
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / p;
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

namespace {

double build_det(const std::vector<SitePoint>& pts, double t,
                 const QuadratureSpec& spec, bool conjugate) {
  const int n = static_cast<int>(pts.size());
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& p = pts[i];
      const auto& q = pts[j];
      double k = kernel_value({p.level, p.s, q.level, q.s, t}, spec).value;
      if (conjugate) k *= conjugation(p.level, p.s, q.level, q.s);
      m[i * n + j] = k;
    }
  }
  return determinant(std::move(m), n);
}

void require_distinct(const std::vector<SitePoint>& pts) {
  std::set<std::pair<int, int>> seen;
  for (const auto& p : pts) {
    if (!seen.insert({p.level.linear(), p.s}).second) {
      throw Error(ErrorKind::InvalidArgument, "correlation points must be distinct");
    }
  }
}

}  // namespace

double correlation_det(const std::vector<SitePoint>& points, double t,
                       const QuadratureSpec& spec) {
  require_distinct(points);
  return build_det(points, t, spec, false);
}

double correlation_det_conjugated(const std::vector<SitePoint>& points, double t,
                                  const QuadratureSpec& spec) {
  require_distinct(points);
  return build_det(points, t, spec, true);
}

double correlation_det_unchecked(const std::vector<SitePoint>& points, double t,
                                 const QuadratureSpec& spec) {
  return build_det(points, t, spec, false);
}

double lozenge_probability(const LozengePattern& pattern, double t,
                           const QuadratureSpec& spec) {
  validate_pattern(pattern);
  std::vector<BlackWhite> bw;
  for (const auto& e : pattern) {
    bw.push_back(black_white(e));
    if (bw.back().black.x <= 1 || bw.back().white.x <= 1) {
      throw Error(ErrorKind::InvalidPattern,
                  "lozenge determinant needs all triangles at positions > 1");
    }
  }
  const int n = static_cast<int>(bw.size());
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m[i * n + j] = conjugated_kernel(bw[i].black.level, bw[i].black.x,
                                       bw[j].white.level, bw[j].white.x, t, spec);
    }
  }
  return determinant(std::move(m), n);
}

TriangleReport check_triangle_identities(const std::vector<TriangleSample>& samples,
                                         double t, const QuadratureSpec& spec) {
  TriangleReport rep;
  for (const auto& s : samples) {
    // Whites around the black triangle (x2, level2), black fixed at (x, level).
    {
      const int d = level_delta(s.level2);
      const double sum =
          conjugated_kernel(s.level, s.x, s.level2, s.x2, t, spec) +
          conjugated_kernel(s.level, s.x, s.level2 + 1, s.x2 - 1 + d, t, spec) +
          conjugated_kernel(s.level, s.x, s.level2 + 1, s.x2 + d, t, spec);
      const double target = (s.x == s.x2 && s.level == s.level2) ? 1.0 : 0.0;
      rep.max_residual_black = std::max(rep.max_residual_black, std::abs(sum - target));
    }
    // Blacks around the white triangle (x, level), white fixed at (x2, level2).
    if (s.level >= 2) {
      const int d = level_delta(s.level - 1);
      const double sum =
          conjugated_kernel(s.level, s.x, s.level2, s.x2, t, spec) +
          conjugated_kernel(s.level - 1, s.x + 1 - d, s.level2, s.x2, t, spec) +
          conjugated_kernel(s.level - 1, s.x - d, s.level2, s.x2, t, spec);
      const double target = (s.x == s.x2 && s.level == s.level2) ? 1.0 : 0.0;
      rep.max_residual_white = std::max(rep.max_residual_white, std::abs(sum - target));
    }
    ++rep.evaluated;
  }
  return rep;
}

std::vector<FarRightRow> check_far_right_limits(const LevelIndex& lv, double t,
                                                const std::vector<int>& s_grid,
                                                const QuadratureSpec& spec) {
  std::vector<FarRightRow> rows;
  const int ell = lv.linear();
  const int d = level_delta(ell);
  for (int s : s_grid) {
    FarRightRow row;
    row.s = s;
    row.type_ii = conjugated_kernel(ell, s, ell + 1, s - 1 + d, t, spec);
    row.type_iii = conjugated_kernel(ell, s, ell + 1, s + d, t, spec);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gffi
