#include "gffi/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gffi/error.hpp"

namespace gffi {

FrozenBoundary frozen_boundary(double eta, double tau) {
  if (!(eta > 0.0) || !(tau > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "frozen boundary needs eta, tau > 0");
  }
  const double r = tau / eta;
  const double base = -0.5 * r * r + 5.0 * r + 1.0;
  const double corr = 0.5 * r * r * std::pow(1.0 + 4.0 / r, 1.5);
  FrozenBoundary fb;
  fb.q2 = eta * std::sqrt(base + corr);
  fb.q1 = r < 0.5 ? eta * std::sqrt(std::max(0.0, base - corr)) : 0.0;
  return fb;
}

bool in_domain(const MacroPoint& p) {
  if (!(p.eta > 0.0) || !(p.tau > 0.0)) return false;
  const auto fb = frozen_boundary(p.eta, p.tau);
  return p.nu > fb.q1 && p.nu < fb.q2;
}

namespace {

void require_regular(cplx z) {
  if (z == cplx(0.0) || z == cplx(1.0)) {
    throw Error(ErrorKind::InvalidArgument, "action is singular at z = 0 and z = 1");
  }
}

}  // namespace

cplx action(const MacroPoint& p, cplx z) {
  require_regular(z);
  const cplx x = 0.5 * (z + 1.0 / z);
  return p.tau * x + p.eta * std::log(x - 1.0) - p.nu * std::log(z);
}

cplx d_action(const MacroPoint& p, cplx z) {
  require_regular(z);
  const auto c = critical_cubic(p);
  const cplx num = c[0] + z * (c[1] + z * (c[2] + z * c[3]));
  return num / (2.0 * z * z * (z - 1.0));
}

cplx d2_action(const MacroPoint& p, cplx z) {
  require_regular(z);
  const cplx z2 = z * z;
  const cplx zm = z - 1.0;
  return p.tau / (z2 * z) + p.eta * (1.0 - 2.0 * z - z2) / (z2 * zm * zm) + p.nu / z2;
}

cplx d_action_dnu_dz(cplx z) {
  if (z == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "G'_nu is singular at 0");
  return -1.0 / z;
}

std::array<double, 4> critical_cubic(const MacroPoint& p) {
  return {p.tau, 2 * p.eta + 2 * p.nu - p.tau, 2 * p.eta - 2 * p.nu - p.tau, p.tau};
}

std::array<cplx, 3> cubic_roots(const std::array<double, 4>& c) {
  if (c[3] == 0.0) throw Error(ErrorKind::InvalidArgument, "leading coefficient is zero");
  const double a = c[2] / c[3], b = c[1] / c[3], d = c[0] / c[3];
  // depressed cubic w^3 + P w + Q with z = w - a/3
  const double pp = b - a * a / 3.0;
  const double qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
  const cplx disc = std::sqrt(cplx(qq * qq / 4.0 + pp * pp * pp / 27.0));
  cplx s1 = -qq / 2.0 + disc, s2 = -qq / 2.0 - disc;
  const cplx big = std::abs(s1) >= std::abs(s2) ? s1 : s2;
  const cplx u = big == cplx(0.0) ? cplx(0.0) : std::pow(big, 1.0 / 3.0);
  const cplx v = u == cplx(0.0) ? cplx(0.0) : -pp / (3.0 * u);
  const cplx w1(-0.5, std::sqrt(3.0) / 2.0);
  const cplx w2 = std::conj(w1);
  std::array<cplx, 3> roots = {u + v, u * w1 + v * w2, u * w2 + v * w1};
  for (auto& r : roots) {
    r -= a / 3.0;
    for (int it = 0; it < 3; ++it) {
      const cplx f = c[0] + r * (c[1] + r * (c[2] + r * c[3]));
      const cplx df = c[1] + r * (2.0 * c[2] + 3.0 * c[3] * r);
      if (std::abs(df) == 0.0) break;
      const cplx step = f / df;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::abs(r)) break;
    }
  }
  return roots;
}

cplx omega(const MacroPoint& p) {
  const auto roots = cubic_roots(critical_cubic(p));
  const cplx* best = &roots[0];
  for (const auto& r : roots) {
    if (r.imag() > best->imag()) best = &r;
  }
  cplx z = *best;
  if (!(z.imag() > 1e-10 * std::max(1.0, std::abs(z)))) {
    throw Error(ErrorKind::OutOfDomain,
                "no critical point in the upper half-plane at nu=" + std::to_string(p.nu) +
                    ", eta=" + std::to_string(p.eta) + ", tau=" + std::to_string(p.tau));
  }
  double res = std::abs(d_action(p, z));
  for (int it = 0; it < 3; ++it) {
    const cplx next = z - d_action(p, z) / d2_action(p, z);
    if (!(next.imag() > 0.0)) break;
    const double r2 = std::abs(d_action(p, next));
    if (!(r2 < res)) break;
    z = next;
    res = r2;
  }
  return z;
}

double density(const MacroPoint& p) {
  if (!in_domain(p)) {
    throw Error(ErrorKind::OutOfDomain, "density requested outside the liquid region");
  }
  return std::arg(omega(p)) / std::numbers::pi;
}

double theta(const MacroPoint& p) { return saddle_data(p).theta; }

SaddleData saddle_data(const MacroPoint& p) {
  SaddleData s;
  s.omega = omega(p);
  s.g = action(p, s.omega);
  s.g2 = d2_action(p, s.omega);
  double th = 0.5 * std::arg(s.g2);
  if (th < 0.0) th += std::numbers::pi;
  if (th >= std::numbers::pi) th -= std::numbers::pi;
  s.theta = th;
  return s;
}

double green(cplx z, cplx w) {
  if (z == w) throw Error(ErrorKind::InvalidArgument, "Green's function diverges at z = w");
  if (z == cplx(0.0) || w == cplx(0.0)) {
    throw Error(ErrorKind::InvalidArgument, "Green's function needs z, w != 0");
  }
  const cplx uz = z + 1.0 / z;
  const cplx uw = w + 1.0 / w;
  const double den = std::abs(uz - uw);
  if (den == 0.0) throw Error(ErrorKind::InvalidArgument, "points coincide after z + 1/z");
  return std::log(std::abs(uz - std::conj(uw)) / den) / (2.0 * std::numbers::pi);
}

namespace {

double pair_up(std::vector<int>& rest, const std::function<double(int, int)>& cov) {
  if (rest.empty()) return 1.0;
  const int first = rest.front();
  double total = 0.0;
  for (std::size_t j = 1; j < rest.size(); ++j) {
    const int partner = rest[j];
    std::vector<int> next;
    next.reserve(rest.size() - 2);
    for (std::size_t m = 1; m < rest.size(); ++m) {
      if (m != j) next.push_back(rest[m]);
    }
    total += cov(first, partner) * pair_up(next, cov);
  }
  return total;
}

}  // namespace

double wick_sum(int k, const std::function<double(int, int)>& cov) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "wick sum needs k >= 1");
  if (k % 2 == 1) return 0.0;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  return pair_up(idx, cov);
}

double wick_moment(const std::vector<cplx>& omegas) {
  return wick_sum(static_cast<int>(omegas.size()),
                  [&](int i, int j) { return green(omegas[i], omegas[j]); });
}

cplx cross_factor(cplx u, cplx v) {
  const cplx den = v + 1.0 / v - u - 1.0 / u;
  if (den == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "cross factor pole");
  return (1.0 - 1.0 / (u * u)) / (v * den);
}

namespace {

template <class Fn>
CycleResidual sum_cycles(int l, Fn&& edge) {
  // cycles of S_l = cyclic orders starting at element 0
  std::vector<int> order(l - 1);
  for (int i = 0; i < l - 1; ++i) order[i] = i + 1;
  CycleResidual out;
  do {
    cplx prod = 1.0;
    int cur = 0;
    for (int i = 0; i < l; ++i) {
      const int nxt = i < l - 1 ? order[i] : 0;
      prod *= edge(cur, nxt);
      cur = nxt;
    }
    out.residual += prod;
    out.scale += std::abs(prod);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace

CycleResidual cycle_cancellation_check(const std::vector<cplx>& z) {
  const int l = static_cast<int>(z.size());
  if (l < 3) throw Error(ErrorKind::InvalidArgument, "cycle check needs l >= 3");
  for (int i = 0; i < l; ++i) {
    for (int j = i + 1; j < l; ++j) {
      if (std::abs((z[i] + 1.0 / z[i]) - (z[j] + 1.0 / z[j])) == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "singular configuration u_i = u_j");
      }
    }
  }
  return sum_cycles(l, [&](int i, int j) {
    return cross_factor(z[i], z[j]) / d_action_dnu_dz(z[i]);
  });
}

CycleResidual cycle_identity_u(const std::vector<cplx>& u) {
  const int l = static_cast<int>(u.size());
  if (l < 3) throw Error(ErrorKind::InvalidArgument, "cycle check needs l >= 3");
  return sum_cycles(l, [&](int i, int j) { return 1.0 / (u[i] - u[j]); });
}

namespace {

// Unit tangent of a positively oriented contour crossing the descent path at
// the upper saddle: leftward. `g2` is the second derivative of the exponent.
cplx descent_direction(cplx g2) {
  cplx dir = std::polar(1.0, 0.5 * (std::numbers::pi - std::arg(g2)));
  if (dir.real() > 0.0) dir = -dir;
  return dir;
}

}  // namespace

SaddleEstimate saddle_kernel_estimate(const MacroPoint& p1, const MacroPoint& p2, double n,
                                      CrossOrientation orient, PhaseConvention phase) {
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "N must be positive");
  for (const auto* p : {&p1, &p2}) {
    if (!in_domain(*p)) {
      throw Error(ErrorKind::OutOfDomain, "saddle estimate needs interior points");
    }
  }
  SaddleEstimate est;
  est.s1 = saddle_data(p1);
  est.s2 = saddle_data(p2);
  if (std::abs(est.s1.g2) < 1e-6 || std::abs(est.s2.g2) < 1e-6) {
    throw Error(ErrorKind::OutOfDomain, "G'' too small; point too close to the edge");
  }
  const cplx o1 = est.s1.omega, o2 = est.s2.omega;
  auto f = [&](cplx a, cplx b) {
    return orient == CrossOrientation::Direct ? cross_factor(a, b) : cross_factor(b, a);
  };
  const double amp = std::exp(n * (est.s1.g.real() - est.s2.g.real())) /
                     (2.0 * std::numbers::pi * n * std::sqrt(std::abs(est.s1.g2)) *
                      std::sqrt(std::abs(est.s2.g2)));
  if (phase == PhaseConvention::Printed) {
    const cplx e1 = std::polar(1.0, n * est.s1.g.imag() - est.s1.theta);
    const cplx e2 = std::polar(1.0, -n * est.s2.g.imag() - est.s2.theta);
    est.terms[0] = amp * f(o1, o2) * e1 * e2;
    est.terms[1] = amp * f(o1, std::conj(o2)) * e1 * std::conj(e2);
    est.terms[2] = amp * f(std::conj(o1), o2) * std::conj(e1) * e2;
  } else {
    // Each saddle contributes e^{+-N G} sqrt(2 pi / N |G''|) times the unit
    // direction of its descent path; the v-side exponent is -N G_2, so its
    // descent uses -G_2''. A lower saddle is the mirror image of the upper one
    // traversed the other way round, hence -conj. The (1/2 pi i)^2 prefactor
    // gives the overall minus sign.
    const cplx c1 = std::polar(1.0, n * est.s1.g.imag()) * descent_direction(est.s1.g2);
    const cplx c2 = std::polar(1.0, -n * est.s2.g.imag()) * descent_direction(-est.s2.g2);
    est.terms[0] = -amp * f(o1, o2) * c1 * c2;
    est.terms[1] = amp * f(o1, std::conj(o2)) * c1 * std::conj(c2);
    est.terms[2] = amp * f(std::conj(o1), o2) * std::conj(c1) * c2;
  }
  est.terms[3] = std::conj(est.terms[0]);
  cplx sum = 0.0;
  for (const auto& t : est.terms) {
    sum += t;
    est.envelope += std::abs(t);
  }
  est.value = sum.real();
  est.imag = sum.imag();
  return est;
}

}  // namespace gffi
