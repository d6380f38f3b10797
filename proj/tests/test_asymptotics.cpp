#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gffi/asymptotics.hpp"
#include "gffi/error.hpp"

using namespace gffi;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("action basics") {
  const MacroPoint p{0.7, 1.0, 1.0};
  for (cplx z : {cplx(0.3, 0.8), cplx(-1.2, 0.4), cplx(2.0, -0.5)}) {
    // real coefficients: G(conj z) = conj G(z) up to branch, derivatives exactly
    CHECK(std::abs(d_action(p, std::conj(z)) - std::conj(d_action(p, z))) < 1e-12);
    // numerical derivative of G'
    const double h = 1e-6;
    const cplx num = (d_action(p, z + h) - d_action(p, z - h)) / (2 * h);
    CHECK(std::abs(num - d2_action(p, z)) < 1e-6 * (1 + std::abs(num)));
  }
  CHECK(std::abs(d_action_dnu_dz(2.0) - cplx(-0.5, 0)) < 1e-15);
}

TEST_CASE("critical point solves G' = 0 in the upper half plane") {
  for (double tau : {0.5, 1.0, 2.0}) {
    for (double eta : {0.2, 0.7, 1.5}) {
      const auto fb = frozen_boundary(eta, tau);
      for (double f : {0.1, 0.4, 0.8}) {
        const MacroPoint p{fb.q1 + f * (fb.q2 - fb.q1), eta, tau};
        REQUIRE(in_domain(p));
        const cplx w = omega(p);
        CHECK(w.imag() > 0);
        CHECK(std::abs(d_action(p, w)) < 1e-9 * (1 + std::abs(w)));
      }
    }
  }
}

TEST_CASE("omega limits") {
  const cplx w0 = omega({1e-7, 1.0, 1.0});
  CHECK(std::abs(w0 - cplx(0, 1)) < 1e-3);
  const double q2 = frozen_boundary(1.0, 1.0).q2;
  CHECK(std::abs(q2 - 3.3302) < 1e-4);
  const cplx we = omega({q2 * (1 - 1e-8), 1.0, 1.0});
  CHECK(std::abs(we.imag()) < 1e-2);
  CHECK(we.real() > 0);
  CHECK_THROWS_AS(omega({q2 * 1.01, 1.0, 1.0}), Error);
}

TEST_CASE("frozen boundary grid") {
  for (double tau : {0.25, 1.0, 3.0}) {
    for (double eta = 0.05; eta < 3; eta += 0.15) {
      const auto fb = frozen_boundary(eta, tau);
      CHECK(fb.q1 >= 0);
      CHECK(fb.q1 < fb.q2);
    }
  }
  CHECK(frozen_boundary(1.0, 1.0).q1 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("density and angle") {
  const auto fb = frozen_boundary(0.5, 1.0);
  double prev = 1.0, prev_theta = -1;
  for (int i = 1; i < 200; ++i) {
    const MacroPoint p{fb.q1 + (fb.q2 - fb.q1) * i / 200.0, 0.5, 1.0};
    const double d = density(p);
    CHECK(d >= 0);
    CHECK(d <= 1);
    CHECK(d <= prev + 1e-12);
    prev = d;
    const double th = theta(p);
    CHECK(th >= 0);
    CHECK(th < kPi);
    // a direction, so continuity is modulo pi
    if (prev_theta >= 0) {
      const double jump = std::abs(th - prev_theta);
      CHECK(std::min(jump, kPi - jump) < 0.2);
    }
    prev_theta = th;
  }
}

TEST_CASE("green function") {
  CHECK(std::abs(green(cplx(0, 2), cplx(0, 3)) - std::log(25.0 / 7.0) / (2 * kPi)) < 1e-14);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2), v(0.05, 2);
  for (int i = 0; i < 200; ++i) {
    cplx z(u(rng), v(rng)), w(u(rng), v(rng));
    // the relevant points sit in the upper half plane outside the unit disk
    if (std::abs(z) <= 1) z = 1.0 / std::conj(z);
    if (std::abs(w) <= 1) w = 1.0 / std::conj(w);
    const double g = green(z, w);
    CHECK(g > 0);
    CHECK(std::abs(g - green(w, z)) < 1e-14);
  }
  // vanishes on the real axis
  CHECK(std::abs(green(cplx(0.3, 1.0), cplx(1.7, 0.0))) < 1e-14);
}

TEST_CASE("wick sums") {
  auto cov = [](int i, int j) { return 1.0 + i + j + i * j; };
  CHECK(wick_sum(3, cov) == 0.0);
  CHECK(wick_sum(2, cov) == cov(0, 1));
  CHECK(wick_sum(4, cov) == doctest::Approx(cov(0, 1) * cov(2, 3) + cov(0, 2) * cov(1, 3) +
                                            cov(0, 3) * cov(1, 2)));
  const std::vector<cplx> om = {{0.1, 0.5}, {0.7, 0.9}, {-0.4, 1.3}, {1.2, 0.3}};
  const double expect = wick_sum(4, [&](int i, int j) { return green(om[i], om[j]); });
  CHECK(std::abs(wick_moment(om) - expect) < 1e-14);
  CHECK(wick_moment({om[0], om[1], om[2]}) == 0.0);
}

TEST_CASE("cycle cancellation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2), v(0.1, 2);
  for (int k = 3; k <= 6; ++k) {
    std::vector<cplx> pts;
    for (int i = 0; i < k; ++i) pts.emplace_back(u(rng), v(rng));
    CHECK(cycle_cancellation_check(pts).relative() < 1e-10);
    CHECK(cycle_identity_u(pts).relative() < 1e-10);
  }
}

TEST_CASE("saddle estimate") {
  const MacroPoint p{0.7, 1.0, 1.0};
  const auto same = saddle_kernel_estimate(p, p, 40);
  CHECK(std::abs(same.imag) <= 1e-9 * (1 + same.envelope));
  CHECK(std::abs(same.value) <= same.envelope + 1e-12);
  const auto cross = saddle_kernel_estimate(p, {1.0, 1.05, 1.0}, 40);
  CHECK(std::abs(cross.imag) <= 1e-9 * (1 + cross.envelope));
  CHECK_THROWS_AS(saddle_kernel_estimate(p, {10.0, 1.0, 1.0}, 40), Error);
}
