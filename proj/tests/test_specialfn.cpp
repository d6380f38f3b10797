#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gffi/error.hpp"
#include "gffi/specialfn.hpp"

using namespace gffi;
using std::numbers::pi;

TEST_CASE("jacobi examples") {
  CHECK(std::abs(jacobi(Shift::Minus, 0, cplx(0.3, 2.0)) - 1.0) < 1e-15);
  CHECK(std::abs(jacobi(Shift::Minus, 2, std::polar(1.0, pi / 3)) - (-0.5)) < 1e-14);
  CHECK(std::abs(jacobi(Shift::Plus, 1, 1.0) - 3.0) < 1e-14);
  CHECK(std::abs(jacobi(Shift::Plus, 1, cplx(1.0 + 1e-6, 0.0)) - 3.0) < 1e-5);
  CHECK_THROWS_AS(jacobi(Shift::Minus, 1, 0.0), Error);
  CHECK_THROWS_AS(jacobi(Shift::Plus, -1, 2.0), Error);
}

TEST_CASE("jacobi against trigonometric forms on the circle") {
  // cos(s th) and sin((s + 1/2) th) / sin(th / 2)
  for (int s = 0; s <= 25; ++s) {
    for (double th : {0.1, 0.7, 1.9, 3.0, 4.4, 6.0}) {
      const cplx z = std::polar(1.0, th);
      const cplx jm = jacobi(Shift::Minus, s, z);
      const cplx jp = jacobi(Shift::Plus, s, z);
      CHECK(std::abs(jm.real() - std::cos(s * th)) < 1e-12);
      CHECK(std::abs(jp.real() - std::sin((s + 0.5) * th) / std::sin(0.5 * th)) < 1e-10);
      CHECK(std::abs(jm.imag()) <= 1e-12);
      CHECK(std::abs(jp.imag()) <= 1e-12 * (1 + std::abs(jp)));
    }
  }
}

TEST_CASE("jacobi symmetry under z -> 1/z") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.5, 1.8), a(0.0, 2 * pi);
  for (int i = 0; i < 200; ++i) {
    const cplx z = std::polar(r(rng), a(rng));
    for (int s = 0; s <= 12; ++s) {
      for (Shift sh : {Shift::Minus, Shift::Plus}) {
        const cplx lhs = jacobi(sh, s, z), rhs = jacobi(sh, s, 1.0 / z);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("weights and measures") {
  CHECK(weight(Shift::Minus, 0) == 1.0);
  CHECK(weight(Shift::Minus, 3) == 2.0);
  CHECK(weight(Shift::Plus, 7) == 1.0);
  CHECK_THROWS_AS(weight(Shift::Plus, -1), Error);
  CHECK(measure_density(Shift::Minus, 1.234) == 0.5);
  CHECK(std::abs(measure_density(Shift::Plus, pi) - 1.0) < 1e-15);
  CHECK(measure_density(Shift::Plus, 0.0) == 0.0);
}

TEST_CASE("orthogonality") {
  constexpr int kNodes = 128;
  for (Shift a : {Shift::Minus, Shift::Plus}) {
    for (int s1 = 0; s1 <= 20; ++s1) {
      for (int s2 = 0; s2 <= 20; ++s2) {
        double sum = 0.0;
        for (int i = 0; i < kNodes; ++i) {
          const double th = 2 * pi * i / kNodes;
          const cplx z = std::polar(1.0, th);
          sum += (jacobi(a, s1, z) * jacobi(a, s2, z)).real() * measure_density(a, th);
        }
        const double val = weight(a, s1) / pi * sum * 2 * pi / kNodes;
        CHECK(std::abs(val - (s1 == s2 ? 1.0 : 0.0)) < 1e-8);
      }
    }
  }
}
