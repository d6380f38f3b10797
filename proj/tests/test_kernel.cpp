#include <doctest.h>

#include <cmath>

#include "gffi/dynamics.hpp"
#include "gffi/error.hpp"
#include "gffi/kernel.hpp"
#include "gffi/montecarlo.hpp"

using namespace gffi;

namespace {
LevelIndex lv(int ell) { return LevelIndex::from_linear(ell); }
}  // namespace

TEST_CASE("t = 0 reproduces the packed indicator") {
  const auto packed = packed_configuration(4);
  for (int ell = 1; ell <= 4; ++ell) {
    for (int s = 0; s <= 10; ++s) {
      const double k = kernel(ell, s, ell, s, 0.0);
      CHECK(std::abs(k - (packed.occupied(s, ell) ? 1.0 : 0.0)) < 1e-6);
    }
  }
  CHECK(std::abs(kernel_value({{1, Shift::Minus}, 0, {1, Shift::Minus}, 0, 0.0}).value - 1.0) < 1e-6);
  CHECK(std::abs(kernel_value({{1, Shift::Minus}, 2, {1, Shift::Minus}, 2, 0.0}).value) < 1e-6);
}

TEST_CASE("diagonal values are probabilities") {
  for (double t : {0.5, 1.0, 2.0}) {
    for (int ell = 1; ell <= 5; ++ell) {
      for (int s = 0; s <= 6; ++s) {
        const double k = kernel(ell, s, ell, s, t);
        CHECK(k > -1e-9);
        CHECK(k < 1 + 1e-9);
      }
    }
  }
}

TEST_CASE("contour radius invariance") {
  for (auto [l1, s1, l2, s2] : {std::array{1, 0, 1, 2}, std::array{3, 1, 2, 0}, std::array{4, 2, 4, 3},
                                std::array{2, 3, 5, 1}}) {
    QuadratureSpec base;
    base.v_radius = 1.1;
    const double ref = kernel_value({lv(l1), s1, lv(l2), s2, 1.0}, base).value;
    for (double r : {1.25, 1.4, 1.6}) {
      QuadratureSpec spec;
      spec.v_radius = r;
      const double v = kernel_value({lv(l1), s1, lv(l2), s2, 1.0}, spec).value;
      CHECK(std::abs(v - ref) <= 1e-8 * (1 + std::abs(ref)));
    }
    // the automatic contour choice agrees too
    CHECK(std::abs(kernel(l1, s1, l2, s2, 1.0) - ref) <= 1e-8 * (1 + std::abs(ref)));
  }
}

TEST_CASE("node halving is below tolerance at convergence") {
  const KernelResult r = kernel_value({lv(3), 2, lv(2), 1, 1.5});
  CHECK(r.last_change < 1e-9 * (1 + std::abs(r.value)));
  CHECK(r.imag_residue < 1e-9 * (1 + std::abs(r.value)));
}

TEST_CASE("spec and query validation") {
  QuadratureSpec bad;
  bad.v_radius = 0.9;
  CHECK_THROWS_AS(validate(bad), Error);
  QuadratureSpec odd;
  odd.nodes = 100;
  CHECK_THROWS_AS(validate(odd), Error);
  CHECK_THROWS_AS(kernel_value({lv(1), -1, lv(1), 0, 1.0}), Error);
  CHECK_THROWS_AS(kernel_value({lv(1), 0, lv(1), 0, -1.0}), Error);
}

TEST_CASE("conjugation factors") {
  CHECK(conjugation_factor({1, Shift::Minus}, 0) == 1.0);
  CHECK(conjugation_factor({1, Shift::Plus}, 1) == 2.0);
  CHECK(conjugation({3, Shift::Plus}, 4, {3, Shift::Plus}, 4) == 1.0);
  CHECK(conjugation({2, Shift::Minus}, 1, {1, Shift::Minus}, 0) ==
        conjugation_factor({2, Shift::Minus}, 1) / conjugation_factor({1, Shift::Minus}, 0));
}

TEST_CASE("determinants") {
  const std::vector<SitePoint> pts = {{lv(3), 2}, {lv(3), 0}, {lv(2), 1}};
  CHECK(std::abs(correlation_det({pts[0]}, 1.0) - kernel(3, 2, 3, 2, 1.0)) < 1e-15);
  const double d = correlation_det(pts, 1.0);
  const double dc = correlation_det_conjugated(pts, 1.0);
  CHECK(std::abs(d - dc) < 1e-8);
  CHECK(std::abs(correlation_det_unchecked({pts[0], pts[0]}, 1.0)) < 1e-12);
  CHECK_THROWS_AS(correlation_det({pts[0], pts[0]}, 1.0), Error);
  CHECK(std::abs(determinant({1, 2, 3, 4}, 2) - (-2.0)) < 1e-15);
  CHECK(std::abs(determinant({0, 1, 1, 0}, 2) - (-1.0)) < 1e-15);
}

TEST_CASE("lozenge probabilities") {
  // type I reduces to the one-point function
  const double p = lozenge_probability({{3, 4, LozengeType::I}}, 1.0);
  CHECK(std::abs(p - kernel(4, 3, 4, 3, 1.0)) < 1e-10);
  try {
    lozenge_probability({{2, 3, LozengeType::II}, {3, 3, LozengeType::III}}, 1.0);
    FAIL("expected InvalidPattern");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidPattern);
  }
  CHECK_THROWS_AS(lozenge_probability({{1, 3, LozengeType::II}}, 1.0), Error);
  // the three lozenges at one white triangle are exhaustive
  for (auto [x, ell] : {std::pair{3, 3}, std::pair{3, 4}, std::pair{4, 5}}) {
    double total = 0.0;
    for (auto t : {LozengeType::I, LozengeType::II, LozengeType::III}) {
      total += lozenge_probability({{x, ell, t}}, 1.5);
    }
    CHECK(std::abs(total - 1.0) < 1e-8);
  }
}

TEST_CASE("triangle identities and far-right limits") {
  std::vector<TriangleSample> samples = {{3, 2, 3, 2}, {3, 2, 5, 4}, {4, 5, 2, 3}, {6, 6, 6, 6}, {2, 7, 9, 3}};
  for (double t : {0.5, 2.0}) {
    const auto rep = check_triangle_identities(samples, t);
    CHECK(rep.evaluated == 5);
    CHECK(rep.max_residual() < 1e-6);
  }
  const auto rows = check_far_right_limits({1, Shift::Minus}, 1.0, {10, 20, 40});
  REQUIRE(rows.size() == 3);
  CHECK(std::abs(rows[2].type_iii - 1.0) < 0.05);
  CHECK(std::abs(rows[2].type_ii) < 0.05);
  CHECK(std::abs(rows[2].type_ii) <= std::abs(rows[0].type_ii) + 1e-12);
  for (const auto& r : check_far_right_limits({2, Shift::Minus}, 0.0, {6, 8})) {
    CHECK(std::abs(r.type_ii) < 1e-6);
    CHECK(std::abs(r.type_iii - 1.0) < 1e-6);
  }
}

TEST_CASE("one- and two-point functions against the simulator") {
  constexpr std::int64_t runs = 60000;
  std::vector<std::vector<LatticePoint>> sets;
  std::vector<double> pred;
  for (int s = 0; s <= 3; ++s) {
    sets.push_back({{s, 3}});
    pred.push_back(kernel(3, s, 3, s, 1.0));
  }
  sets.push_back({{1, 3}, {0, 3}});
  pred.push_back(correlation_det({{lv(3), 1}, {lv(3), 0}}, 1.0));
  const auto f = estimate_site_frequencies(sets, 1.0, runs, 321);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double se = std::max(f[i].std_error, 1.0 / runs);
    CHECK(std::abs(f[i].freq - pred[i]) < 4 * se);
  }
  const auto lz = estimate_lozenge_frequencies({{{2, 3, LozengeType::II}}}, 1.0, runs, 322);
  const double det = lozenge_probability({{2, 3, LozengeType::II}}, 1.0);
  CHECK(std::abs(lz[0].freq - det) < 4 * std::max(lz[0].std_error, 1.0 / runs));
}
