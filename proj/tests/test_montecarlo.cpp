#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gffi/error.hpp"
#include "gffi/lattice.hpp"
#include "gffi/montecarlo.hpp"

using namespace gffi;

namespace {
ObservationPlan small_plan() {
  ObservationPlan plan;
  plan.N = 12;
  plan.probes = {{0.3, 0.5}, {0.8, 0.5}};
  plan.runs = 2000;
  plan.seed = 99;
  return plan;
}
}  // namespace

TEST_CASE("probe mapping") {
  const auto lp = map_probe({0.3, 0.5}, 48, 1.0);
  CHECK(lp.x == 14);
  CHECK(lp.n == 24);
  CHECK(lp.level == 47);
  CHECK(lp.macro.nu == doctest::Approx(14.0 / 48));
  CHECK(lp.macro.eta == doctest::Approx(0.5));
}

TEST_CASE("plan validation") {
  auto plan = small_plan();
  plan.runs = 0;
  CHECK_THROWS_AS(validate(plan), Error);
  plan = small_plan();
  plan.batches = 5;
  CHECK_THROWS_AS(validate(plan), Error);
  plan = small_plan();
  plan.probes.clear();
  CHECK_THROWS_AS(validate(plan), Error);
  plan = small_plan();
  plan.probes = {{50.0, 0.5}};
  CHECK_THROWS_AS(validate(plan), Error);
  plan = small_plan();
  plan.runs = 0;
  CHECK_THROWS_AS(gff_comparison_report(plan), Error);
}

TEST_CASE("moments") {
  const auto s = sample_heights(small_plan());
  CHECK(central_moment(s, {0}).value == 0.0);
  CHECK(central_moment(s, {1}).value == 0.0);
  const auto c01 = central_moment(s, {0, 1});
  const auto c10 = central_moment(s, {1, 0});
  CHECK(c01.value == doctest::Approx(c10.value).epsilon(1e-12));
  CHECK(c01.std_error > 0);
  CHECK(central_moment(s, {0, 0}).value > 0);
}

TEST_CASE("thread count does not change results") {
  const auto a = sample_heights(small_plan(), 1);
  const auto b = sample_heights(small_plan(), 3);
  CHECK(a.h == b.h);
  CHECK(a.events == b.events);
}

TEST_CASE("standard error shrinks like 1/sqrt(runs)") {
  auto plan = small_plan();
  plan.runs = 4000;
  plan.batches = 100;
  const auto s1 = sample_heights(plan);
  plan.runs = 8000;
  plan.seed = 100;
  const auto s2 = sample_heights(plan);
  const double r = central_moment(s2, {0, 1}, 100).std_error / central_moment(s1, {0, 1}, 100).std_error;
  CHECK(r == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("t = 0 profile is the packed state") {
  const auto prof = estimate_density_profile(5, 0.0, 0, 5, 50, 1);
  const auto packed = packed_configuration(5);
  for (const auto& f : prof) CHECK(f.freq == (packed.occupied(f.x, 5) ? 1.0 : 0.0));
}

TEST_CASE("type I lozenge frequency equals occupation frequency") {
  const auto prof = estimate_density_profile(4, 1.0, 2, 2, 3000, 17);
  const auto lz = estimate_lozenge_frequencies({{{2, 4, LozengeType::I}}}, 1.0, 3000, 17);
  CHECK(lz[0].freq == doctest::Approx(prof[0].freq));
}

TEST_CASE("report structure") {
  auto plan = small_plan();
  plan.probes = {{0.2, 0.5}, {0.5, 0.5}, {0.8, 0.5}, {1.1, 0.5}};
  const auto rep = gff_comparison_report(plan);
  CHECK(rep.pairs.size() == 6);
  CHECK(rep.third.size() == 4);
  REQUIRE(rep.fourth.size() == 1);
  std::vector<cplx> om;
  for (const auto& p : plan.probes) om.push_back(omega(map_probe(p, plan.N, plan.tau).macro));
  CHECK(rep.fourth[0].prediction == doctest::Approx(wick_moment(om)));
  nlohmann::json j = rep;
  CHECK(j.contains("pairs"));
  std::ostringstream a, b;
  write_pairs_csv(a, rep);
  write_pairs_csv(b, gff_comparison_report(plan, 2));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("nu1,eta1,nu2,eta2,cov_hat,se,prediction,zscore", 0) == 0);
}
