#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gffi/dynamics.hpp"
#include "gffi/error.hpp"

using namespace gffi;

namespace {

std::vector<int> level_vec(const ParticleConfiguration& c, int ell) {
  auto lv = c.level(ell);
  return {lv.begin(), lv.end()};
}

}  // namespace

TEST_CASE("next_event rates and direction") {
  for (auto [M, mean] : {std::pair{1, 1.0}, std::pair{3, 0.25}}) {
    SimState st(M, 11, 0);
    constexpr int n = 100000;
    double sum = 0.0, sq = 0.0;
    int right = 0;
    for (int i = 0; i < n; ++i) {
      const Event ev = st.next_event();
      sum += ev.dt;
      sq += ev.dt * ev.dt;
      if (ev.dir == Direction::Right) ++right;
      REQUIRE(ev.level >= 1);
      REQUIRE(ev.level <= M);
    }
    const double m = sum / n;
    const double se = std::sqrt((sq / n - m * m) / n);
    CHECK(std::abs(m - mean) < 4 * se);
    const double p = static_cast<double>(right) / n;
    CHECK(std::abs(p - 0.5) < 4 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("attempt_right pushes the whole column from the packed state") {
  constexpr int M = 9;
  SimState st(M, 1, 0);
  std::vector<Moved> moved;
  const int n = st.attempt_right(5, 1, &moved);
  CHECK(n == M - 4);
  for (int ell = 5; ell <= M; ++ell) {
    CHECK(st.at(ell, 1) == packed_configuration(M).position(ell, 1) + 1);
  }
  CHECK(check_interlacing(st.configuration()).empty());
}

TEST_CASE("blocking and reflection") {
  SimState st(4, 1, 0);
  // level 2 particle at s=0 is pinned by the wall
  CHECK(st.attempt_left(2, 1) == 0);
  CHECK(st.configuration() == packed_configuration(4));
  // level 1 particle reflects and pushes levels 2..4
  std::vector<Moved> moved;
  CHECK(st.attempt_left(1, 1, &moved) == 4);
  CHECK(st.at(1, 1) == 1);
  CHECK(moved.front().to == 1);

  // blocked on the right by the particle below and to the right
  SimState b(3, 1, 0);
  b.set_configuration(ParticleConfiguration({{1}, {1}, {2, 1}}));
  CHECK(b.attempt_right(3, 2) == 0);
  CHECK(b.attempt_right(3, 1) == 1);
  CHECK(b.at(3, 1) == 3);

  // isolated particle moves one step left
  SimState c(1, 1, 0);
  c.set_configuration(ParticleConfiguration(std::vector<std::vector<int>>{{5}}));
  CHECK(c.attempt_left(1, 1) == 1);
  CHECK(c.at(1, 1) == 4);

  SimState single(1, 1, 0);
  CHECK(single.attempt_right(1, 1) == 1);
  CHECK(single.at(1, 1) == 1);

  CHECK_THROWS_AS(c.set_configuration(ParticleConfiguration({{0}, {0}})), Error);
}

TEST_CASE("right-only dynamics is monotone") {
  SimState st(10, 3, 0);
  st.set_right_only(true);
  auto prev = st.configuration();
  for (int i = 1; i <= 50; ++i) {
    st.advance_to(0.1 * i);
    const auto cur = st.configuration();
    for (int ell = 1; ell <= 10; ++ell) {
      for (int k = 1; k <= level_count(ell); ++k) {
        REQUIRE(cur.position(ell, k) >= prev.position(ell, k));
      }
    }
    prev = cur;
  }
}

TEST_CASE("single particle matches an independent reflected walk") {
  // jumps at rate 1, fair direction, left at 0 turned into right
  constexpr int runs = 40000;
  constexpr double t = 3.0;
  int zero_sim = 0, zero_ref = 0;
  std::mt19937 ref(12345);
  std::exponential_distribution<double> wait(1.0);
  std::bernoulli_distribution coin(0.5);
  for (int r = 0; r < runs; ++r) {
    SimState st(1, 77, static_cast<std::uint64_t>(r));
    st.advance_to(t);
    if (st.at(1, 1) == 0) ++zero_sim;
    int x = 0;
    for (double clock = wait(ref); clock <= t; clock += wait(ref)) {
      if (coin(ref) || x == 0) {
        ++x;
      } else {
        --x;
      }
    }
    if (x == 0) ++zero_ref;
  }
  const double p1 = static_cast<double>(zero_sim) / runs, p2 = static_cast<double>(zero_ref) / runs;
  const double se = std::sqrt(p1 * (1 - p1) / runs + p2 * (1 - p2) / runs);
  CHECK(std::abs(p1 - p2) < 4 * se);
}

TEST_CASE("truncation does not change lower levels in law") {
  constexpr int runs = 20000;
  double m3 = 0, q3 = 0, m7 = 0, q7 = 0;
  for (int r = 0; r < runs; ++r) {
    SimState a(3, 5, static_cast<std::uint64_t>(r));
    a.advance_to(2.0);
    SimState b(7, 6, static_cast<std::uint64_t>(r));
    b.advance_to(2.0);
    const double ha = a.height(0, 3) + a.at(2, 1), hb = b.height(0, 3) + b.at(2, 1);
    m3 += ha;
    q3 += ha * ha;
    m7 += hb;
    q7 += hb * hb;
  }
  m3 /= runs;
  m7 /= runs;
  const double se = std::sqrt((q3 / runs - m3 * m3 + q7 / runs - m7 * m7) / runs);
  CHECK(std::abs(m3 - m7) < 4 * se);
}

TEST_CASE("simulate: packed start, determinism, validation") {
  SimPlan plan;
  plan.max_level = 5;
  plan.t_end = 0.0;
  plan.trajectories = 2;
  plan.probes = {{Probe::Kind::Height, 1, 5, LozengeType::I}};
  auto rec = simulate(plan);
  CHECK(rec.finals[0] == packed_configuration(5));
  CHECK(rec.rows.at(0).value == 1);

  plan.max_level = 6;
  plan.t_end = 2.0;
  plan.seed = 42;
  plan.trajectories = 16;
  plan.sample_times = {0.5, 1.0, 2.0};
  plan.probes = {{Probe::Kind::Height, 1, 5, LozengeType::I},
                 {Probe::Kind::Lozenge, 2, 4, LozengeType::II},
                 {Probe::Kind::Lozenge, 0, 1, LozengeType::I}};
  std::ostringstream a, b, c;
  write_csv(a, simulate(plan, 1));
  write_csv(b, simulate(plan, 1));
  write_csv(c, simulate(plan, 3));
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  CHECK(a.str().rfind("trajectory_id,time,probe_id,value\n", 0) == 0);

  plan.probes = {{Probe::Kind::Height, 0, 7, LozengeType::I}};
  try {
    simulate(plan);
    FAIL("expected cutoff error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("level cutoff") != std::string::npos);
  }
  nlohmann::json j = SimPlan{};
  CHECK(j.contains("max_level"));
}

TEST_CASE("advance_to keeps interlacing and counts events") {
  SimState st(12, 8, 3);
  st.advance_to(4.0);
  CHECK(st.time() == 4.0);
  CHECK(st.events() > 0);
  CHECK(check_interlacing(st.configuration()).empty());
  st.advance_to(3.0);  // no-op backwards
  CHECK(st.time() == 4.0);
  CHECK(level_vec(st.configuration(), 1).size() == 1);
}
