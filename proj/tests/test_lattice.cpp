#include <doctest.h>

#include <random>

#include "gffi/dynamics.hpp"
#include "gffi/error.hpp"
#include "gffi/lattice.hpp"

using namespace gffi;

TEST_CASE("level index bookkeeping") {
  for (int ell = 1; ell <= 40; ++ell) {
    const LevelIndex lv = LevelIndex::from_linear(ell);
    CHECK(lv.linear() == ell);
    CHECK(lv.count() == (ell + 1) / 2);
    CHECK(lv.delta() == (ell % 2 == 0 ? 1 : 0));
    CHECK(level_delta(ell) == lv.delta());
  }
  CHECK(LevelIndex{3, Shift::Minus}.linear() == 5);
  CHECK(LevelIndex{3, Shift::Plus}.linear() == 6);
  CHECK(dominates({2, Shift::Plus}, {2, Shift::Minus}));
  CHECK_FALSE(dominates({2, Shift::Minus}, {2, Shift::Plus}));
  CHECK_THROWS_AS(LevelIndex::from_linear(0), Error);
  CHECK(total_particles(3) == 4);
}

TEST_CASE("intro coordinates") {
  auto [l1, s1] = intro_to_internal(1, 0);
  CHECK(l1 == LevelIndex{1, Shift::Minus});
  CHECK(s1 == 0);
  auto [l2, s2] = intro_to_internal(2, 1);
  CHECK(l2 == LevelIndex{1, Shift::Plus});
  CHECK(s2 == 0);
  // two-step lattice: y = 2s on odd levels
  auto [l5, s5] = intro_to_internal(5, 4);
  CHECK(l5 == LevelIndex{3, Shift::Minus});
  CHECK(s5 == 2);

  try {
    intro_to_internal(2, 0);
    FAIL("expected a wall violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WallViolation);
  }
  CHECK_THROWS_AS(intro_to_internal(3, 1), Error);  // parity

  for (int m = 1; m <= 20; ++m) {
    for (int y = m % 2 == 0 ? 1 : 0; y <= 40; y += 2) {
      auto [lv, s] = intro_to_internal(m, y);
      CHECK(internal_to_intro(lv, s) == std::pair{m, y});
    }
  }
}

TEST_CASE("packed configuration") {
  CHECK(packed_configuration(1).levels() == std::vector<std::vector<int>>{{0}});
  const auto p5 = packed_configuration(5);
  CHECK(std::vector<int>(p5.level(5).begin(), p5.level(5).end()) == std::vector<int>{2, 1, 0});
  const auto p4 = packed_configuration(4);
  CHECK(std::vector<int>(p4.level(4).begin(), p4.level(4).end()) == std::vector<int>{1, 0});
  CHECK(check_interlacing(packed_configuration(6)).empty());
  // intro picture: y^m_k = m - 2k + 1
  for (int m = 1; m <= 9; ++m) {
    const auto p = packed_configuration(m);
    for (int k = 1; k <= level_count(m); ++k) {
      CHECK(internal_to_intro(LevelIndex::from_linear(m), p.position(m, k)).second == m - 2 * k + 1);
    }
  }
}

TEST_CASE("configuration construction and json") {
  CHECK_THROWS_AS(ParticleConfiguration({{0}, {0, 1}}), Error);
  CHECK_THROWS_AS(ParticleConfiguration({{0}, {0}, {0, 1}}), Error);
  const auto p = packed_configuration(5);
  nlohmann::json j = p;
  CHECK(j.dump() == R"({"levels":[[0],[0],[1,0],[1,0],[2,1,0]]})");
  CHECK(j.get<ParticleConfiguration>() == p);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"lv":[]})").get<ParticleConfiguration>(), Error);
}

TEST_CASE("interlacing checks") {
  CHECK(check_interlacing(ParticleConfiguration({{0}, {0}})).empty());
  // delta_2 = 1 needs s^2_1 < s^3_1 strictly
  CHECK_FALSE(check_interlacing(ParticleConfiguration({{0}, {1}, {1, 0}})).empty());
  CHECK(check_interlacing(ParticleConfiguration({{0}, {1}, {2, 0}})).empty());
  CHECK_FALSE(check_interlacing(ParticleConfiguration(std::vector<std::vector<int>>{{-1}})).empty());
  CHECK_FALSE(check_interlacing(ParticleConfiguration({{2}, {1}})).empty());
}

TEST_CASE("heights") {
  const auto p5 = packed_configuration(5);
  CHECK(height(p5, 1, 5) == 1);
  CHECK(height(p5, 2, 5) == 0);
  CHECK(height(p5, -1, 5) == 3);
}

TEST_CASE("lozenge indicators on the packed state") {
  const auto p3 = packed_configuration(3);
  CHECK(lozenge_indicator(p3, 0, 1, LozengeType::I) == 1);
  CHECK(lozenge_indicator(p3, 0, 2, LozengeType::II) == 0);
  CHECK(lozenge_indicator(p3, 1, 3, LozengeType::III) == 0);
  CHECK(lozenge_indicator(p3, 1, 3, LozengeType::I) == 1);
  CHECK_THROWS_AS(lozenge_indicator(p3, 0, 1, LozengeType::II), Error);
}

TEST_CASE("pattern validation") {
  CHECK_NOTHROW(validate_pattern({{2, 3, LozengeType::II}, {4, 3, LozengeType::III}}));
  // both map to the black triangle (2, 2)
  try {
    validate_pattern({{2, 3, LozengeType::II}, {3, 3, LozengeType::III}});
    FAIL("expected InvalidPattern");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidPattern);
  }
  CHECK_THROWS_AS(validate_pattern({{2, 3, LozengeType::I}, {2, 3, LozengeType::II}}), Error);
  CHECK(lozenge_type_from_string("III") == LozengeType::III);
  CHECK_THROWS_AS(lozenge_type_from_string("IV"), Error);
}

namespace {

// Black triangles sit at (x, ell) for 1 <= ell < top; each is covered by
// exactly one lozenge: type I at the same place, or a type II/III lozenge
// whose white triangle is on the level above.
void check_tiling(const ParticleConfiguration& cfg) {
  const int top = cfg.max_level();
  const int width = cfg.level(top)[0] + 3;
  for (int ell = 1; ell <= top; ++ell) {
    for (int x = 0; x <= width; ++x) {
      int ones = lozenge_indicator(cfg, x, ell, LozengeType::I);
      if (ell >= 2) {
        ones += lozenge_indicator(cfg, x, ell, LozengeType::II) +
                lozenge_indicator(cfg, x, ell, LozengeType::III);
        REQUIRE(ones == 1);
      }
    }
  }
  for (int ell = 1; ell < top; ++ell) {
    for (int x = 1; x <= width - 2; ++x) {
      int covers = lozenge_indicator(cfg, x, ell, LozengeType::I);
      const int d = level_delta(ell);
      // whites (x - 1 + d, ell + 1) type II and (x + d, ell + 1) type III
      if (x - 1 + d >= 0) covers += lozenge_indicator(cfg, x - 1 + d, ell + 1, LozengeType::II);
      covers += lozenge_indicator(cfg, x + d, ell + 1, LozengeType::III);
      REQUIRE(covers == 1);
    }
  }
}

}  // namespace

TEST_CASE("sampled states: interlacing, tiling and height decomposition") {
  constexpr int M = 8;
  SimState st(M, 99, 0);
  int states = 0;
  for (int step = 0; step < 20000; ++step) {
    const Event ev = st.next_event();
    if (ev.dir == Direction::Right) {
      st.attempt_right(ev.level, ev.k);
    } else {
      st.attempt_left(ev.level, ev.k);
    }
    const auto cfg = st.configuration();
    REQUIRE(check_interlacing(cfg).empty());
    ++states;
    if (step % 200 == 0) {
      check_tiling(cfg);
      for (int ell = 1; ell < M; ++ell) {
        for (int ell2 = ell + 1; ell2 <= M; ++ell2) {
          for (int x = -1; x <= cfg.level(M)[0] + 2; ++x) {
            REQUIRE(height_decomposition_check(cfg, x, ell, ell2) == 0);
          }
        }
      }
    }
  }
  CHECK(states >= 10000);
  const auto p6 = packed_configuration(6);
  for (int ell = 1; ell < 6; ++ell)
    for (int ell2 = ell + 1; ell2 <= 6; ++ell2)
      for (int x = -1; x <= 5; ++x) CHECK(height_decomposition_check(p6, x, ell, ell2) == 0);
}
