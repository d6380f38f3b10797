#include "gffi/lattice.hpp"

#include <algorithm>
#include <set>

#include "gffi/error.hpp"

namespace gffi {

LevelIndex LevelIndex::from_linear(int ell) {
  if (ell < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "level index must be >= 1, got " + std::to_string(ell));
  }
  return LevelIndex{(ell + 1) / 2, ell % 2 == 1 ? Shift::Minus : Shift::Plus};
}

std::int64_t total_particles(int max_level) {
  std::int64_t total = 0;
  for (int ell = 1; ell <= max_level; ++ell) total += level_count(ell);
  return total;
}

ParticleConfiguration::ParticleConfiguration(
    std::vector<std::vector<int>> levels)
    : levels_(std::move(levels)) {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const int ell = static_cast<int>(i) + 1;
    const auto& lv = levels_[i];
    if (static_cast<int>(lv.size()) != level_count(ell)) {
      throw Error(ErrorKind::InvalidArgument,
                  "level " + std::to_string(ell) + " must hold " +
                      std::to_string(level_count(ell)) + " particles");
    }
    for (std::size_t k = 1; k < lv.size(); ++k) {
      if (lv[k] >= lv[k - 1]) {
        throw Error(ErrorKind::InvalidArgument,
                    "positions on level " + std::to_string(ell) +
                        " must be strictly decreasing");
      }
    }
  }
}

std::span<const int> ParticleConfiguration::level(int ell) const {
  if (ell < 1 || ell > max_level()) {
    throw Error(ErrorKind::InvalidArgument,
                "level " + std::to_string(ell) + " outside 1.." +
                    std::to_string(max_level()));
  }
  return levels_[ell - 1];
}

bool ParticleConfiguration::occupied(int x, int ell) const {
  auto lv = level(ell);
  return std::find(lv.begin(), lv.end(), x) != lv.end();
}

void to_json(nlohmann::json& j, const ParticleConfiguration& cfg) {
  j = nlohmann::json{{"levels", cfg.levels()}};
}

void from_json(const nlohmann::json& j, ParticleConfiguration& cfg) {
  if (!j.is_object() || !j.contains("levels") || !j["levels"].is_array()) {
    throw Error(ErrorKind::Schema, "configuration needs a \"levels\" array");
  }
  std::vector<std::vector<int>> levels;
  for (const auto& lv : j["levels"]) {
    if (!lv.is_array()) {
      throw Error(ErrorKind::Schema, "each level must be an array");
    }
    std::vector<int> row;
    for (const auto& s : lv) {
      if (!s.is_number_integer()) {
        throw Error(ErrorKind::Schema, "positions must be integers");
      }
      row.push_back(s.get<int>());
    }
    levels.push_back(std::move(row));
  }
  cfg = ParticleConfiguration(std::move(levels));
}

std::pair<LevelIndex, int> intro_to_internal(int m, int y) {
  if (m < 1) {
    throw Error(ErrorKind::InvalidArgument, "intro level must be >= 1");
  }
  const int shift = m % 2 == 0 ? 1 : 0;
  if (y < shift) {
    throw Error(ErrorKind::WallViolation,
                "y=" + std::to_string(y) + " is left of the wall on level " +
                    std::to_string(m));
  }
  if ((y - shift) % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "y=" + std::to_string(y) + " has the wrong parity for level " +
                    std::to_string(m));
  }
  return {LevelIndex::from_linear(m), (y - shift) / 2};
}

std::pair<int, int> internal_to_intro(const LevelIndex& level, int s) {
  if (s < 0) throw Error(ErrorKind::WallViolation, "s must be >= 0");
  return {level.linear(), 2 * s + level.delta()};
}

std::vector<InterlacingViolation> check_interlacing(
    const ParticleConfiguration& cfg) {
  std::vector<InterlacingViolation> out;
  for (int ell = 1; ell <= cfg.max_level(); ++ell) {
    auto lv = cfg.level(ell);
    for (std::size_t k = 0; k < lv.size(); ++k) {
      if (lv[k] < 0) {
        out.push_back({ell, static_cast<int>(k) + 1, "left of the wall"});
      }
    }
  }
  for (int ell = 1; ell < cfg.max_level(); ++ell) {
    auto lo = cfg.level(ell);
    auto hi = cfg.level(ell + 1);
    const bool strict_upper = level_delta(ell) == 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      const int s = lo[i];
      if (strict_upper ? !(s < hi[i]) : !(s <= hi[i])) {
        out.push_back({ell + 1, k, "upper bound s_k(l+1) violated"});
      }
      if (i + 1 < hi.size()) {
        if (strict_upper ? !(hi[i + 1] <= s) : !(hi[i + 1] < s)) {
          out.push_back({ell + 1, k + 1, "lower bound s_{k+1}(l+1) violated"});
        }
      }
    }
  }
  return out;
}

ParticleConfiguration packed_configuration(int max_level) {
  if (max_level < 1) {
    throw Error(ErrorKind::InvalidArgument, "max level must be >= 1");
  }
  std::vector<std::vector<int>> levels(max_level);
  for (int ell = 1; ell <= max_level; ++ell) {
    const int n = level_count(ell);
    for (int k = 1; k <= n; ++k) levels[ell - 1].push_back(n - k);
  }
  return ParticleConfiguration(std::move(levels));
}

int height(const ParticleConfiguration& cfg, int x, int ell) {
  auto lv = cfg.level(ell);
  // positions are decreasing, so count the prefix above x
  int h = 0;
  while (h < static_cast<int>(lv.size()) && lv[h] > x) ++h;
  return h;
}

const char* to_string(LozengeType type) {
  switch (type) {
    case LozengeType::I: return "I";
    case LozengeType::II: return "II";
    case LozengeType::III: return "III";
  }
  return "?";
}

LozengeType lozenge_type_from_string(const std::string& name) {
  if (name == "I") return LozengeType::I;
  if (name == "II") return LozengeType::II;
  if (name == "III") return LozengeType::III;
  throw Error(ErrorKind::InvalidPattern, "unknown lozenge type '" + name + "'");
}

int lozenge_indicator(const ParticleConfiguration& cfg, int x, int ell,
                      LozengeType type) {
  const int one = cfg.occupied(x, ell) ? 1 : 0;
  if (type == LozengeType::I) return one;
  if (ell < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "lozenges of type II/III need level >= 2");
  }
  const int two = height(cfg, x, ell) - height(cfg, x - level_delta(ell - 1), ell - 1);
  const int three = 1 - one - two;
  if (two < 0 || two > 1 || three < 0 || three > 1) {
    throw Error(ErrorKind::InconsistentConfiguration,
                "lozenge indicators outside {0,1} at x=" + std::to_string(x) +
                    ", level " + std::to_string(ell));
  }
  return type == LozengeType::II ? two : three;
}

int height_decomposition_check(const ParticleConfiguration& cfg, int x,
                               int ell, int ell2) {
  if (ell2 <= ell) {
    throw Error(ErrorKind::InvalidArgument, "need ell2 > ell");
  }
  int shift = 0;
  int big_h = 0;
  for (int p = ell + 1; p <= ell2; ++p) {
    shift += level_delta(p - 1);
    big_h -= lozenge_indicator(cfg, x + shift, p, LozengeType::II);
  }
  return height(cfg, x, ell) - height(cfg, x + shift, ell2) - big_h;
}

BlackWhite black_white(const LozengeEntry& e) {
  BlackWhite bw;
  bw.white = {e.x, e.level};
  switch (e.type) {
    case LozengeType::I:
      bw.black = {e.x, e.level};
      break;
    case LozengeType::II:
      bw.black = {e.x + 1 - level_delta(e.level - 1), e.level - 1};
      break;
    case LozengeType::III:
      bw.black = {e.x - level_delta(e.level - 1), e.level - 1};
      break;
  }
  return bw;
}

void validate_pattern(const LozengePattern& pattern) {
  std::set<std::pair<int, int>> blacks, whites;
  for (const auto& e : pattern) {
    if (e.level < 1 || (e.type != LozengeType::I && e.level < 2)) {
      throw Error(ErrorKind::InvalidPattern,
                  std::string("lozenge of type ") + to_string(e.type) +
                      " cannot sit on level " + std::to_string(e.level));
    }
    const auto bw = black_white(e);
    if (!blacks.insert({bw.black.x, bw.black.level}).second) {
      throw Error(ErrorKind::InvalidPattern, "two lozenges share a black triangle");
    }
    if (!whites.insert({bw.white.x, bw.white.level}).second) {
      throw Error(ErrorKind::InvalidPattern, "two lozenges share a white triangle");
    }
  }
}

int pattern_indicator(const ParticleConfiguration& cfg,
                      const LozengePattern& pattern) {
  for (const auto& e : pattern) {
    if (lozenge_indicator(cfg, e.x, e.level, e.type) == 0) return 0;
  }
  return 1;
}

}  // namespace gffi
