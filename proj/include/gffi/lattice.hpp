#pragma once

// Coordinates, particle configurations, heights and lozenges.
//
// Levels are addressed two ways. The linear index ell = 1, 2, 3, ... counts
// levels bottom-up; the paired index (n, a) with a in {-1/2, +1/2} satisfies
// ell = 2n - 1 for a = -1/2 and ell = 2n for a = +1/2. Level ell holds
// ceil(ell / 2) particles. Positions are "s-coordinates": nonnegative
// integers with the wall at s = 0 on every level.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gffi {

enum class Shift : int { Minus = -1, Plus = 1 };

struct LevelIndex {
  int n = 1;
  Shift a = Shift::Minus;

  static LevelIndex from_linear(int ell);

  int linear() const { return a == Shift::Minus ? 2 * n - 1 : 2 * n; }
  int count() const { return n; }
  int delta() const { return a == Shift::Plus ? 1 : 0; }
  double a_value() const { return a == Shift::Plus ? 0.5 : -0.5; }

  friend bool operator==(const LevelIndex&, const LevelIndex&) = default;
};

/// (n1,a1) is at least as high as (n2,a2).
inline bool dominates(const LevelIndex& lhs, const LevelIndex& rhs) {
  return lhs.linear() >= rhs.linear();
}

/// Particle count on linear level ell.
inline int level_count(int ell) { return (ell + 1) / 2; }

/// delta_ell = m_{ell+1} - m_ell; 1 on even levels, 0 on odd ones.
inline int level_delta(int ell) { return ell % 2 == 0 ? 1 : 0; }

/// Total particle count on levels 1..max_level.
std::int64_t total_particles(int max_level);

struct LatticePoint {
  int x = 0;
  int level = 1;  // linear index

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

class ParticleConfiguration {
 public:
  ParticleConfiguration() = default;

  /// levels[ell-1] lists the positions on level ell in strictly
  /// decreasing order. Throws if a level has the wrong particle count or is
  /// not strictly decreasing.
  explicit ParticleConfiguration(std::vector<std::vector<int>> levels);

  int max_level() const { return static_cast<int>(levels_.size()); }
  std::span<const int> level(int ell) const;
  const std::vector<std::vector<int>>& levels() const { return levels_; }

  int position(int ell, int k) const { return levels_.at(ell - 1).at(k - 1); }
  bool occupied(int x, int ell) const;

  friend bool operator==(const ParticleConfiguration&,
                         const ParticleConfiguration&) = default;

 private:
  std::vector<std::vector<int>> levels_;
};

void to_json(nlohmann::json& j, const ParticleConfiguration& cfg);
void from_json(const nlohmann::json& j, ParticleConfiguration& cfg);

/// Convert introduction coordinates (level m, position y) to (n, a) and s.
/// The introduction lattice is two-step: odd levels use even y, even levels
/// odd y, so y = 2s + [m even]. Throws WallViolation below the wall and
/// InvalidArgument on a parity mismatch.
std::pair<LevelIndex, int> intro_to_internal(int m, int y);
std::pair<int, int> internal_to_intro(const LevelIndex& level, int s);

struct InterlacingViolation {
  int level = 0;  // upper level of the offending pair, or the level itself
  int k = 0;
  std::string reason;
};

std::vector<InterlacingViolation> check_interlacing(
    const ParticleConfiguration& cfg);

/// Densest packing against the wall: s_k = n - k on a level with n particles.
ParticleConfiguration packed_configuration(int max_level);

/// Number of particles on level ell strictly to the right of x.
int height(const ParticleConfiguration& cfg, int x, int ell);

enum class LozengeType { I, II, III };

const char* to_string(LozengeType type);
LozengeType lozenge_type_from_string(const std::string& name);

/// Indicator of a lozenge of the given type whose white triangle sits at
/// (x, ell). Types II and III need ell >= 2.
int lozenge_indicator(const ParticleConfiguration& cfg, int x, int ell,
                      LozengeType type);

/// h(x, ell) - h(x + sum delta, ell2) - H_{ell, ell2}(x); zero on every
/// interlacing configuration.
int height_decomposition_check(const ParticleConfiguration& cfg, int x,
                               int ell, int ell2);

struct LozengeEntry {
  int x = 0;      // white triangle position
  int level = 1;  // white triangle level (linear)
  LozengeType type = LozengeType::I;
};

struct BlackWhite {
  LatticePoint black;
  LatticePoint white;
};

/// Black/white triangle pair of a lozenge given by its white triangle and
/// type. Type II pairs white (x, ell) with black (x + 1 - delta, ell - 1);
/// type III with black (x - delta, ell - 1), delta = delta_{ell-1}.
BlackWhite black_white(const LozengeEntry& entry);

using LozengePattern = std::vector<LozengeEntry>;

/// Throws InvalidPattern unless every entry is well formed and the pattern
/// is non-overlapping (distinct black and distinct white triangles).
void validate_pattern(const LozengePattern& pattern);

/// Joint indicator of all lozenges in the pattern.
int pattern_indicator(const ParticleConfiguration& cfg,
                      const LozengePattern& pattern);

}  // namespace gffi
