#pragma once

// Event-driven simulation of the push/block/reflect dynamics.
//
// Every particle carries two rate-1/2 clocks. They are superposed into one
// exponential clock of rate P (the particle count) followed by a uniform
// choice among the 2P (particle, direction) pairs.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include <json.hpp>

#include "gffi/lattice.hpp"

namespace gffi {

enum class Direction { Left, Right };

struct Event {
  double dt = 0.0;
  int level = 1;  // linear
  int k = 1;      // 1-based, counted from the right
  Direction dir = Direction::Right;
};

struct Moved {
  int level = 1;
  int k = 1;
  int from = 0;
  int to = 0;
};

/// Independent stream for trajectory `stream` under the top-level seed.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

class SimState {
 public:
  SimState(int max_level, std::uint64_t seed, std::uint64_t stream = 0);

  int max_level() const { return max_level_; }
  std::int64_t particle_count() const { return static_cast<std::int64_t>(pos_.size()); }
  double time() const { return time_; }
  std::uint64_t events() const { return events_; }

  int at(int ell, int k) const { return pos_[offset_[ell] + k - 1]; }
  int height(int x, int ell) const;
  bool occupied(int x, int ell) const;
  ParticleConfiguration configuration() const;

  /// Draw the next clock ring without applying it.
  Event next_event();

  /// Returns the number of particles moved; appends them to `moved` if given.
  int attempt_right(int ell, int k, std::vector<Moved>* moved = nullptr);
  int attempt_left(int ell, int k, std::vector<Moved>* moved = nullptr);

  /// Apply all rings in (time(), t_end]. Draws a Poisson ring count and
  /// then uniform (particle, direction) picks; equal in law to stepping
  /// next_event() until the clock passes t_end.
  void advance_to(double t_end);

  /// Test hook: left rings are consumed without effect.
  void set_right_only(bool on) { right_only_ = on; }

  /// Test hook: overwrite positions. Throws if the result does not interlace.
  void set_configuration(const ParticleConfiguration& cfg);

 private:
  int max_level_;
  std::vector<int> offset_;  // offset_[ell] = first flat index of level ell
  std::vector<int> pos_;
  std::vector<int> level_of_;
  std::vector<int> k_of_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  bool right_only_ = false;
  std::mt19937_64 rng_;

  int& ref(int ell, int k) { return pos_[offset_[ell] + k - 1]; }
};

struct Probe {
  enum class Kind { Height, Lozenge };
  Kind kind = Kind::Height;
  int x = 0;
  int level = 1;
  LozengeType type = LozengeType::I;
};

struct SimPlan {
  int max_level = 1;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  std::int64_t trajectories = 1;
  std::vector<double> sample_times;  // empty: only t_end
  std::vector<Probe> probes;
  bool right_only = false;
};

void validate(const SimPlan& plan);

struct ObservationRow {
  std::int64_t trajectory = 0;
  double time = 0.0;
  int probe = 0;
  int value = 0;
};

struct ObservationRecord {
  std::vector<ObservationRow> rows;
  std::vector<ParticleConfiguration> finals;
  std::uint64_t events = 0;
};

ObservationRecord simulate(const SimPlan& plan, int threads = 1);

void write_csv(std::ostream& os, const ObservationRecord& rec);

void to_json(nlohmann::json& j, const Probe& p);
void from_json(const nlohmann::json& j, Probe& p);
void to_json(nlohmann::json& j, const SimPlan& plan);
void from_json(const nlohmann::json& j, SimPlan& plan);

}  // namespace gffi
