#include "gffi/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "gffi/error.hpp"
#include "gffi/format.hpp"
#include "gffi/parallel.hpp"

namespace gffi {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

SimState::SimState(int max_level, std::uint64_t seed, std::uint64_t stream)
    : max_level_(max_level), rng_(make_stream(seed, stream)) {
  if (max_level < 1) throw Error(ErrorKind::InvalidArgument, "max level must be >= 1");
  offset_.assign(max_level + 2, 0);
  for (int ell = 1; ell <= max_level; ++ell) {
    offset_[ell + 1] = offset_[ell] + level_count(ell);
  }
  pos_.resize(offset_[max_level + 1]);
  level_of_.resize(pos_.size());
  k_of_.resize(pos_.size());
  for (int ell = 1; ell <= max_level; ++ell) {
    const int n = level_count(ell);
    for (int k = 1; k <= n; ++k) {
      const int i = offset_[ell] + k - 1;
      pos_[i] = n - k;
      level_of_[i] = ell;
      k_of_[i] = k;
    }
  }
}

int SimState::height(int x, int ell) const {
  const int n = level_count(ell);
  const int* p = pos_.data() + offset_[ell];
  int h = 0;
  while (h < n && p[h] > x) ++h;
  return h;
}

bool SimState::occupied(int x, int ell) const {
  const int n = level_count(ell);
  const int* p = pos_.data() + offset_[ell];
  for (int k = 0; k < n; ++k) {
    if (p[k] == x) return true;
    if (p[k] < x) return false;
  }
  return false;
}

ParticleConfiguration SimState::configuration() const {
  std::vector<std::vector<int>> levels(max_level_);
  for (int ell = 1; ell <= max_level_; ++ell) {
    levels[ell - 1].assign(pos_.begin() + offset_[ell], pos_.begin() + offset_[ell + 1]);
  }
  return ParticleConfiguration(std::move(levels));
}

void SimState::set_configuration(const ParticleConfiguration& cfg) {
  if (cfg.max_level() != max_level_) {
    throw Error(ErrorKind::InvalidArgument, "configuration has the wrong depth");
  }
  if (!check_interlacing(cfg).empty()) {
    throw Error(ErrorKind::InconsistentConfiguration, "configuration does not interlace");
  }
  for (int ell = 1; ell <= max_level_; ++ell) {
    auto lv = cfg.level(ell);
    std::copy(lv.begin(), lv.end(), pos_.begin() + offset_[ell]);
  }
}

Event SimState::next_event() {
  const std::uint64_t r1 = rng_();
  const std::uint64_t r2 = rng_();
  const double u = static_cast<double>(r1 >> 11) * 0x1.0p-53;
  const auto p = static_cast<std::uint64_t>(pos_.size());
  const auto pick = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(r2) * (2 * p)) >> 64);
  const auto i = static_cast<std::size_t>(pick >> 1);
  Event ev;
  ev.dt = -std::log1p(-u) / static_cast<double>(p);
  ev.level = level_of_[i];
  ev.k = k_of_[i];
  ev.dir = (pick & 1u) ? Direction::Right : Direction::Left;
  return ev;
}

int SimState::attempt_right(int ell, int k, std::vector<Moved>* moved) {
  int s = at(ell, k);
  // blocked by the particle of the level below that sits up and to the right
  if (ell > 1 && k > 1 && s + 1 - level_delta(ell - 1) == at(ell - 1, k - 1)) return 0;
  ref(ell, k) = s + 1;
  if (moved) moved->push_back({ell, k, s, s + 1});
  int count = 1;
  for (int l = ell + 1; l <= max_level_; ++l) {
    const int above = at(l, k);
    if (above != s + level_delta(l - 1)) break;
    ref(l, k) = above + 1;
    if (moved) moved->push_back({l, k, above, above + 1});
    s = above;
    ++count;
  }
  return count;
}

int SimState::attempt_left(int ell, int k, std::vector<Moved>* moved) {
  int s = at(ell, k);
  if (s == 0) {
    // Only the last particle of an odd level can touch the wall; on even
    // levels the particle below pins it and the ring is blocked.
    if (ell % 2 == 1) return attempt_right(ell, k, moved);
    return 0;
  }
  if (ell > 1 && k <= level_count(ell - 1) && at(ell - 1, k) == s - level_delta(ell - 1)) {
    return 0;
  }
  ref(ell, k) = s - 1;
  if (moved) moved->push_back({ell, k, s, s - 1});
  int count = 1;
  int kk = k + 1;
  for (int l = ell + 1; l <= max_level_ && kk <= level_count(l); ++l, ++kk) {
    const int above = at(l, kk);
    if (above != s - 1 + level_delta(l - 1)) break;
    assert(above >= 1);
    ref(l, kk) = above - 1;
    if (moved) moved->push_back({l, kk, above, above - 1});
    s = above;
    ++count;
  }
  return count;
}

void SimState::advance_to(double t_end) {
  if (t_end <= time_) return;
  // Total ring rate is the constant P, so the number of rings in the window
  // is Poisson(P dt) and the rings themselves are i.i.d. uniform picks.
  const auto p = static_cast<std::uint64_t>(pos_.size());
  std::poisson_distribution<std::uint64_t> count(static_cast<double>(p) * (t_end - time_));
  const std::uint64_t rings = count(rng_);
  for (std::uint64_t r = 0; r < rings; ++r) {
    const auto pick = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng_()) * (2 * p)) >> 64);
    const auto i = static_cast<std::size_t>(pick >> 1);
    if (pick & 1u) {
      attempt_right(level_of_[i], k_of_[i]);
    } else if (!right_only_) {
      attempt_left(level_of_[i], k_of_[i]);
    }
  }
  events_ += rings;
  time_ = t_end;
}

void validate(const SimPlan& plan) {
  if (plan.max_level < 1) throw Error(ErrorKind::InvalidArgument, "max_level must be >= 1");
  if (!(plan.t_end >= 0.0) || !std::isfinite(plan.t_end)) {
    throw Error(ErrorKind::InvalidArgument, "t_end must be a finite time >= 0");
  }
  if (plan.trajectories < 1) throw Error(ErrorKind::InvalidArgument, "need >= 1 trajectory");
  double prev = 0.0;
  for (double t : plan.sample_times) {
    if (t < prev || t > plan.t_end) {
      throw Error(ErrorKind::InvalidArgument,
                  "sample times must be increasing within [0, t_end]");
    }
    prev = t;
  }
  for (const auto& p : plan.probes) {
    if (p.level < 1) throw Error(ErrorKind::InvalidArgument, "probe level must be >= 1");
    if (p.level > plan.max_level) {
      throw Error(ErrorKind::InvalidArgument,
                  "level cutoff " + std::to_string(plan.max_level) +
                      " is below probed level " + std::to_string(p.level));
    }
    if (p.kind == Probe::Kind::Lozenge && p.type != LozengeType::I && p.level < 2) {
      throw Error(ErrorKind::InvalidArgument, "type II/III probes need level >= 2");
    }
  }
}

namespace {

int probe_value(const SimState& st, const ParticleConfiguration* cfg, const Probe& p) {
  if (p.kind == Probe::Kind::Height) return st.height(p.x, p.level);
  if (p.type == LozengeType::I) return st.occupied(p.x, p.level) ? 1 : 0;
  return lozenge_indicator(*cfg, p.x, p.level, p.type);
}

}  // namespace

ObservationRecord simulate(const SimPlan& plan, int threads) {
  validate(plan);
  std::vector<double> times = plan.sample_times;
  if (times.empty()) times.push_back(plan.t_end);
  const bool need_cfg = std::any_of(plan.probes.begin(), plan.probes.end(), [](const Probe& p) {
    return p.kind == Probe::Kind::Lozenge && p.type != LozengeType::I;
  });

  const auto n = plan.trajectories;
  std::vector<std::vector<ObservationRow>> rows(n);
  std::vector<ParticleConfiguration> finals(n);
  std::vector<std::uint64_t> events(n);
  parallel_for(n, threads, [&](std::int64_t traj) {
    SimState st(plan.max_level, plan.seed, static_cast<std::uint64_t>(traj));
    st.set_right_only(plan.right_only);
    for (double t : times) {
      st.advance_to(t);
      ParticleConfiguration cfg;
      if (need_cfg) cfg = st.configuration();
      for (std::size_t j = 0; j < plan.probes.size(); ++j) {
        rows[traj].push_back({traj, t, static_cast<int>(j),
                              probe_value(st, need_cfg ? &cfg : nullptr, plan.probes[j])});
      }
    }
    st.advance_to(plan.t_end);
    finals[traj] = st.configuration();
    events[traj] = st.events();
  });

  ObservationRecord rec;
  for (std::int64_t i = 0; i < n; ++i) {
    rec.rows.insert(rec.rows.end(), rows[i].begin(), rows[i].end());
    rec.events += events[i];
  }
  rec.finals = std::move(finals);
  return rec;
}

void write_csv(std::ostream& os, const ObservationRecord& rec) {
  os << "trajectory_id,time,probe_id,value\n";
  for (const auto& r : rec.rows) {
    os << r.trajectory << ',' << fmt_real(r.time) << ',' << r.probe << ',' << r.value << '\n';
  }
}

void to_json(nlohmann::json& j, const Probe& p) {
  j = nlohmann::json{{"kind", p.kind == Probe::Kind::Height ? "height" : "lozenge"},
                     {"x", p.x},
                     {"level", p.level}};
  if (p.kind == Probe::Kind::Lozenge) j["type"] = to_string(p.type);
}

void from_json(const nlohmann::json& j, Probe& p) {
  const std::string kind = j.value("kind", "height");
  if (kind == "height") {
    p.kind = Probe::Kind::Height;
  } else if (kind == "lozenge") {
    p.kind = Probe::Kind::Lozenge;
    p.type = lozenge_type_from_string(j.at("type").get<std::string>());
  } else {
    throw Error(ErrorKind::Schema, "probe kind must be height or lozenge");
  }
  p.x = j.at("x").get<int>();
  p.level = j.at("level").get<int>();
}

void to_json(nlohmann::json& j, const SimPlan& plan) {
  j = nlohmann::json{{"max_level", plan.max_level},
                     {"t_end", plan.t_end},
                     {"seed", plan.seed},
                     {"trajectories", plan.trajectories},
                     {"sample_times", plan.sample_times},
                     {"probes", plan.probes},
                     {"right_only", plan.right_only}};
}

void from_json(const nlohmann::json& j, SimPlan& plan) {
  plan.max_level = j.at("max_level").get<int>();
  plan.t_end = j.at("t_end").get<double>();
  plan.seed = j.value("seed", std::uint64_t{0});
  plan.trajectories = j.value("trajectories", std::int64_t{1});
  plan.sample_times = j.value("sample_times", std::vector<double>{});
  plan.probes = j.value("probes", std::vector<Probe>{});
  plan.right_only = j.value("right_only", false);
}

}  // namespace gffi
