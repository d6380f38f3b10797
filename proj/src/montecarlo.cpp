#include "gffi/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gffi/dynamics.hpp"
#include "gffi/error.hpp"
#include "gffi/format.hpp"
#include "gffi/parallel.hpp"

namespace gffi {

namespace {

constexpr double kZGate = 4.0;
constexpr double kCovRelTol = 0.3;
constexpr double kFourthRelTol = 0.35;
constexpr int kChunks = 64;

// Runs are cut into fixed chunks so integer tallies can be merged in any
// order with the same result.
template <class Fn>
void for_chunks(std::int64_t runs, int threads, Fn&& fn) {
  const std::int64_t chunks = std::min<std::int64_t>(kChunks, runs);
  parallel_for(chunks, threads, [&](std::int64_t c) {
    fn(c, c * runs / chunks, (c + 1) * runs / chunks);
  });
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

LatticeProbe map_probe(const ProbeSpec& p, int N, double tau) {
  LatticeProbe lp;
  lp.x = static_cast<int>(std::floor(N * p.nu));
  lp.n = std::max(1, static_cast<int>(std::lround(N * p.eta)));
  lp.level = 2 * lp.n - 1;
  lp.level_sequential = std::max(1, static_cast<int>(std::lround(N * p.eta)));
  lp.macro = {static_cast<double>(lp.x) / N, static_cast<double>(lp.n) / N, tau};
  return lp;
}

void validate(const ObservationPlan& plan) {
  if (plan.N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  if (!(plan.tau > 0.0) || !std::isfinite(plan.tau)) {
    throw Error(ErrorKind::InvalidArgument, "tau must be a finite positive time");
  }
  if (plan.runs < 100) throw Error(ErrorKind::InvalidArgument, "need runs >= 100");
  if (plan.batches < 20) throw Error(ErrorKind::InvalidArgument, "need >= 20 batches");
  if (plan.runs < plan.batches) throw Error(ErrorKind::InvalidArgument, "fewer runs than batches");
  if (plan.probes.empty()) throw Error(ErrorKind::InvalidArgument, "no probes");
  for (const auto& p : plan.probes) {
    if (p.nu < 0.0 || !(p.eta > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "probe needs nu >= 0 and eta > 0");
    }
    const LatticeProbe lp = map_probe(p, plan.N, plan.tau);
    if (!in_domain(lp.macro)) {
      throw Error(ErrorKind::InvalidArgument,
                  "probe (" + fmt_real(p.nu) + ", " + fmt_real(p.eta) +
                      ") is outside the liquid region at this N");
    }
  }
}

HeightSamples sample_heights(const ObservationPlan& plan, int threads) {
  validate(plan);
  HeightSamples s;
  for (const auto& p : plan.probes) s.probes.push_back(map_probe(p, plan.N, plan.tau));
  int top = 1;
  for (const auto& lp : s.probes) top = std::max(top, lp.level);
  const auto np = static_cast<std::int64_t>(s.probes.size());
  s.runs = plan.runs;
  s.h.assign(static_cast<std::size_t>(plan.runs * np), 0);
  std::vector<std::uint64_t> events(static_cast<std::size_t>(plan.runs));
  const double t = plan.N * plan.tau;
  parallel_for(plan.runs, threads, [&](std::int64_t r) {
    SimState st(top, plan.seed, static_cast<std::uint64_t>(r));
    st.advance_to(t);
    for (std::int64_t j = 0; j < np; ++j) {
      const auto& lp = s.probes[j];
      s.h[static_cast<std::size_t>(r * np + j)] = st.height(lp.x, lp.level);
    }
    events[r] = st.events();
  });
  for (auto e : events) s.events += e;
  return s;
}

MomentEstimate central_moment(const HeightSamples& s, const std::vector<int>& tuple,
                              int batches) {
  const auto np = static_cast<int>(s.probes.size());
  if (tuple.empty()) throw Error(ErrorKind::InvalidArgument, "empty probe tuple");
  for (int i : tuple) {
    if (i < 0 || i >= np) throw Error(ErrorKind::InvalidArgument, "probe index out of range");
  }
  if (batches < 2 || s.runs < 2 * batches) {
    throw Error(ErrorKind::InvalidArgument,
                "insufficient runs for a batch-means error at order " +
                    std::to_string(tuple.size()));
  }
  std::vector<double> mean(np, 0.0);
  for (std::int64_t r = 0; r < s.runs; ++r) {
    for (int j = 0; j < np; ++j) mean[j] += s.at(r, j);
  }
  for (auto& m : mean) m /= static_cast<double>(s.runs);

  std::vector<double> bsum(batches, 0.0);
  std::vector<std::int64_t> bcount(batches, 0);
  double total = 0.0;
  for (std::int64_t r = 0; r < s.runs; ++r) {
    double prod = 1.0;
    for (int i : tuple) prod *= s.at(r, i) - mean[i];
    const auto b = static_cast<std::size_t>(r * batches / s.runs);
    bsum[b] += prod;
    ++bcount[b];
    total += prod;
  }
  MomentEstimate m;
  m.order = static_cast<int>(tuple.size());
  m.runs = s.runs;
  m.value = m.order == 1 ? 0.0 : total / static_cast<double>(s.runs);
  double bm = 0.0;
  for (int b = 0; b < batches; ++b) {
    bsum[b] /= static_cast<double>(bcount[b]);
    bm += bsum[b];
  }
  bm /= batches;
  double var = 0.0;
  for (int b = 0; b < batches; ++b) var += (bsum[b] - bm) * (bsum[b] - bm);
  var /= batches - 1;
  m.std_error = std::sqrt(var / batches);
  return m;
}

std::vector<TupleMoment> estimate_central_moments(const ObservationPlan& plan, int max_order,
                                                  int threads) {
  if (max_order < 1) throw Error(ErrorKind::InvalidArgument, "max_order must be >= 1");
  const HeightSamples s = sample_heights(plan, threads);
  const int np = static_cast<int>(s.probes.size());
  std::vector<TupleMoment> out;
  std::vector<int> tuple;
  // non-decreasing index tuples, shortest first
  for (int k = 1; k <= max_order; ++k) {
    tuple.assign(k, 0);
    while (true) {
      out.push_back({tuple, central_moment(s, tuple, plan.batches)});
      int pos = k - 1;
      while (pos >= 0 && tuple[pos] == np - 1) --pos;
      if (pos < 0) break;
      ++tuple[pos];
      for (int q = pos + 1; q < k; ++q) tuple[q] = tuple[pos];
    }
  }
  return out;
}

std::vector<SiteFrequency> estimate_density_profile(int level, double t, int x_lo, int x_hi,
                                                    std::int64_t runs, std::uint64_t seed,
                                                    int threads) {
  if (level < 1) throw Error(ErrorKind::InvalidArgument, "level must be >= 1");
  if (x_lo < 0 || x_hi < x_lo) throw Error(ErrorKind::InvalidArgument, "bad x range");
  if (runs < 1) throw Error(ErrorKind::InvalidArgument, "need runs >= 1");
  const int width = x_hi - x_lo + 1;
  std::vector<std::vector<std::int64_t>> tallies(std::min<std::int64_t>(kChunks, runs),
                                                 std::vector<std::int64_t>(width, 0));
  for_chunks(runs, threads, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    auto& tally = tallies[c];
    for (std::int64_t r = lo; r < hi; ++r) {
      SimState st(level, seed, static_cast<std::uint64_t>(r));
      st.advance_to(t);
      for (int k = 1; k <= level_count(level); ++k) {
        const int x = st.at(level, k);
        if (x >= x_lo && x <= x_hi) ++tally[x - x_lo];
      }
    }
  });
  std::vector<SiteFrequency> out(width);
  for (int i = 0; i < width; ++i) {
    std::int64_t hits = 0;
    for (const auto& tally : tallies) hits += tally[i];
    const double p = static_cast<double>(hits) / static_cast<double>(runs);
    out[i] = {x_lo + i, p, std::sqrt(p * (1.0 - p) / static_cast<double>(runs))};
  }
  return out;
}

namespace {

template <class Indicator>
std::vector<PatternFrequency> tally_patterns(std::size_t count, int top, double t,
                                             std::int64_t runs, std::uint64_t seed,
                                             int threads, Indicator&& ind) {
  if (runs < 1) throw Error(ErrorKind::InvalidArgument, "need runs >= 1");
  std::vector<std::vector<std::int64_t>> tallies(std::min<std::int64_t>(kChunks, runs),
                                                 std::vector<std::int64_t>(count, 0));
  for_chunks(runs, threads, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      SimState st(top, seed, static_cast<std::uint64_t>(r));
      st.advance_to(t);
      const ParticleConfiguration cfg = st.configuration();
      for (std::size_t i = 0; i < count; ++i) tallies[c][i] += ind(cfg, i);
    }
  });
  std::vector<PatternFrequency> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& tally : tallies) out[i].hits += tally[i];
    const double p = static_cast<double>(out[i].hits) / static_cast<double>(runs);
    out[i].freq = p;
    out[i].std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
  }
  return out;
}

}  // namespace

std::vector<PatternFrequency> estimate_lozenge_frequencies(
    const std::vector<LozengePattern>& patterns, double t, std::int64_t runs,
    std::uint64_t seed, int threads) {
  int top = 1;
  for (const auto& p : patterns) {
    validate_pattern(p);
    for (const auto& e : p) top = std::max(top, e.level);
  }
  return tally_patterns(patterns.size(), top, t, runs, seed, threads,
                        [&](const ParticleConfiguration& cfg, std::size_t i) {
                          return pattern_indicator(cfg, patterns[i]);
                        });
}

std::vector<PatternFrequency> estimate_site_frequencies(
    const std::vector<std::vector<LatticePoint>>& site_sets, double t, std::int64_t runs,
    std::uint64_t seed, int threads) {
  int top = 1;
  for (const auto& set : site_sets) {
    for (const auto& p : set) {
      if (p.level < 1 || p.x < 0) throw Error(ErrorKind::InvalidArgument, "bad site");
      top = std::max(top, p.level);
    }
  }
  return tally_patterns(site_sets.size(), top, t, runs, seed, threads,
                        [&](const ParticleConfiguration& cfg, std::size_t i) {
                          for (const auto& p : site_sets[i]) {
                            if (!cfg.occupied(p.x, p.level)) return 0;
                          }
                          return 1;
                        });
}

GffReport gff_comparison_report(const ObservationPlan& plan, int threads) {
  if (plan.probes.size() < 2) throw Error(ErrorKind::InvalidArgument, "need >= 2 probes");
  const HeightSamples s = sample_heights(plan, threads);
  GffReport rep;
  rep.plan = plan;
  rep.probes = s.probes;
  rep.events = s.events;
  const int np = static_cast<int>(s.probes.size());

  std::vector<cplx> om(np);
  std::vector<cplx> om_alt(np);
  for (int i = 0; i < np; ++i) {
    om[i] = omega(s.probes[i].macro);
    MacroPoint alt = s.probes[i].macro;
    alt.eta = static_cast<double>(s.probes[i].level) / plan.N;
    om_alt[i] = in_domain(alt) ? omega(alt) : cplx(nan(), nan());
  }

  for (int i = 0; i < np; ++i) {
    const MomentEstimate v = central_moment(s, {i, i}, plan.batches);
    rep.variances.push_back({i, v.value, v.value / std::log(static_cast<double>(plan.N))});
  }
  for (int i = 0; i < np; ++i) {
    for (int j = i + 1; j < np; ++j) {
      PairRow row;
      row.i = i;
      row.j = j;
      row.cov = central_moment(s, {i, j}, plan.batches);
      row.prediction = green(om[i], om[j]);
      row.prediction_alt = std::isnan(om_alt[i].real()) || std::isnan(om_alt[j].real())
                               ? nan()
                               : green(om_alt[i], om_alt[j]);
      const double diff = row.cov.value - row.prediction;
      row.zscore = row.cov.std_error > 0 ? diff / row.cov.std_error : nan();
      row.ratio = row.cov.value / row.prediction;
      row.pass = std::abs(diff) <=
                 std::max(kZGate * row.cov.std_error, kCovRelTol * std::abs(row.prediction));
      rep.pairs.push_back(row);
    }
  }

  std::vector<std::vector<int>> triples;
  if (np >= 3) {
    for (int a = 0; a < np; ++a)
      for (int b = a + 1; b < np; ++b)
        for (int c = b + 1; c < np; ++c) triples.push_back({a, b, c});
  } else {
    triples = {{0, 0, 1}, {0, 1, 1}};
  }
  for (const auto& tup : triples) {
    WickRow row;
    row.tuple = tup;
    row.moment = central_moment(s, tup, plan.batches);
    row.prediction = 0.0;
    row.zscore = row.moment.std_error > 0 ? row.moment.value / row.moment.std_error : nan();
    row.pass = std::abs(row.moment.value) <= kZGate * row.moment.std_error;
    rep.third.push_back(row);
  }

  for (int a = 0; a < np; ++a)
    for (int b = a + 1; b < np; ++b)
      for (int c = b + 1; c < np; ++c)
        for (int d = c + 1; d < np; ++d) {
          WickRow row;
          row.tuple = {a, b, c, d};
          row.moment = central_moment(s, row.tuple, plan.batches);
          row.prediction = wick_moment({om[a], om[b], om[c], om[d]});
          const double diff = row.moment.value - row.prediction;
          row.zscore = row.moment.std_error > 0 ? diff / row.moment.std_error : nan();
          row.pass = std::abs(diff) <= std::max(kZGate * row.moment.std_error,
                                                kFourthRelTol * std::abs(row.prediction));
          rep.fourth.push_back(row);
        }
  return rep;
}

void write_pairs_csv(std::ostream& os, const GffReport& r) {
  os << "nu1,eta1,nu2,eta2,cov_hat,se,prediction,zscore\n";
  for (const auto& p : r.pairs) {
    const auto& a = r.plan.probes[p.i];
    const auto& b = r.plan.probes[p.j];
    os << fmt_real(a.nu) << ',' << fmt_real(a.eta) << ',' << fmt_real(b.nu) << ','
       << fmt_real(b.eta) << ',' << fmt_real(p.cov.value) << ',' << fmt_real(p.cov.std_error)
       << ',' << fmt_real(p.prediction) << ',' << fmt_real(p.zscore) << '\n';
  }
}

void to_json(nlohmann::json& j, const ProbeSpec& p) { j = {{"nu", p.nu}, {"eta", p.eta}}; }

void from_json(const nlohmann::json& j, ProbeSpec& p) {
  p.nu = j.at("nu").get<double>();
  p.eta = j.at("eta").get<double>();
}

void to_json(nlohmann::json& j, const ObservationPlan& p) {
  j = {{"N", p.N},         {"tau", p.tau},   {"probes", p.probes},
       {"runs", p.runs},   {"seed", p.seed}, {"batches", p.batches}};
}

void from_json(const nlohmann::json& j, ObservationPlan& p) {
  p.N = j.at("N").get<int>();
  p.tau = j.value("tau", 1.0);
  p.probes = j.at("probes").get<std::vector<ProbeSpec>>();
  p.runs = j.value("runs", std::int64_t{20000});
  p.seed = j.value("seed", std::uint64_t{0});
  p.batches = j.value("batches", 20);
}

void to_json(nlohmann::json& j, const MomentEstimate& m) {
  j = {{"value", m.value}, {"std_error", m.std_error}, {"runs", m.runs}, {"order", m.order}};
}

void to_json(nlohmann::json& j, const GffReport& r) {
  j["plan"] = r.plan;
  j["events"] = r.events;
  j["level_mapping"] = "n = round(N eta), level = 2n - 1; level_sequential = round(N eta)";
  auto& probes = j["probes"] = nlohmann::json::array();
  for (const auto& p : r.probes) {
    probes.push_back({{"x", p.x},
                      {"n", p.n},
                      {"level", p.level},
                      {"level_sequential", p.level_sequential},
                      {"nu", p.macro.nu},
                      {"eta", p.macro.eta},
                      {"density", density(p.macro)}});
  }
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"i", p.i},
                     {"j", p.j},
                     {"cov", p.cov},
                     {"prediction", p.prediction},
                     {"prediction_sequential_level", p.prediction_alt},
                     {"zscore", p.zscore},
                     {"ratio", p.ratio},
                     {"pass", p.pass}});
  }
  auto wick = [](const std::vector<WickRow>& rows) {
    auto a = nlohmann::json::array();
    for (const auto& w : rows) {
      a.push_back({{"tuple", w.tuple},
                   {"moment", w.moment},
                   {"prediction", w.prediction},
                   {"zscore", w.zscore},
                   {"pass", w.pass}});
    }
    return a;
  };
  j["third"] = wick(r.third);
  j["fourth"] = wick(r.fourth);
  auto& vars = j["variance_diagnostic"] = nlohmann::json::array();
  for (const auto& v : r.variances) {
    vars.push_back({{"i", v.i}, {"variance", v.variance}, {"variance_over_log_n", v.log_n}});
  }
  bool pass = true;
  for (const auto& p : r.pairs) pass = pass && p.pass;
  for (const auto& w : r.third) pass = pass && w.pass;
  for (const auto& w : r.fourth) pass = pass && w.pass;
  j["pass"] = pass;
}

}  // namespace gffi
