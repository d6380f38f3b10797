#pragma once

// Moment, density and lozenge-frequency estimators over independent
// trajectories of the simulator, plus the GFF comparison report.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gffi/asymptotics.hpp"
#include "gffi/lattice.hpp"

namespace gffi {

struct ProbeSpec {
  double nu = 0.0;
  double eta = 0.5;
};

struct ObservationPlan {
  int N = 48;
  double tau = 1.0;
  std::vector<ProbeSpec> probes;
  std::int64_t runs = 20000;
  std::uint64_t seed = 0;
  int batches = 20;
};

/// Lattice image of a macroscopic probe.
struct LatticeProbe {
  int x = 0;                // floor(N nu), s-coordinate
  int n = 1;                // round(N eta)
  int level = 1;            // 2n - 1, the (n, -1/2) level
  int level_sequential = 1; // max(1, round(N eta)), the other reading
  MacroPoint macro;         // (x/N, n/N, tau) fed to Omega
};

LatticeProbe map_probe(const ProbeSpec& p, int N, double tau);

/// Throws InvalidArgument on runs < 100, batches < 20, N < 1, or a probe
/// outside the liquid region.
void validate(const ObservationPlan& plan);

/// Heights at every probe for every run, row-major runs x probes.
struct HeightSamples {
  std::vector<LatticeProbe> probes;
  std::int64_t runs = 0;
  std::vector<int> h;
  std::uint64_t events = 0;
  int at(std::int64_t run, int probe) const {
    return h[static_cast<std::size_t>(run * static_cast<std::int64_t>(probes.size()) + probe)];
  }
};

HeightSamples sample_heights(const ObservationPlan& plan, int threads = 1);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t runs = 0;
  int order = 0;
};

/// Sample-centred E[prod (h_i - mean h_i)] over the probe tuple; SE by
/// batch means over contiguous run blocks.
MomentEstimate central_moment(const HeightSamples& s, const std::vector<int>& tuple,
                              int batches = 20);

/// Every probe tuple (i1 <= i2 <= ...) of each order 1..max_order.
struct TupleMoment {
  std::vector<int> tuple;
  MomentEstimate est;
};
std::vector<TupleMoment> estimate_central_moments(const ObservationPlan& plan, int max_order,
                                                  int threads = 1);

struct SiteFrequency {
  int x = 0;
  double freq = 0.0;
  double std_error = 0.0;
};

/// Occupation frequencies on one level for x in [x_lo, x_hi] at time t.
std::vector<SiteFrequency> estimate_density_profile(int level, double t, int x_lo, int x_hi,
                                                    std::int64_t runs, std::uint64_t seed,
                                                    int threads = 1);

struct PatternFrequency {
  double freq = 0.0;
  double std_error = 0.0;
  std::int64_t hits = 0;
};

/// Frequencies of the joint indicator of each pattern at time t. The
/// simulation is truncated at the highest level any pattern touches.
std::vector<PatternFrequency> estimate_lozenge_frequencies(
    const std::vector<LozengePattern>& patterns, double t, std::int64_t runs,
    std::uint64_t seed, int threads = 1);

/// Joint occupation frequency of a set of sites, one per pattern.
std::vector<PatternFrequency> estimate_site_frequencies(
    const std::vector<std::vector<LatticePoint>>& site_sets, double t, std::int64_t runs,
    std::uint64_t seed, int threads = 1);

struct PairRow {
  int i = 0, j = 0;
  MomentEstimate cov;
  double prediction = 0.0;      // green(Omega_i, Omega_j)
  double prediction_alt = 0.0;  // same with the probe level read sequentially
  double zscore = 0.0;
  double ratio = 0.0;           // cov / prediction
  bool pass = false;            // |cov - pred| <= max(4 SE, 0.3 |pred|)
};

struct WickRow {
  std::vector<int> tuple;
  MomentEstimate moment;
  double prediction = 0.0;
  double zscore = 0.0;
  bool pass = false;  // odd: |z| <= 4; fourth: within max(4 SE, 0.35 |pred|)
};

struct VarianceRow {
  int i = 0;
  double variance = 0.0;
  double log_n = 0.0;  // diagnostic: Var / log N
};

struct GffReport {
  ObservationPlan plan;
  std::vector<LatticeProbe> probes;
  std::vector<PairRow> pairs;
  std::vector<WickRow> third;
  std::vector<WickRow> fourth;
  std::vector<VarianceRow> variances;
  std::uint64_t events = 0;
};

GffReport gff_comparison_report(const ObservationPlan& plan, int threads = 1);

/// nu1,eta1,nu2,eta2,cov_hat,se,prediction,zscore
void write_pairs_csv(std::ostream& os, const GffReport& r);

void to_json(nlohmann::json& j, const ProbeSpec& p);
void from_json(const nlohmann::json& j, ProbeSpec& p);
void to_json(nlohmann::json& j, const ObservationPlan& p);
void from_json(const nlohmann::json& j, ObservationPlan& p);
void to_json(nlohmann::json& j, const MomentEstimate& m);
void to_json(nlohmann::json& j, const GffReport& r);

}  // namespace gffi
