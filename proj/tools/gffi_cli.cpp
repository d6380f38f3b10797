// gffi: batch driver. Every subcommand reads an optional JSON config
// (--config), applies flag overrides on top, validates the merged config
// against the subcommand's key set, runs, and then writes all artifacts at
// once (temp file + rename) together with a manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gffi/acceptance.hpp"
#include "gffi/asymptotics.hpp"
#include "gffi/dynamics.hpp"
#include "gffi/error.hpp"
#include "gffi/format.hpp"
#include "gffi/kernel.hpp"
#include "gffi/montecarlo.hpp"
#include "gffi/parallel.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gffi;

namespace {

struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  json result;  // printed to stdout
  std::vector<Artifact> artifacts;
  int exit_code = 0;
};

using Runner = Outcome (*)(const json& cfg, int threads);

struct Command {
  std::string name;
  std::string help;
  std::set<std::string> keys;
  json defaults;
  Runner run;
  bool writes_by_default = false;
};

std::string hash_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json scalar(const std::string& s) {
  try {
    json j = json::parse(s);
    if (j.is_number() || j.is_boolean() || j.is_array()) return j;
  } catch (const json::exception&) {
  }
  return s;
}

std::vector<double> split_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Schema, "cannot read a number from '" + part + "'");
    }
  }
  return out;
}

template <class T>
T get(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("config key '") + key + "': " + e.what());
  }
}

Shift shift_of(const json& v) {
  if (v.is_number()) {
    const double a = v.get<double>();
    if (a == -0.5) return Shift::Minus;
    if (a == 0.5) return Shift::Plus;
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "-1/2" || s == "-0.5" || s == "minus") return Shift::Minus;
    if (s == "+1/2" || s == "1/2" || s == "0.5" || s == "+0.5" || s == "plus") return Shift::Plus;
  }
  throw Error(ErrorKind::Schema, "shift must be -1/2 or +1/2");
}

cplx complex_of(const json& v, const char* key) {
  std::vector<double> parts;
  if (v.is_array()) {
    parts = v.get<std::vector<double>>();
  } else if (v.is_string()) {
    parts = split_reals(v.get<std::string>());
  }
  if (parts.size() != 2) {
    throw Error(ErrorKind::Schema, std::string(key) + " must be [re, im] or \"re,im\"");
  }
  return {parts[0], parts[1]};
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

QuadratureSpec quadrature_of(const json& cfg) {
  QuadratureSpec q;
  q.nodes = get<int>(cfg, "nodes");
  q.tol = get<double>(cfg, "tol");
  if (!cfg.at("v_radius").is_null()) q.v_radius = get<double>(cfg, "v_radius");
  validate(q);
  return q;
}

json kernel_json(const KernelResult& r) {
  return {{"value", r.value},
          {"imag_residue", r.imag_residue},
          {"double_integral", r.double_integral},
          {"extra_integral", r.extra_integral},
          {"nodes", r.nodes},
          {"doublings", r.doublings},
          {"last_change", r.last_change},
          {"z_radius", r.z_radius},
          {"v_radius", r.v_radius},
          {"extended_precision", r.extended_precision},
          {"digits_lost", r.digits_lost}};
}

// --- subcommands -----------------------------------------------------------

Outcome cmd_simulate(const json& cfg, int threads) {
  SimPlan plan;
  try {
    from_json(cfg, plan);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, e.what());
  }
  const ObservationRecord rec = simulate(plan, threads);
  Outcome out;
  std::ostringstream csv;
  write_csv(csv, rec);
  out.artifacts.push_back({"simulate.csv", csv.str()});
  out.artifacts.push_back({"simulate_final.json", json(rec.finals.front()).dump(1) + "\n"});
  if (get<bool>(cfg, "svg")) {
    out.artifacts.push_back({"tiling.svg", svg::tiling(rec.finals.front())});
  }
  out.result = {{"events", rec.events}, {"rows", rec.rows.size()}};
  return out;
}

Outcome cmd_kernel(const json& cfg, int) {
  KernelQuery q;
  q.lv1 = {get<int>(cfg, "n1"), shift_of(cfg.at("a1"))};
  q.lv2 = {get<int>(cfg, "n2"), shift_of(cfg.at("a2"))};
  q.s1 = get<int>(cfg, "s1");
  q.s2 = get<int>(cfg, "s2");
  q.t = get<double>(cfg, "t");
  const KernelResult r = kernel_value(q, quadrature_of(cfg));
  Outcome out;
  out.result = kernel_json(r);
  out.result["conjugation"] = conjugation(q.lv1, q.s1, q.lv2, q.s2);
  out.artifacts.push_back({"kernel.json", out.result.dump(1) + "\n"});
  return out;
}

Outcome cmd_verify_identities(const json& cfg, int threads) {
  const auto times = get<std::vector<double>>(cfg, "t");
  const int samples = get<int>(cfg, "samples");
  const int lo = get<int>(cfg, "coord_min"), hi = get<int>(cfg, "coord_max");
  const int s_far = get<int>(cfg, "s_far");
  const double tol = get<double>(cfg, "tolerance");
  if (samples < 1 || lo < 0 || hi < std::max(lo, 2)) {
    throw Error(ErrorKind::InvalidArgument, "need samples >= 1 and 0 <= coord_min <= coord_max, coord_max >= 2");
  }
  std::mt19937_64 rng(get<std::uint64_t>(cfg, "seed"));
  std::uniform_int_distribution<int> coord(lo, hi);
  std::uniform_int_distribution<int> level(std::max(lo, 2), hi);
  Outcome out;
  auto rows = json::array();
  double worst = 0.0;
  for (double t : times) {
    std::vector<TriangleSample> s(samples);
    for (int i = 0; i < samples; ++i) {
      s[i] = {coord(rng), level(rng), coord(rng), level(rng)};
      if (i % 5 == 0) s[i] = {s[i].x, s[i].level, s[i].x, s[i].level};
    }
    std::vector<TriangleReport> reps(samples);
    parallel_for(samples, threads, [&](std::int64_t i) {
      reps[i] = check_triangle_identities({s[i]}, t);
    });
    double b = 0.0, w = 0.0;
    for (const auto& r : reps) {
      b = std::max(b, r.max_residual_black);
      w = std::max(w, r.max_residual_white);
    }
    worst = std::max({worst, b, w});
    auto far = json::array();
    for (int ell = 1; ell <= 4; ++ell) {
      for (const auto& f : check_far_right_limits(LevelIndex::from_linear(ell), t, {s_far})) {
        far.push_back({{"level", ell}, {"s", f.s}, {"type_ii", f.type_ii}, {"type_iii", f.type_iii}});
      }
    }
    rows.push_back({{"t", t},
                    {"samples", samples},
                    {"max_residual_black", b},
                    {"max_residual_white", w},
                    {"far_right", far}});
  }
  out.result = {{"rows", rows}, {"max_residual", worst}, {"pass", worst <= tol}};
  out.artifacts.push_back({"kernel_identities.json", out.result.dump(1) + "\n"});
  return out;
}

Outcome cmd_omega(const json& cfg, int) {
  const MacroPoint p{get<double>(cfg, "nu"), get<double>(cfg, "eta"), get<double>(cfg, "tau")};
  const FrozenBoundary fb = frozen_boundary(p.eta, p.tau);
  Outcome out;
  out.result = {{"nu", p.nu}, {"eta", p.eta}, {"tau", p.tau}, {"q1", fb.q1}, {"q2", fb.q2},
                {"in_domain", in_domain(p)}};
  if (!in_domain(p)) {
    throw Error(ErrorKind::OutOfDomain, "(nu, eta, tau) lies outside the liquid region (q1 = " +
                                            fmt_real(fb.q1) + ", q2 = " + fmt_real(fb.q2) + ")");
  }
  const SaddleData sd = saddle_data(p);
  out.result["omega"] = cjson(sd.omega);
  out.result["G"] = cjson(sd.g);
  out.result["G2"] = cjson(sd.g2);
  out.result["G1_residual"] = std::abs(d_action(p, sd.omega));
  out.result["theta"] = sd.theta;
  out.result["density"] = density(p);
  out.artifacts.push_back({"omega.json", out.result.dump(1) + "\n"});
  return out;
}

Outcome cmd_frozen_boundary(const json& cfg, int) {
  const auto etas = get<std::vector<double>>(cfg, "eta");
  const auto taus = get<std::vector<double>>(cfg, "tau");
  const bool diagonal = get<bool>(cfg, "diagonal");
  std::ostringstream csv;
  csv << "eta,tau,q1,q2\n";
  std::vector<svg::BoundaryCurve> curves;
  auto rows = json::array();
  auto emit = [&](double eta, double tau, svg::BoundaryCurve* c) {
    if (!(eta > 0.0) || !(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "eta and tau must be > 0");
    const FrozenBoundary fb = frozen_boundary(eta, tau);
    csv << fmt_real(eta) << ',' << fmt_real(tau) << ',' << fmt_real(fb.q1) << ',' << fmt_real(fb.q2) << '\n';
    rows.push_back({{"eta", eta}, {"tau", tau}, {"q1", fb.q1}, {"q2", fb.q2}});
    if (c) {
      c->eta.push_back(eta);
      c->q1.push_back(fb.q1);
      c->q2.push_back(fb.q2);
    }
  };
  if (diagonal) {
    for (double e : etas) emit(e, e, nullptr);
  } else {
    for (double tau : taus) {
      svg::BoundaryCurve c;
      c.tau = tau;
      for (double e : etas) emit(e, tau, &c);
      curves.push_back(std::move(c));
    }
  }
  Outcome out;
  out.result = {{"rows", rows}};
  out.artifacts.push_back({"frozen_boundary.csv", csv.str()});
  if (!curves.empty()) out.artifacts.push_back({"frozen_boundary.svg", svg::frozen_boundary(curves)});
  return out;
}

Outcome cmd_green(const json& cfg, int) {
  const cplx z = complex_of(cfg.at("z"), "z"), w = complex_of(cfg.at("w"), "w");
  if (!(z.imag() > 0.0) || !(w.imag() > 0.0)) {
    throw Error(ErrorKind::OutOfDomain, "z and w must lie in the upper half-plane");
  }
  Outcome out;
  out.result = {{"z", cjson(z)}, {"w", cjson(w)}, {"green", green(z, w)}};
  out.artifacts.push_back({"green.json", out.result.dump(1) + "\n"});
  return out;
}

Outcome cmd_gff_verify(const json& cfg, int threads) {
  ObservationPlan plan;
  try {
    from_json(cfg, plan);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, e.what());
  }
  if (plan.runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be >= 1");
  const GffReport rep = gff_comparison_report(plan, threads);
  Outcome out;
  std::ostringstream csv;
  write_pairs_csv(csv, rep);
  json report = rep;
  out.artifacts.push_back({"gff_pairs.csv", csv.str()});
  out.artifacts.push_back({"gff_report.json", report.dump(1) + "\n"});
  out.result = {{"pairs", report["pairs"]}, {"pass", report["pass"]}, {"events", rep.events}};
  return out;
}

Outcome cmd_saddle_compare(const json& cfg, int threads) {
  const double nu1 = get<double>(cfg, "nu1"), nu2 = get<double>(cfg, "nu2");
  const double eta = get<double>(cfg, "eta"), tau = get<double>(cfg, "tau");
  const int n_min = get<int>(cfg, "n_min"), n_max = get<int>(cfg, "n_max");
  const std::string orient = get<std::string>(cfg, "orientation");
  const std::string phase = get<std::string>(cfg, "phase");
  if (n_min < 1 || n_max < n_min) throw Error(ErrorKind::InvalidArgument, "need 1 <= n_min <= n_max");
  if (orient != "kernel" && orient != "direct") throw Error(ErrorKind::Schema, "orientation: kernel | direct");
  if (phase != "steepest" && phase != "printed") throw Error(ErrorKind::Schema, "phase: steepest | printed");
  const auto o = orient == "kernel" ? CrossOrientation::Kernel : CrossOrientation::Direct;
  const auto ph = phase == "steepest" ? PhaseConvention::SteepestDescent : PhaseConvention::Printed;
  const QuadratureSpec spec = quadrature_of(cfg);

  const int count = n_max - n_min + 1;
  std::vector<double> kq(count), sd(count);
  parallel_for(count, threads, [&](std::int64_t i) {
    const int N = n_min + static_cast<int>(i);
    const int n = std::max(1, static_cast<int>(std::lround(N * eta)));
    const int s1 = static_cast<int>(std::floor(N * nu1)), s2 = static_cast<int>(std::floor(N * nu2));
    const LevelIndex lv{n, Shift::Minus};
    kq[i] = kernel_value({lv, s1, lv, s2, N * tau}, spec).value;
    const MacroPoint p1{static_cast<double>(s1) / N, static_cast<double>(n) / N, tau};
    const MacroPoint p2{static_cast<double>(s2) / N, static_cast<double>(n) / N, tau};
    sd[i] = saddle_kernel_estimate(p1, p2, N, o, ph).value;
  });
  std::ostringstream csv;
  csv << "N,kernel,saddle,ratio\n";
  double sk = 0.0, ss = 0.0;
  for (int i = 0; i < count; ++i) {
    csv << n_min + i << ',' << fmt_real(kq[i]) << ',' << fmt_real(sd[i]) << ',' << fmt_real(kq[i] / sd[i]) << '\n';
    sk += kq[i] * kq[i];
    ss += sd[i] * sd[i];
  }
  Outcome out;
  out.result = {{"rms_ratio", std::sqrt(sk / ss)}, {"points", count}};
  out.artifacts.push_back({"saddle_compare.csv", csv.str()});
  out.artifacts.push_back({"saddle_compare.json", out.result.dump(1) + "\n"});
  return out;
}

Outcome cmd_accept(const json& cfg, int threads) {
  AcceptanceOptions opt;
  opt.threads = threads;
  opt.seed = get<std::uint64_t>(cfg, "seed");
  opt.only = get<std::vector<int>>(cfg, "only");
  opt.log = [](const std::string& line) { std::cerr << line << '\n'; };
  const auto results = run_acceptance(opt);
  Outcome out;
  out.result = json::array();
  int failed = 0;
  for (const auto& r : results) {
    out.result.push_back(r);
    if (!r.pass) ++failed;
  }
  out.artifacts.push_back({"acceptance.json", out.result.dump(1) + "\n"});
  out.exit_code = failed == 0 ? 0 : 1;
  return out;
}

const json kQuadDefaults = {{"nodes", 512}, {"tol", 1e-9}, {"v_radius", nullptr}};

std::vector<Command> commands() {
  std::vector<Command> c;
  c.push_back({"simulate", "run the particle dynamics and record probes",
               {"max_level", "t_end", "seed", "trajectories", "sample_times", "probes", "right_only", "svg"},
               {{"max_level", 8}, {"t_end", 1.0}, {"seed", 0}, {"trajectories", 1},
                {"sample_times", json::array()}, {"probes", json::array()}, {"right_only", false},
                {"svg", true}},
               cmd_simulate, true});
  json kdef = {{"n1", 1}, {"a1", "-1/2"}, {"s1", 0}, {"n2", 1}, {"a2", "-1/2"}, {"s2", 0}, {"t", 1.0}};
  kdef.update(kQuadDefaults);
  c.push_back({"kernel", "evaluate the correlation kernel",
               {"n1", "a1", "s1", "n2", "a2", "s2", "t", "nodes", "tol", "v_radius"}, kdef, cmd_kernel});
  c.push_back({"verify-kernel-identities", "triangle identities and far-right limits",
               {"t", "samples", "coord_min", "coord_max", "s_far", "seed", "tolerance"},
               {{"t", {0.5, 2.0}}, {"samples", 30}, {"coord_min", 2}, {"coord_max", 12},
                {"s_far", 40}, {"seed", 1}, {"tolerance", 1e-6}},
               cmd_verify_identities});
  c.push_back({"omega", "critical point and local data at (nu, eta, tau)", {"nu", "eta", "tau"},
               {{"nu", 1.0}, {"eta", 1.0}, {"tau", 1.0}}, cmd_omega});
  c.push_back({"frozen-boundary", "q1, q2 over an (eta, tau) grid", {"eta", "tau", "diagonal"},
               {{"eta", {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}}, {"tau", {1.0}}, {"diagonal", false}},
               cmd_frozen_boundary, true});
  c.push_back({"green", "Green's function between two upper half-plane points", {"z", "w"},
               {{"z", {0.0, 2.0}}, {"w", {0.0, 3.0}}}, cmd_green});
  c.push_back({"gff-verify", "Monte Carlo covariance and Wick checks",
               {"N", "tau", "probes", "runs", "seed", "batches"},
               {{"N", 48}, {"tau", 1.0}, {"probes", {{{"nu", 0.3}, {"eta", 0.5}}, {{"nu", 1.0}, {"eta", 0.5}}}},
                {"runs", 20000}, {"seed", 0}, {"batches", 20}},
               cmd_gff_verify, true});
  json sdef = {{"nu1", 1.0}, {"nu2", 1.4}, {"eta", 1.0}, {"tau", 1.0}, {"n_min", 40}, {"n_max", 60},
               {"orientation", "kernel"}, {"phase", "steepest"}};
  sdef.update(kQuadDefaults);
  c.push_back({"saddle-compare", "quadrature kernel against the saddle-point main term",
               {"nu1", "nu2", "eta", "tau", "n_min", "n_max", "orientation", "phase", "nodes", "tol", "v_radius"},
               sdef, cmd_saddle_compare, true});
  c.push_back({"accept", "run the acceptance suite", {"seed", "only"},
               {{"seed", 20240601}, {"only", json::array()}}, cmd_accept, true});
  return c;
}

// Flag name -> config key, per subcommand. Values are parsed as JSON when
// possible, otherwise kept as strings.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>> kFlags = {
    {"simulate", {{"--M", "max_level"}, {"--t", "t_end"}, {"--seed", "seed"}, {"--runs", "trajectories"},
                  {"--right-only", "right_only"}, {"--svg", "svg"}}},
    {"kernel", {{"--n1", "n1"}, {"--a1", "a1"}, {"--s1", "s1"}, {"--n2", "n2"}, {"--a2", "a2"},
                {"--s2", "s2"}, {"--t", "t"}, {"--nodes", "nodes"}, {"--tol", "tol"}, {"--vradius", "v_radius"}}},
    {"verify-kernel-identities", {{"--samples", "samples"}, {"--seed", "seed"}, {"--s-far", "s_far"},
                                  {"--tolerance", "tolerance"}}},
    {"omega", {{"--nu", "nu"}, {"--eta", "eta"}, {"--tau", "tau"}}},
    {"frozen-boundary", {{"--diagonal", "diagonal"}}},
    {"green", {{"--z", "z"}, {"--w", "w"}}},
    {"gff-verify", {{"--N", "N"}, {"--tau", "tau"}, {"--runs", "runs"}, {"--seed", "seed"}, {"--batches", "batches"}}},
    {"saddle-compare", {{"--nu1", "nu1"}, {"--nu2", "nu2"}, {"--eta", "eta"}, {"--tau", "tau"},
                        {"--n-min", "n_min"}, {"--n-max", "n_max"}, {"--orientation", "orientation"},
                        {"--phase", "phase"}, {"--nodes", "nodes"}, {"--vradius", "v_radius"}}},
    {"accept", {{"--seed", "seed"}}},
};

// List-valued flags: comma-separated reals, or repeated "a,b" pairs.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>> kListFlags = {
    {"verify-kernel-identities", {{"--times", "t"}}},
    {"frozen-boundary", {{"--eta", "eta"}, {"--tau", "tau"}}},
    {"accept", {{"--only", "only"}}},
};

void write_artifacts(const fs::path& dir, const std::vector<Artifact>& arts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  const std::string tag = ".tmp." + std::to_string(::getpid());
  std::vector<fs::path> temps;
  try {
    for (const auto& a : arts) {
      const fs::path tmp = dir / (a.name + tag);
      temps.push_back(tmp);
      std::ofstream os(tmp, std::ios::binary);
      os << a.content;
      os.close();
      if (!os) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < arts.size(); ++i) {
      fs::rename(temps[i], dir / arts[i].name, ec);
      if (ec) throw Error(ErrorKind::Io, "cannot rename into " + (dir / arts[i].name).string());
    }
  } catch (...) {
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

int emit_error(ErrorKind kind, const std::string& msg) {
  json e = {{"error", {{"kind", to_string(kind)}, {"message", msg}}}};
  std::cerr << e.dump() << '\n';
  return kind == ErrorKind::Schema || kind == ErrorKind::InvalidArgument ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gffi: wall-reflected interlacing particles, kernel, and GFF checks"};
  app.set_version_flag("--version", std::string(GFFI_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  int threads_flag = 0;
  std::string config_path, out_dir;
  bool no_write = false;
  app.add_option("--threads", threads_flag, "worker threads (default: GFFI_THREADS, then all cores)");
  app.add_option("--config", config_path, "JSON config; flags override its keys");
  app.add_option("--out", out_dir, "artifact directory");
  app.add_flag("--no-write", no_write, "print the result only");

  const auto cmds = commands();
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, std::vector<std::string>>> lists;
  std::map<std::string, std::vector<std::string>> probe_flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    subs[c.name] = sub;
    if (auto it = kFlags.find(c.name); it != kFlags.end()) {
      for (const auto& [flag, key] : it->second) sub->add_option(flag, values[c.name][key], key);
    }
    if (auto it = kListFlags.find(c.name); it != kListFlags.end()) {
      for (const auto& [flag, key] : it->second) {
        sub->add_option(flag, lists[c.name][key], key + " (comma-separated)")->delimiter(',');
      }
    }
    if (c.name == "gff-verify") {
      sub->add_option("--probe", probe_flags[c.name], "nu,eta (repeatable)");
    } else if (c.name == "simulate") {
      sub->add_option("--probe", probe_flags[c.name], "height probe x,level (repeatable)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error(ErrorKind::Schema, e.what());
  }

  const Command* cmd = nullptr;
  for (const auto& c : cmds) {
    if (subs[c.name]->parsed()) cmd = &c;
  }

  try {
    json cfg = cmd->defaults;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw Error(ErrorKind::Io, "cannot open config " + config_path);
      json file;
      try {
        file = json::parse(is);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::Schema, std::string("config is not valid JSON: ") + e.what());
      }
      if (!file.is_object()) throw Error(ErrorKind::Schema, "config must be a JSON object");
      for (auto it = file.begin(); it != file.end(); ++it) {
        if (it.key() == "command") {
          if (it.value() != cmd->name) {
            throw Error(ErrorKind::Schema, "config is for command " + it.value().dump());
          }
          continue;
        }
        if (!cmd->keys.count(it.key())) {
          throw Error(ErrorKind::Schema, "unknown key '" + it.key() + "' for " + cmd->name);
        }
        cfg[it.key()] = it.value();
      }
    }
    CLI::App* sub = subs[cmd->name];
    if (auto it = kFlags.find(cmd->name); it != kFlags.end()) {
      for (const auto& [flag, key] : it->second) {
        if (sub->count(flag) > 0) cfg[key] = scalar(values[cmd->name][key]);
      }
    }
    if (auto it = kListFlags.find(cmd->name); it != kListFlags.end()) {
      for (const auto& [flag, key] : it->second) {
        if (sub->count(flag) == 0) continue;
        json arr = json::array();
        for (const auto& v : lists[cmd->name][key]) arr.push_back(scalar(v));
        cfg[key] = arr;
      }
    }
    if (probe_flags.count(cmd->name) && sub->count("--probe") > 0) {
      json arr = json::array();
      for (const auto& p : probe_flags[cmd->name]) {
        const auto v = split_reals(p);
        if (v.size() != 2) throw Error(ErrorKind::Schema, "--probe takes two comma-separated numbers");
        if (cmd->name == "gff-verify") {
          arr.push_back({{"nu", v[0]}, {"eta", v[1]}});
        } else {
          arr.push_back({{"kind", "height"}, {"x", static_cast<int>(v[0])}, {"level", static_cast<int>(v[1])}});
        }
      }
      cfg["probes"] = arr;
    }

    const int threads = resolve_threads(threads_flag);
    Outcome out = cmd->run(cfg, threads);

    const bool write = !no_write && (cmd->writes_by_default || !out_dir.empty());
    if (write) {
      json manifest = {{"tool", "gffi"},
                       {"version", GFFI_VERSION},
                       {"command", cmd->name},
                       {"config", cfg},
                       {"config_hash", hash_hex(cmd->name + cfg.dump())}};
      if (cfg.contains("seed")) manifest["seed"] = cfg["seed"];
      auto names = json::array();
      for (const auto& a : out.artifacts) names.push_back(a.name);
      manifest["artifacts"] = names;
      out.artifacts.push_back({cmd->name + ".manifest.json", manifest.dump(1) + "\n"});
      write_artifacts(out_dir.empty() ? fs::path(".") : fs::path(out_dir), out.artifacts);
    }
    std::cout << out.result.dump(1) << '\n';
    return out.exit_code;
  } catch (const Error& e) {
    return emit_error(e.kind(), e.what());
  } catch (const json::exception& e) {
    return emit_error(ErrorKind::Schema, e.what());
  } catch (const std::exception& e) {
    return emit_error(ErrorKind::InvalidArgument, e.what());
  }
}
