// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "pwhyp/attractor_io.hpp"
#include "pwhyp/cone_verifier.hpp"
#include "pwhyp/curve_engine.hpp"
#include "pwhyp/dimension.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/json_io.hpp"
#include "pwhyp/rng.hpp"
#include "pwhyp/transversality.hpp"
#include "transversality_oracle.hpp"

using namespace pwhyp;
namespace fs = std::filesystem;

namespace {

constexpr double kFormulaTol = 1e-5;
constexpr double kLyapunovTol = 1e-9;
constexpr double kBoxTolBelykh = 0.15;
constexpr double kBoxTolSegment = 0.05;
constexpr double kGrowthTolBelykh = 0.09;
constexpr double kGrowthTolRemark = 0.02;
constexpr double kBracketWidth = 0.2;
constexpr double kBetaTol = 1e-8;
constexpr double kBetaAtThreeTol = 1e-10;
constexpr double kCylinderBelow = 0.1;
constexpr double kCylinderAbove = 0.05;

const fs::path kScratch = fs::temp_directory_path() / "pwhyp_acceptance";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::create_directories(kScratch);
  const fs::path p = kScratch / name;
  std::ofstream(p) << body;
  return p;
}

int run_cli(const std::string& command, const fs::path& config, const fs::path& out) {
  const std::string cmd = std::string(PWHYP_CLI) + " " + command + " --config " + config.string() + " --out " +
                          out.string() + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

Json load(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Adaptive Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-13, 60);
}

CurveEngineOptions engine_options(const MapSpec& f) {
  CurveEngineOptions o;
  o.cone = default_unstable_cone(f);
  return o;
}

// Vertical seed segment of length l centred a quarter of the height above the
// centre of K (the command-line default).
CurveFamily default_seed(const MapSpec& f, double l) {
  const Box& k = f.domain();
  const double x = k.center().x1, y = k.center().x2 + 0.25 * k.height();
  return CurveFamily::seed(Polyline({{x, y - 0.5 * l}, {x, y + 0.5 * l}}), 1, l);
}

// ------------------------------------------------------------------------

Outcome formula_values() {
  const fs::path fig = write_config("c1_fig.json", R"({"map": {"preset": "figure"}, "dimension": {"methods": ["formula"]}})");
  const fs::path half =
      write_config("c1_half.json", R"({"map": {"preset": "figure_half_lambda"}, "dimension": {"methods": ["formula"]}})");
  if (run_cli("dimension", fig, kScratch / "c1_fig") != 0 || run_cli("dimension", half, kScratch / "c1_half") != 0) {
    return {false, "dimension command failed"};
  }
  const double a = load(kScratch / "c1_fig" / "dimension.json")["methods"]["formula"]["value"].get<double>();
  const double b = load(kScratch / "c1_half" / "dimension.json")["methods"]["formula"]["value"].get<double>();
  const bool pass = std::abs(a - 1.488206) <= kFormulaTol && std::abs(b - 1.847999) <= kFormulaTol;
  return {pass, fmt("figure %.7f (1.488206), lambda 0.5 %.7f (1.847999), tol %.0e", a, b, kFormulaTol)};
}

Outcome cone_equivalence() {
  CounterRng rng(derive_seed(2024, "acceptance-cone-equivalence"));
  int agree = 0, total = 0, rejected = 0;
  while (total < 1000) {
    BelykhParams p;
    p.lambda = rng.uniform(0.05, 0.8);
    p.gamma = rng.uniform(1.05, 1.95);
    p.rho = rng.uniform(0.01, 0.2) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    p.b1 = -(p.gamma - 1.0);
    p.b2 = p.gamma - 1.0;
    std::optional<MapSpec> f;
    try {
      f = MapSpec::belykh(p);
    } catch (const Error&) {
      ++rejected;  // not a self-map of K
      continue;
    }
    ++total;
    agree += check_condition_T_cones(*f).disjoint_images == (p.gamma > 2.0 * p.lambda);
  }
  return {agree == total, fmt("%d / %d agree (%d draws rejected as not mapping K into itself)", agree, total, rejected)};
}

Outcome lyapunov_exactness() {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const LyapunovEstimate e = estimate_lyapunov(f, 100000, seed);
    worst = std::max({worst, std::abs(e.chi_u - std::log(1.8)), std::abs(e.chi_s - std::log(0.3))});
  }
  return {worst <= kLyapunovTol, fmt("worst deviation %.3e over 10 seeds, tol %.0e", worst, kLyapunovTol)};
}

Outcome box_counting() {
  struct Case {
    const char* name;
    MapSpec spec;
    double target, tol;
  };
  const Case cases[] = {
      {"figure", MapSpec::belykh(BelykhParams::figure_map()), 1.488, kBoxTolBelykh},
      {"lambda 0.5", MapSpec::belykh(BelykhParams::figure_map_half_lambda()), 1.848, kBoxTolBelykh},
      {"rho 0", MapSpec::belykh(BelykhParams::degenerate_rho_zero()), 1.0, kBoxTolSegment},
      {"remark", MapSpec::degenerate_remark(), 1.0, kBoxTolSegment},
  };
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const PointCloud cloud = sample_orbit_cloud(c.spec, 1000, 10000000, derive_seed(1, "acceptance-boxcount"));
    const double d = box_count_dimension(cloud.points, 4, 9, c.spec.domain()).value;
    pass = pass && std::abs(d - c.target) <= c.tol;
    detail += fmt("%s %.4f (%.3f +- %.2f); ", c.name, d, c.target, c.tol);
  }
  return {pass, detail};
}

Outcome curve_growth() {
  const MapSpec fig = MapSpec::belykh(BelykhParams::figure_map());
  GrowthLog log_fig;
  run_family(fig, default_seed(fig, 0.05), 15, engine_options(fig), &log_fig);
  const double r_fig = growth_rate(log_fig, 5);
  const MapSpec rem = MapSpec::degenerate_remark();
  GrowthLog log_rem;
  run_family(rem, default_seed(rem, 0.05), 15, engine_options(rem), &log_rem);
  const double r_rem = growth_rate(log_rem, 5);
  const bool pass =
      std::abs(r_fig - std::log(1.8)) <= kGrowthTolBelykh && std::abs(r_rem - std::log(2.0)) <= kGrowthTolRemark;
  return {pass, fmt("figure %.4f (log 1.8 +- %.2f), remark %.4f (log 2 +- %.2f), N(15) = %zu", r_fig,
                    kGrowthTolBelykh, r_rem, kGrowthTolRemark, log_fig.records.back().count)};
}

Outcome energy_dichotomy() {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const CurveFamily seed = default_seed(f, 0.05);
  CurveFamily current = seed;
  const CurveEngineOptions opts = engine_options(f);
  ScanOptions scan;
  scan.s_grid = make_grid(1.05, 1.95, 0.05);
  scan.generations = {12, 14, 16};
  scan.seed = derive_seed(0, "energy");
  const DimensionReport r = critical_exponent_scan(
      [&](std::size_t n) {
        current = run_family(f, current, n - current.generation, opts);
        return build_mu_n(current, 64);
      },
      scan);
  std::string v13 = "missing", v17 = "missing";
  for (const EnergyScanRow& row : r.scan) {
    if (std::abs(row.s - 1.3) < 1e-9) v13 = row.verdict;
    if (std::abs(row.s - 1.7) < 1e-9) v17 = row.verdict;
  }
  const bool bracketed = r.bracket_lo && *r.bracket_lo <= 1.488 && *r.bracket_hi >= 1.488 &&
                         *r.bracket_hi - *r.bracket_lo <= kBracketWidth + 1e-9;
  const bool pass = v13 == "bounded" && v17 == "divergent" && bracketed && r.status == "ok";
  return {pass, fmt("s=1.3 %s, s=1.7 %s, bracket [%.2f, %.2f] (width <= %.1f, contains 1.488), status %s", v13.c_str(),
                    v17.c_str(), r.bracket_lo.value_or(NAN), r.bracket_hi.value_or(NAN), kBracketWidth, r.status.c_str())};
}

Outcome beta_identity() {
  const double pi = std::acos(-1.0);
  double worst = 0.0;
  for (double s : {1.5, 2.0, 2.5, 3.0}) {
    // x = tan(t), then t = (pi / 2)(1 - w^2).
    const auto g = [s, pi](double w) {
      if (w == 0.0) return s == 1.5 ? pi / std::sqrt(pi / 2.0) : 0.0;
      return std::pow(std::sin(pi * w * w / 2.0), s - 2.0) * pi * w;
    };
    worst = std::max(worst, std::abs(beta_integral(s) - integrate(g, 0.0, 1.0)));
  }
  const double at3 = std::abs(beta_integral(3.0) - 1.0);
  return {worst <= kBetaTol && at3 <= kBetaAtThreeTol,
          fmt("worst quadrature gap %.2e (tol %.0e), |B(3) - 1| = %.2e (tol %.0e)", worst, kBetaTol, at3, kBetaAtThreeTol)};
}

Outcome multiplicity() {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const MultiplicityEstimate est = multiplicity_exact(f, 8);
  bool bounded = true;
  std::string ks;
  for (const MultiplicityRecord& r : est.records) {
    bounded = bounded && r.k_n <= 2 * (r.max_concurrent + 1) * r.n;
    ks += std::to_string(r.k_n) + (r.n < 8 ? "," : "");
  }
  const bool cones = check_multiplicity_cones(f, Cone(0.0, 0.6), Cone(1.0, 3.0)).pass();
  return {bounded && cones, fmt("k_1..k_8 = %s, L = %zu, bound k_n <= 2(L+1)n %s; witness cones %s", ks.c_str(),
                                est.records.back().max_concurrent, bounded ? "holds" : "violated",
                                cones ? "pass" : "fail")};
}

Outcome cylinders() {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const PointCloud cloud = sample_orbit_cloud(f, 1000, 1000000, derive_seed(1, "acceptance-cylinders"));
  const std::size_t count = count_cylinders(f, cloud.points, 12);
  const double rate = std::log(static_cast<double>(count)) / 12.0;
  const double target = std::log(1.8);
  const bool pass = rate >= target - kCylinderBelow && rate <= target + kCylinderAbove;
  return {pass, fmt("M(12) = %zu on 10^6 attractor points, rate %.4f in [%.4f, %.4f]", count, rate,
                    target - kCylinderBelow, target + kCylinderAbove)};
}

Outcome transversality() {
  const ConditionTReport fig = sample_condition_T(MapSpec::belykh(BelykhParams::figure_map()), 100, derive_seed(0, "condition-T"));
  const ConditionTReport flat =
      sample_condition_T(MapSpec::belykh(BelykhParams::degenerate_rho_zero()), 100, derive_seed(0, "condition-T"));
  int agree = 0;
  const auto corpus = oracle::corpus();
  for (const auto& p : corpus) {
    agree += check_pair_transversal(p.g1, p.g2, 0.05, p.delta).passed == oracle::transversal(p.g1, p.g2, 0.05, p.delta);
  }
  const bool pass = fig.delta_max > 0.0 && flat.delta_max == 0.0 && agree == static_cast<int>(corpus.size());
  return {pass, fmt("figure delta_max %.4f (> 0), rho 0 delta_max %.4f (= 0), oracle agreement %d / %zu", fig.delta_max,
                    flat.delta_max, agree, corpus.size())};
}

Outcome determinism() {
  const fs::path cfg = write_config("c11.json", R"({
    "map": {"preset": "figure"}, "seed": 42,
    "dimension": {"boxcount": {"points": 1000000},
                  "energy": {"generations": [8, 10, 12], "points_per_curve": 16, "pairs": 200000}},
    "render": {"width": 256, "height": 256, "points": 300000, "write_csv": true},
    "growth": {"generations": 12},
    "transversality": {"trials": 20}})");
  const std::vector<std::pair<const char*, std::vector<const char*>>> expected = {
      {"verify", {"verify.json"}},
      {"dimension", {"dimension.json", "energy_scan.csv"}},
      {"render", {"attractor.pgm", "attractor.json", "attractor.csv"}},
      {"growth", {"growth.csv", "multiplicity.csv", "growth.json"}},
      {"transversality", {"transversality.json"}},
  };
  std::size_t files = 0;
  std::string differing;
  for (const auto& [command, outputs] : expected) {
    const fs::path a = kScratch / "c11_a" / command, b = kScratch / "c11_b" / command;
    fs::remove_all(a);
    fs::remove_all(b);
    const int ca = run_cli(command, cfg, a), cb = run_cli(command, cfg, b);
    if (ca != cb) differing += std::string(command) + " (exit status) ";
    for (const char* name : outputs) {
      if (!fs::exists(a / name) || !fs::exists(b / name)) {
        differing += std::string(command) + "/" + name + " (missing) ";
      } else if (slurp(a / name) != slurp(b / name)) {
        differing += std::string(command) + "/" + name + " ";
      }
      ++files;
    }
  }
  return {differing.empty(),
          differing.empty() ? fmt("%zu output files byte-identical across two runs of all five commands", files)
                            : "differences: " + differing};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "formula values", 1.0, formula_values},
      {2, "cone disjointness <=> gamma > 2 lambda", 1.0, cone_equivalence},
      {3, "Lyapunov exactness", 5.0, lyapunov_exactness},
      {4, "box-count dimension", 300.0, box_counting},
      {5, "curve family growth", 120.0, curve_growth},
      {6, "energy dichotomy", 600.0, energy_dichotomy},
      {7, "beta identity", 1.0, beta_identity},
      {8, "multiplicity", 60.0, multiplicity},
      {9, "cylinder growth", 120.0, cylinders},
      {10, "transversality diagnostics", 120.0, transversality},
      {11, "determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0.0 || secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::string budget = c.budget_s > 0.0 ? fmt(" / %.0f s", c.budget_s) : std::string();
    std::printf("%s criterion %2d  %-40s %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs,
                budget.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
