// Command-line front end: pwhyp <verify|dimension|render|growth|transversality>
//   --config PATH [--seed U64] [--out DIR] [--threads N]
// Exit status: 0 success, 1 negative verdict or failed analysis, 2 usage or
// config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pwhyp/attractor_io.hpp"
#include "pwhyp/cone_verifier.hpp"
#include "pwhyp/curve_engine.hpp"
#include "pwhyp/dimension.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/json_io.hpp"
#include "pwhyp/rng.hpp"
#include "pwhyp/text_io.hpp"
#include "pwhyp/transversality.hpp"

namespace fs = std::filesystem;
using namespace pwhyp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitConfig = 2;

Json default_config() {
  return Json::parse(R"({
    "seed": 0,
    "threads": 1,
    "verify": {
      "checks": ["unstable_cone", "condition_T", "multiplicity"],
      "cone": null,
      "multiplicity": {"cu": null, "cd": null, "search_budget": 64}
    },
    "dimension": {
      "methods": ["formula", "boxcount", "energy"],
      "lyapunov": {"steps": 1000000, "burn_in": 100},
      "boxcount": {"points": 10000000, "burn_in": 1000, "orbits": 1, "min_level": 4, "max_level": 9},
      "energy": {"q": 1, "l": 0.05, "seed_curve": null, "generations": [12, 14, 16],
                 "points_per_curve": 64, "pairs": 4000000,
                 "s_lo": 1.05, "s_hi": 1.95, "s_step": 0.05,
                 "m_low": 1e4, "m_mid": 1e6, "m_high": 1e8}
    },
    "render": {"width": 512, "height": 512, "points": 1000000, "burn_in": 1000, "orbits": 1, "write_csv": false},
    "growth": {"q": 1, "l": 0.05, "generations": 15, "burn_in": 5, "seed_curve": null, "refine_step": 1e-3,
               "multiplicity": {"mode": "auto", "n": 8}},
    "transversality": {"trials": 100, "epsilon": 0.05, "delta": 1e-3, "half_length": 0.1,
                       "ball_divisions": 4, "sample_divisions": 16}
  })");
}

struct Run {
  Json config;
  MapSpec spec;
  std::uint64_t seed;
  unsigned threads;
  fs::path out;
};

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
}

// Config errors and map-parameter errors both end the run with status 2.
Run load_run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<unsigned> threads,
             const std::string& out) {
  const fs::path path(config_path);
  Json user = read_json_file(path);
  if (!user.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  if (!user.contains("map")) throw Error(ErrorKind::ConfigError, "config needs a map");
  Json map_json = user["map"];
  if (map_json.is_string()) map_json = read_json_file(path.parent_path() / map_json.get<std::string>());

  Json config = default_config();
  config.merge_patch(user);
  if (seed) config["seed"] = *seed;
  if (threads) config["threads"] = *threads;
  if (!config["seed"].is_number_unsigned()) throw Error(ErrorKind::ConfigError, "seed must be a non-negative integer");
  if (!config["threads"].is_number_unsigned() || config["threads"].get<unsigned>() == 0) {
    throw Error(ErrorKind::ConfigError, "threads must be a positive integer");
  }

  try {
    MapSpec spec = map_from_json(map_json);
    config["map"] = map_to_json(spec);
    return Run{config, std::move(spec), config["seed"].get<std::uint64_t>(), config["threads"].get<unsigned>(), out};
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

// The thread count is left out: results do not depend on it.
Json envelope(const Run& run, const char* command) {
  Json config = run.config;
  config.erase("threads");
  return Json{{"command", command}, {"config", config}, {"spec_hash", hash_hex(run.spec.content_hash())}};
}

void emit(const Run& run, const std::string& name, const std::string& content) {
  fs::create_directories(run.out);
  write_file_atomic((run.out / name).string(), content);
}

// Explicit nulls remove keys during the merge, so absent means null.
Json nullable(const Json& j, const char* key) { return j.contains(key) ? j.at(key) : Json(nullptr); }

Cone cone_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::ConfigError, "cone must be [s_lo, s_hi]");
  return Cone(j[0].get<double>(), j[1].get<double>());
}

Polyline seed_curve(const MapSpec& spec, const Json& j, double l) {
  if (j.is_null()) {
    const Box& k = spec.domain();
    const Point2 c{k.center().x1, k.center().x2 + 0.25 * k.height()};
    return Polyline({{c.x1, c.x2 - 0.5 * l}, {c.x1, c.x2 + 0.5 * l}});
  }
  if (!j.is_array() || j.size() < 2) throw Error(ErrorKind::ConfigError, "seed_curve must list at least two points");
  std::vector<Point2> pts;
  for (const Json& p : j) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return Polyline(std::move(pts));
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Run& run) {
  const Json& cfg = run.config.at("verify");
  Json report = envelope(run, "verify");
  bool ok = true;
  auto failed = [&](const char* check, const Error& e) {
    report[check] = Json{{"status", "inapplicable"}, {"error", e.what()}};
    ok = false;
  };

  for (const Json& check_json : cfg.at("checks")) {
    const std::string check = check_json.get<std::string>();
    if (check == "unstable_cone") {
      const Json cone_json = nullable(cfg, "cone");
      const Cone cone = cone_json.is_null() ? default_unstable_cone(run.spec) : cone_from(cone_json);
      try {
        const ConeCertificate cert = certify_unstable_cone(run.spec, cone);
        Json j = to_json(cert);
        j["status"] = cert.invariant && cert.expanding ? "pass" : "fail";
        ok = ok && cert.invariant && cert.expanding;
        report["unstable_cone"] = j;
      } catch (const Error& e) {
        failed("unstable_cone", e);
      }
    } else if (check == "condition_T") {
      try {
        const ConeCertificate cert = check_condition_T_cones(run.spec);
        Json j = to_json(cert);
        const bool pass = cert.invariant && cert.expanding && cert.disjoint_images;
        j["status"] = pass ? "pass" : "fail";
        ok = ok && pass;
        report["condition_T"] = j;
      } catch (const Error& e) {
        failed("condition_T", e);
      }
    } else if (check == "multiplicity") {
      const Json& m = cfg.at("multiplicity");
      try {
        Cone cu, cd;
        const Json cu_json = nullable(m, "cu"), cd_json = nullable(m, "cd");
        if (cu_json.is_null() != cd_json.is_null()) throw Error(ErrorKind::ConfigError, "give both cu and cd or neither");
        if (cu_json.is_null()) {
          std::tie(cu, cd) = search_multiplicity_cones(run.spec, m.at("search_budget").get<int>());
        } else {
          cu = cone_from(cu_json);
          cd = cone_from(cd_json);
        }
        const MultiplicityCertificate cert = check_multiplicity_cones(run.spec, cu, cd);
        Json j = to_json(cert);
        j["status"] = cert.pass() ? "pass" : "fail";
        ok = ok && cert.pass();
        report["multiplicity"] = j;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        failed("multiplicity", e);
      }
    } else {
      throw Error(ErrorKind::ConfigError, "unknown check '" + check + "'");
    }
  }
  report["pass"] = ok;
  emit(run, "verify.json", dump(report));
  return ok ? kExitOk : kExitNegative;
}

// ------------------------------------------------------------- dimension

DimensionReport run_formula(const Run& run) {
  const Json& cfg = run.config.at("dimension").at("lyapunov");
  double chi_u, chi_s;
  if (const auto exact = run.spec.analytic_exponents()) {
    std::tie(chi_u, chi_s) = *exact;
  } else {
    const LyapunovEstimate est = estimate_lyapunov(run.spec, cfg.at("steps").get<std::size_t>(),
                                                   derive_seed(run.seed, "lyapunov"), cfg.at("burn_in").get<std::size_t>());
    chi_u = est.chi_u;
    chi_s = est.chi_s;
  }
  const FormulaResult f = dim_formula(chi_u, chi_s);
  DimensionReport r;
  r.method = "formula";
  r.value = f.value;
  r.invertible = f.invertible;
  return r;
}

DimensionReport run_boxcount(const Run& run) {
  const Json& cfg = run.config.at("dimension").at("boxcount");
  const PointCloud cloud =
      sample_orbit_cloud(run.spec, cfg.at("burn_in").get<std::size_t>(), cfg.at("points").get<std::size_t>(),
                         derive_seed(run.seed, "boxcount"), cfg.at("orbits").get<std::size_t>(), run.threads);
  return box_count_dimension(cloud.points, cfg.at("min_level").get<int>(), cfg.at("max_level").get<int>(), run.spec.domain());
}

DimensionReport run_energy(const Run& run) {
  const Json& cfg = run.config.at("dimension").at("energy");
  const double l = cfg.at("l").get<double>();
  CurveEngineOptions opts;
  opts.cone = default_unstable_cone(run.spec);
  opts.threads = run.threads;
  const CurveFamily seed_family =
      CurveFamily::seed(seed_curve(run.spec, nullable(cfg, "seed_curve"), l), cfg.at("q").get<int>(), l);
  const auto ppc = cfg.at("points_per_curve").get<std::size_t>();

  // Generations are requested in increasing order; continue from the last one.
  CurveFamily current = seed_family;
  const MeasureGenerator generator = [&](std::size_t n) {
    if (n < current.generation) current = seed_family;
    current = run_family(run.spec, current, n - current.generation, opts);
    return build_mu_n(current, ppc);
  };

  ScanOptions scan;
  scan.s_grid = make_grid(cfg.at("s_lo").get<double>(), cfg.at("s_hi").get<double>(), cfg.at("s_step").get<double>());
  scan.generations = cfg.at("generations").get<std::vector<std::size_t>>();
  scan.m_low = cfg.at("m_low").get<double>();
  scan.m_mid = cfg.at("m_mid").get<double>();
  scan.m_high = cfg.at("m_high").get<double>();
  scan.pairs = cfg.at("pairs").get<std::size_t>();
  scan.seed = derive_seed(run.seed, "energy");
  scan.energy.threads = run.threads;
  return critical_exponent_scan(generator, scan);
}

std::string energy_scan_csv(const DimensionReport& r) {
  std::ostringstream os;
  os << "s,verdict,m_ratio_bounded,m_ratio_divergent";
  for (double m : r.caps) os << ",E_M" << fmt_real(m);
  if (!r.scan.empty()) {
    for (std::size_t i = 0; i < r.scan.front().generation_ratios.size(); ++i) {
      os << ",ratio_n" << r.generations[i + 1] << "_n" << r.generations[i];
    }
  }
  os << '\n';
  for (const EnergyScanRow& row : r.scan) {
    os << fmt_real(row.s) << ',' << row.verdict << ',' << fmt_real(row.m_ratio_bounded) << ','
       << fmt_real(row.m_ratio_divergent);
    for (double e : row.energy_by_M) os << ',' << fmt_real(e);
    for (double g : row.generation_ratios) os << ',' << fmt_real(g);
    os << '\n';
  }
  return os.str();
}

int cmd_dimension(const Run& run) {
  Json report = envelope(run, "dimension");
  report["methods"] = Json::object();
  bool ok = true;
  for (const Json& method_json : run.config.at("dimension").at("methods")) {
    const std::string method = method_json.get<std::string>();
    DimensionReport r;
    try {
      if (method == "formula") {
        r = run_formula(run);
      } else if (method == "boxcount") {
        r = run_boxcount(run);
      } else if (method == "energy") {
        r = run_energy(run);
        emit(run, "energy_scan.csv", energy_scan_csv(r));
      } else {
        throw Error(ErrorKind::ConfigError, "unknown method '" + method + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ConfigError) throw;
      r = DimensionReport{};
      r.method = method == "energy" ? "energy-critical" : method;
      r.status = to_string(e.kind());
      r.value = std::nan("");
      report["methods"][method]["error"] = e.what();
    }
    if (r.status != "ok") ok = false;
    report["methods"][method].update(to_json(r));
    if (method == "formula" && r.invertible) {
      std::printf("formula dimension %.6f (%s)\n", r.value, *r.invertible ? "invertible" : "non-invertible");
    }
  }
  emit(run, "dimension.json", dump(report));
  return ok ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------- render

int cmd_render(const Run& run) {
  const Json& cfg = run.config.at("render");
  const PointCloud cloud =
      sample_orbit_cloud(run.spec, cfg.at("burn_in").get<std::size_t>(), cfg.at("points").get<std::size_t>(),
                         derive_seed(run.seed, "render"), cfg.at("orbits").get<std::size_t>(), run.threads);
  const RasterImage img = rasterize(cloud.points, cfg.at("width").get<int>(), cfg.at("height").get<int>(), run.spec.domain());
  emit(run, "attractor.pgm", encode_pgm(img));
  if (cfg.at("write_csv").get<bool>()) {
    std::ostringstream os;
    write_cloud_csv(os, cloud.points);
    emit(run, "attractor.csv", os.str());
  }
  Json meta = envelope(run, "render");
  const Box& w = img.world;
  meta["image"] = {{"file", "attractor.pgm"}, {"width", img.width}, {"height", img.height},
                   {"world", {w.x1_lo, w.x1_hi, w.x2_lo, w.x2_hi}}};
  meta["cloud"] = {{"mode", cloud.mode},     {"points", cloud.points.size()}, {"burn_in", cloud.burn_in},
                   {"orbits", cloud.orbits}, {"restarts", cloud.restarts}};
  emit(run, "attractor.json", dump(meta));
  return kExitOk;
}

// ---------------------------------------------------------------- growth

int cmd_growth(const Run& run) {
  const Json& cfg = run.config.at("growth");
  const double l = cfg.at("l").get<double>();
  CurveEngineOptions opts;
  opts.cone = default_unstable_cone(run.spec);
  opts.refine_step = cfg.at("refine_step").get<double>();
  opts.threads = run.threads;
  const CurveFamily seed = CurveFamily::seed(seed_curve(run.spec, nullable(cfg, "seed_curve"), l), cfg.at("q").get<int>(), l);

  Json report = envelope(run, "growth");
  bool ok = true;
  GrowthLog log;
  try {
    run_family(run.spec, seed, cfg.at("generations").get<std::size_t>(), opts, &log);
  } catch (const Error& e) {
    report["error"] = e.what();
    ok = false;
  }
  std::ostringstream growth_csv;
  write_growth_csv(growth_csv, log);
  emit(run, "growth.csv", growth_csv.str());
  report["log"] = to_json(log);
  try {
    report["rate"] = growth_rate(log, cfg.at("burn_in").get<std::size_t>());
  } catch (const Error& e) {
    report["rate"] = nullptr;
    report["rate_error"] = e.what();
    ok = false;
  }

  const Json& m = cfg.at("multiplicity");
  const std::string mode = m.at("mode").get<std::string>();
  const auto n = m.at("n").get<std::size_t>();
  try {
    MultiplicityEstimate est;
    if (mode == "exact" || (mode == "auto" && run.spec.is_affine())) {
      est = multiplicity_exact(run.spec, n);
    } else if (mode == "proxy" || mode == "auto") {
      est = multiplicity_proxy(run.spec, n);
    } else {
      throw Error(ErrorKind::ConfigError, "multiplicity mode must be auto, exact or proxy");
    }
    std::ostringstream mult_csv;
    write_multiplicity_csv(mult_csv, est);
    emit(run, "multiplicity.csv", mult_csv.str());
    report["multiplicity"] = to_json(est);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    report["multiplicity"] = Json{{"error", e.what()}};
    ok = false;
  }
  emit(run, "growth.json", dump(report));
  return ok ? kExitOk : kExitNegative;
}

// -------------------------------------------------------- transversality

int cmd_transversality(const Run& run) {
  const Json& cfg = run.config.at("transversality");
  ConditionTOptions opts;
  opts.epsilon = cfg.at("epsilon").get<double>();
  opts.delta = cfg.at("delta").get<double>();
  opts.half_length = cfg.at("half_length").get<double>();
  opts.check.ball_divisions = cfg.at("ball_divisions").get<int>();
  opts.check.sample_divisions = cfg.at("sample_divisions").get<int>();
  opts.threads = run.threads;
  Json report = envelope(run, "transversality");
  bool ok = false;
  try {
    const ConditionTReport r =
        sample_condition_T(run.spec, cfg.at("trials").get<std::size_t>(), derive_seed(run.seed, "condition-T"), opts);
    report["condition_T"] = to_json(r);
    ok = r.passed;
  } catch (const Error& e) {
    report["error"] = e.what();
  }
  emit(run, "transversality.json", dump(report));
  return ok ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verifier for piecewise hyperbolic planar maps"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out = ".";

  using Command = int (*)(const Run&);
  const std::pair<const char*, Command> commands[] = {
      {"verify", cmd_verify},   {"dimension", cmd_dimension},           {"render", cmd_render},
      {"growth", cmd_growth},   {"transversality", cmd_transversality},
  };
  const char* descriptions[] = {"cone and multiplicity certificates", "dimension estimates",
                                "attractor raster image", "curve-family growth and multiplicity",
                                "sampled transversality of image curves"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "global seed (overrides the config)");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  try {
    const Run run = load_run(config_path, seed, threads, out);
    return commands[which].second(run);
  } catch (const Error& e) {
    std::cerr << "pwhyp: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitNegative;
  } catch (const Json::exception& e) {
    std::cerr << "pwhyp: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "pwhyp: " << e.what() << '\n';
    return kExitNegative;
  }
}
