#include "pwhyp/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "pwhyp/error.hpp"

namespace pwhyp {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

double get_real(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) config_error(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

Polynomial get_poly(const Json& j, const char* key, const Polynomial& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_array()) config_error(std::string("field '") + key + "' must be an array of coefficients");
  Polynomial p;
  for (const Json& c : j[key]) {
    if (!c.is_number()) config_error(std::string("field '") + key + "' must hold numbers");
    p.coeffs.push_back(c.get<double>());
  }
  return p;
}

Point2 get_point(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) config_error(what + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

MapSpec belykh_from_json(const Json& j, BelykhParams p) {
  p.lambda = get_real(j, "lambda", p.lambda);
  p.gamma = get_real(j, "gamma", p.gamma);
  p.rho = get_real(j, "rho", p.rho);
  p.k = get_real(j, "k", p.k);
  p.a1 = get_real(j, "a1", p.a1);
  p.a2 = get_real(j, "a2", p.a2);
  p.b1 = get_real(j, "b1", p.b1);
  p.b2 = get_real(j, "b2", p.b2);
  p.psi1 = get_poly(j, "psi1", p.psi1);
  p.psi2 = get_poly(j, "psi2", p.psi2);
  if (j.contains("rho_psi")) p.rho_psi = get_real(j, "rho_psi", 0.0);
  return MapSpec::belykh(p);
}

MapSpec generic_from_json(const Json& j) {
  if (!j.contains("domain") || !j["domain"].is_array() || j["domain"].size() != 4) {
    config_error("generic_affine needs domain [x1_lo, x1_hi, x2_lo, x2_hi]");
  }
  const Json& d = j["domain"];
  for (const Json& v : d) {
    if (!v.is_number()) config_error("domain entries must be numbers");
  }
  const Box box{d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()};
  std::vector<Line> lines;
  for (const Json& l : j.value("lines", Json::array())) {
    if (!l.contains("normal") || !l.contains("offset")) config_error("line needs normal and offset");
    lines.push_back({get_point(l["normal"], "line normal"), get_real(l, "offset", 0.0)});
  }
  std::vector<Piece> pieces;
  for (const Json& pc : j.value("pieces", Json::array())) {
    Piece piece;
    if (!pc.contains("signs") || !pc["signs"].is_array()) config_error("piece needs signs");
    for (const Json& s : pc["signs"]) {
      if (!s.is_number_integer()) config_error("piece signs must be +1 or -1");
      piece.signs.push_back(s.get<int>());
    }
    if (!pc.contains("linear") || !pc["linear"].is_array() || pc["linear"].size() != 2) {
      config_error("piece needs linear [[a11, a12], [a21, a22]]");
    }
    const Point2 r1 = get_point(pc["linear"][0], "linear row");
    const Point2 r2 = get_point(pc["linear"][1], "linear row");
    piece.branch.linear = Mat2{r1.x1, r1.x2, r2.x1, r2.x2};
    piece.branch.offset = pc.contains("offset") ? get_point(pc["offset"], "piece offset") : Point2{0.0, 0.0};
    pieces.push_back(std::move(piece));
  }
  return MapSpec::generic_affine(box, std::move(lines), std::move(pieces));
}

Json poly_json(const Polynomial& p) { return Json(p.coeffs); }

Json opt(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

MapSpec map_from_json(const Json& j) {
  if (!j.is_object()) config_error("map description must be an object");
  if (j.contains("schema") && j["schema"] != kMapSchema) config_error("unsupported map schema");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) config_error("preset must be a string");
    const std::string preset = j["preset"].get<std::string>();
    if (preset == "figure") return belykh_from_json(j, BelykhParams::figure_map());
    if (preset == "figure_half_lambda") return belykh_from_json(j, BelykhParams::figure_map_half_lambda());
    if (preset == "rho_zero") return belykh_from_json(j, BelykhParams::degenerate_rho_zero());
    if (preset == "remark") return MapSpec::degenerate_remark();
    config_error("unknown preset '" + preset + "'");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) config_error("map needs a kind or a preset");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "belykh") {
    for (const char* key : {"lambda", "gamma", "rho", "k", "b1", "b2"}) {
      if (!j.contains(key)) config_error(std::string("belykh map needs field '") + key + "'");
    }
    return belykh_from_json(j, BelykhParams{});
  }
  if (kind == "degenerate_remark") return MapSpec::degenerate_remark();
  if (kind == "generic_affine") return generic_from_json(j);
  config_error("unknown map kind '" + kind + "'");
}

Json map_to_json(const MapSpec& spec) {
  Json j;
  j["schema"] = kMapSchema;
  j["kind"] = to_string(spec.kind());
  if (const auto& p = spec.belykh_params()) {
    j["lambda"] = p->lambda;
    j["gamma"] = p->gamma;
    j["rho"] = p->rho;
    j["k"] = p->k;
    j["a1"] = p->a1;
    j["a2"] = p->a2;
    j["b1"] = p->b1;
    j["b2"] = p->b2;
    j["psi1"] = poly_json(p->psi1);
    j["psi2"] = poly_json(p->psi2);
    j["rho_psi"] = spec.rho_psi();
  } else if (spec.kind() == MapKind::GenericAffine) {
    const Box& b = spec.domain();
    j["domain"] = {b.x1_lo, b.x1_hi, b.x2_lo, b.x2_hi};
    j["lines"] = Json::array();
    for (const Line& l : spec.lines()) j["lines"].push_back({{"normal", {l.normal.x1, l.normal.x2}}, {"offset", l.offset}});
    j["pieces"] = Json::array();
    for (const Piece& pc : spec.pieces()) {
      const Mat2& m = pc.branch.linear;
      j["pieces"].push_back({{"signs", pc.signs},
                             {"linear", {{m.a11, m.a12}, {m.a21, m.a22}}},
                             {"offset", {pc.branch.offset.x1, pc.branch.offset.x2}}});
    }
  }
  return j;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const Cone& c) {
  if (c.contains_horizontal()) return Json{{"horizontal", true}};
  return Json{{"s_lo", c.s_lo()}, {"s_hi", c.s_hi()}};
}

Json to_json(const ConeCertificate& c) {
  Json j;
  j["unstable_cone"] = to_json(c.unstable_cone);
  j["image_cones"] = Json::array();
  for (const Cone& im : c.image_cones) j["image_cones"].push_back(to_json(im));
  j["invariant"] = c.invariant;
  j["expansion_lower_bound"] = c.expansion_lower_bound;
  j["expanding"] = c.expanding;
  j["disjoint_images"] = c.disjoint_images;
  j["boundary_touch"] = c.boundary_touch;
  j["equivalent_inequality_holds"] = opt(c.equivalent_inequality_holds);
  j["agreement"] = opt(c.agreement);
  return j;
}

Json to_json(const MultiplicityCertificate& c) {
  Json j;
  j["cu"] = to_json(c.cu);
  j["cd"] = to_json(c.cd);
  j["tangent_images"] = Json::array();
  for (const Cone& im : c.tangent_images) j["tangent_images"].push_back(to_json(im));
  j["cd_images"] = Json::array();
  for (const Cone& im : c.cd_images) j["cd_images"].push_back(to_json(im));
  j["tangent_image_in_cd"] = c.tangent_image_in_cd;
  j["cd_maps_into_cu"] = c.cd_maps_into_cu;
  j["cd_cu_disjoint"] = c.cd_cu_disjoint;
  j["tangent_N_outside_cu"] = c.tangent_N_outside_cu;
  j["pass"] = c.pass();
  return j;
}

Json to_json(const TransversalityReport& r) {
  Json j{{"epsilon", r.epsilon},   {"delta", r.delta},   {"passed", r.passed},
         {"delta_max", r.delta_max}, {"vacuous", r.vacuous}, {"balls_checked", r.balls_checked}};
  j["witness"] = r.witness ? Json{r.witness->x1, r.witness->x2} : Json(nullptr);
  return j;
}

Json to_json(const ConditionTReport& r) {
  Json j{{"epsilon", r.epsilon},     {"trials", r.trials}, {"vacuous_trials", r.vacuous_trials},
         {"delta_max", r.delta_max}, {"passed", r.passed}};
  j["witness"] = r.witness ? Json{r.witness->x1, r.witness->x2} : Json(nullptr);
  return j;
}

Json to_json(const LyapunovEstimate& e) {
  return Json{{"chi_u", e.chi_u},       {"chi_s", e.chi_s},       {"steps", e.steps}, {"stderr_u", e.stderr_u},
              {"stderr_s", e.stderr_s}, {"seed", e.seed},         {"restarts", e.restarts}};
}

Json to_json(const DimensionReport& r) {
  Json j;
  j["method"] = r.method;
  j["status"] = r.status;
  j["value"] = real_or_null(r.value);
  if (r.invertible) j["invertible"] = *r.invertible;
  if (r.bracket_lo) j["bracket"] = {*r.bracket_lo, *r.bracket_hi};
  if (!r.levels.empty()) {
    j["points"] = r.points;
    j["intercept"] = r.intercept;
    j["r_squared"] = r.r_squared;
    j["levels"] = Json::array();
    for (const BoxCountLevel& l : r.levels) {
      j["levels"].push_back({{"level", l.level}, {"occupied", l.occupied}, {"used", l.used}, {"residual", l.residual}});
    }
  }
  if (!r.scan.empty()) {
    j["caps"] = r.caps;
    j["generations"] = r.generations;
    j["scan"] = Json::array();
    for (const EnergyScanRow& row : r.scan) {
      j["scan"].push_back({{"s", row.s},
                           {"energy_by_M", row.energy_by_M},
                           {"generation_ratios", row.generation_ratios},
                           {"m_ratio_bounded", row.m_ratio_bounded},
                           {"m_ratio_divergent", row.m_ratio_divergent},
                           {"verdict", row.verdict}});
    }
  }
  return j;
}

Json to_json(const EnergyEstimate& e) {
  return Json{{"s", e.s},           {"M", e.M}, {"n", e.n}, {"value", e.value}, {"pairs_sampled", e.pairs_sampled},
              {"stderr", e.std_error}, {"seed", e.seed}, {"duplicate_mass", e.duplicate_mass}};
}

Json to_json(const GrowthLog& log) {
  Json j = Json::array();
  for (const GenerationRecord& r : log.records) {
    j.push_back({{"n", r.n},
                 {"count", r.count},
                 {"total_length", r.total_length},
                 {"mapped_length", r.mapped_length},
                 {"cut_events", r.cut_events},
                 {"discarded_length", r.discarded_length}});
  }
  return j;
}

Json to_json(const MultiplicityEstimate& e) {
  Json j;
  j["mode"] = to_string(e.mode);
  j["rate"] = e.rate;
  j["records"] = Json::array();
  for (const MultiplicityRecord& r : e.records) {
    j["records"].push_back(
        {{"n", r.n}, {"k_n", r.k_n}, {"max_concurrent", r.max_concurrent}, {"segments", r.segments}});
  }
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace pwhyp
