#include <cmath>
#include <set>

#include "doctest.h"
#include "pwhyp/arrangement.hpp"
#include "pwhyp/cone_verifier.hpp"
#include "pwhyp/curve_engine.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/orbit.hpp"
#include "pwhyp/rng.hpp"

using namespace pwhyp;

namespace {

CurveEngineOptions options(const MapSpec& f, unsigned threads = 1) {
  CurveEngineOptions o;
  o.cone = default_unstable_cone(f);
  o.threads = threads;
  return o;
}

// Root of the line residual along a chord by plain bisection.
Point2 bisect(const Line& line, Point2 a, Point2 b) {
  double lo = 0.0, hi = 1.0;
  const bool neg = line.eval(a) < 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((line.eval(lerp(a, b, mid)) < 0.0) == neg ? lo : hi) = mid;
  }
  return lerp(a, b, 0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("curves split at the singularity line") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const Point2 a{0.3, -0.4}, b{0.35, 0.5};
  const auto pieces = split_at_singularity(f, Polyline({a, b}));
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].piece == 2);
  CHECK(pieces[1].piece == 1);
  const Point2 root = bisect(f.lines()[0], a, b);
  CHECK(distance(pieces[0].curve.back(), root) < 1e-11);
  CHECK(distance(pieces[1].curve.front(), root) < 1e-11);
  CHECK(split_at_singularity(f, Polyline({{0, 0.5}, {0, 0.6}})).size() == 1);
}

TEST_CASE("advance keeps lengths in [l, 2l] and tangents in the cone") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  CurveFamily fam = CurveFamily::seed(Polyline({{0, 0.45}, {0, 0.5}}), 1, 0.05);
  const CurveEngineOptions opts = options(f);
  for (int n = 0; n < 8; ++n) {
    GenerationRecord rec;
    fam = advance_family(f, fam, opts, &rec);
    CHECK(rec.count == fam.curves.size());
    CHECK(rec.total_length == doctest::Approx(fam.total_length()));
  }
  REQUIRE(fam.curves.size() > 10);
  for (const TaggedCurve& c : fam.curves) {
    CHECK(c.curve.length() >= 0.05 - 1e-12);
    CHECK(c.curve.length() <= 0.1 + 1e-12);
    const auto v = c.curve.vertices();
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(opts.cone.contains_direction(v[i] - v[i - 1], 1e-9));
    CHECK(c.itinerary.size() == fam.generation);
  }
}

TEST_CASE("curve construction does not depend on the thread count") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const CurveFamily seed = CurveFamily::seed(Polyline({{0, 0.45}, {0, 0.5}}), 1, 0.05);
  const CurveFamily a = run_family(f, seed, 9, options(f, 1));
  const CurveFamily b = run_family(f, seed, 9, options(f, 4));
  REQUIRE(a.curves.size() == b.curves.size());
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    const auto va = a.curves[i].curve.vertices(), vb = b.curves[i].curve.vertices();
    REQUIRE(va.size() == vb.size());
    for (std::size_t k = 0; k < va.size(); ++k) CHECK(va[k] == vb[k]);
  }
}

TEST_CASE("remark map curve count doubles") {
  const MapSpec f = MapSpec::degenerate_remark();
  GrowthLog log;
  run_family(f, CurveFamily::seed(Polyline({{0.3, 0.2}, {0.3, 0.4}}), 1, 0.1), 10, options(f), &log);
  CHECK(growth_rate(log, 3) == doctest::Approx(std::log(2.0)).epsilon(0.02));
  GrowthLog short_log;
  short_log.records.resize(2);
  CHECK_THROWS_AS(growth_rate(short_log, 0), Error);
}

TEST_CASE("cylinder counts") {
  const MapSpec f = MapSpec::degenerate_remark();
  std::vector<Point2> pts;
  CounterRng rng(1);
  for (int i = 0; i < 100000; ++i) pts.push_back({rng.uniform(), rng.uniform()});
  CHECK(count_cylinders(f, pts, 10) == 1024);
  CHECK(count_cylinders(f, pts, 1) == 2);
}

TEST_CASE("expansion filter keeps every curve of an affine map") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const CurveFamily fam = run_family(f, CurveFamily::seed(Polyline({{0, 0.45}, {0, 0.5}}), 1, 0.05), 6, options(f));
  const CurveFamily kept = filter_by_expansion(f, fam, 5, 1e-6, std::log(1.8), std::log(0.3));
  CHECK(kept.curves.size() == fam.curves.size());
  const CurveFamily none = filter_by_expansion(f, fam, 5, 1e-3, std::log(1.9), std::log(0.3));
  CHECK(none.curves.empty());
}

TEST_CASE("exact multiplicity against a circle oracle") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const MultiplicityEstimate est = multiplicity_exact(f, 3);
  REQUIRE(est.records.size() == 3);

  // Count distinct 2-step itineraries on small circles around every vertex of
  // the preimage arrangement and at points along N.
  const SegmentArrangement arr(singularity_preimages(f, 2));
  std::vector<Point2> centres;
  for (const ArrangementVertex& v : arr.vertices()) centres.push_back(v.point);
  for (int i = 1; i < 20; ++i) centres.push_back({-1.0 + i / 10.0, 0.1 * (-1.0 + i / 10.0)});
  std::size_t k2 = 0;
  const double pi = std::acos(-1.0);
  for (Point2 c : centres) {
    if (std::abs(c.x1) > 1.0 - 1e-6 || std::abs(c.x2) > 1.0 - 1e-6) continue;
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < 3600; ++i) {
      const double a = 2.0 * pi * (i + 0.5) / 3600.0;
      const Point2 p{c.x1 + 1e-7 * std::cos(a), c.x2 + 1e-7 * std::sin(a)};
      const auto i1 = f.try_classify(p, 0.0);
      if (!i1) continue;
      const auto i2 = f.try_classify(f.branch(*i1).apply(p), 0.0);
      if (i2) seen.insert({*i1, *i2});
    }
    k2 = std::max(k2, seen.size());
  }
  CHECK(est.records[1].k_n == k2);
  CHECK_THROWS_AS(multiplicity_exact(f, 11), Error);
}

TEST_CASE("multiplicity bound on the figure map") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const MultiplicityEstimate est = multiplicity_exact(f, 8);
  for (const MultiplicityRecord& r : est.records) {
    CHECK(r.k_n <= 2 * (r.max_concurrent + 1) * r.n);
    CHECK(r.k_n >= 2);
  }
}
