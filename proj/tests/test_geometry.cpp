#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pwhyp/arrangement.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/geometry.hpp"
#include "pwhyp/interval.hpp"
#include "pwhyp/rng.hpp"

using namespace pwhyp;

TEST_CASE("interval arithmetic encloses the rounded result") {
  const Interval a(0.1), b(0.2);
  const Interval s = a + b;
  CHECK(s.contains(0.1 + 0.2));
  CHECK(s.lo() < s.hi());
  const Interval p = Interval(-1.0, 2.0) * Interval(3.0, 4.0);
  CHECK(p.lo() <= -4.0);
  CHECK(p.hi() >= 8.0);
  CHECK(sqr(Interval(-2.0, 1.0)).lo() == 0.0);
}

TEST_CASE("cones transport by slope") {
  const Mat2 shear{1.0, 0.5, 0.0, 2.0};
  // (s, 1) -> (s + 0.5, 2): slope (s + 0.5) / 2.
  CHECK(*map_direction(shear, 0.0) == doctest::Approx(0.25));
  const Cone image = map_cone(IntervalMat2::from(shear), Cone(0.0, 1.0));
  CHECK(image.s_lo() <= 0.25);
  CHECK(image.s_hi() >= 0.75);
  CHECK(image.s_lo() > 0.25 - 1e-12);
  CHECK(image.s_hi() < 0.75 + 1e-12);
  CHECK_THROWS_AS(map_cone(IntervalMat2::from(Mat2{1.0, 0.0, 1.0, 0.0}), Cone(0.0, 1.0)), Error);
  CHECK(cones_disjoint(Cone(0.0, 1.0), Cone(2.0, 3.0)).disjoint);
  const ConeDisjointness touch = cones_disjoint(Cone(0.0, 1.0), Cone(1.0, 3.0));
  CHECK(touch.boundary_touch);
  CHECK_FALSE(cones_disjoint(Cone(0.0, 1.5), Cone(1.0, 3.0)).disjoint);
}

TEST_CASE("segment intersections") {
  const auto hits = intersect_segments({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].point.x1 == doctest::Approx(1.0));
  CHECK(hits[0].t == doctest::Approx(0.5));
  CHECK(intersect_segments({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}).empty());
  CHECK(intersect_segments({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}).size() == 2);
}

TEST_CASE("polyline arc length, projection and refinement") {
  const Polyline p({{0, 0}, {3, 0}, {3, 4}});
  CHECK(p.length() == doctest::Approx(7.0));
  CHECK(p.point_at(5.0).x2 == doctest::Approx(2.0));
  const auto [s, q] = p.project({4, 1});
  CHECK(s == doctest::Approx(4.0));
  CHECK(q.x1 == doctest::Approx(3.0));
  const Polyline sub = p.slice(1.0, 5.0);
  CHECK(sub.length() == doctest::Approx(4.0));
  const Polyline r = p.refined(0.3);
  CHECK(r.length() == doctest::Approx(7.0));
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r.arc_at(i) - r.arc_at(i - 1) <= 0.3 + 1e-12);
  CHECK_THROWS_AS(Polyline({{1, 1}, {1, 1}}), Error);
}

namespace {

// Independent Cramer-rule crossing test for segments in general position.
std::optional<Point2> cramer(const Segment& s, const Segment& r) {
  const double d = (s.b.x1 - s.a.x1) * (r.b.x2 - r.a.x2) - (s.b.x2 - s.a.x2) * (r.b.x1 - r.a.x1);
  if (d == 0.0) return std::nullopt;
  const double t = ((r.a.x1 - s.a.x1) * (r.b.x2 - r.a.x2) - (r.a.x2 - s.a.x2) * (r.b.x1 - r.a.x1)) / d;
  const double u = ((r.a.x1 - s.a.x1) * (s.b.x2 - s.a.x2) - (r.a.x2 - s.a.x2) * (s.b.x1 - s.a.x1)) / d;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return lerp(s.a, s.b, t);
}

}  // namespace

TEST_CASE("arrangement matches brute-force pair crossings") {
  CounterRng rng(derive_seed(11, "arrangement-test"));
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Segment> segs;
    for (int i = 0; i < 25; ++i) {
      segs.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1)}, {rng.uniform(-1, 1), rng.uniform(-1, 1)}});
    }
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < segs.size(); ++i)
      for (std::size_t j = i + 1; j < segs.size(); ++j) crossings += cramer(segs[i], segs[j]).has_value();
    const SegmentArrangement arr(segs);
    std::size_t interior = 0;
    for (const ArrangementVertex& v : arr.vertices()) {
      if (v.multiplicity() == 2) {
        ++interior;
        CHECK(v.wedges == 4);
      }
    }
    CHECK(interior == crossings);
  }
}

TEST_CASE("concurrent segments form one vertex with 2k wedges") {
  std::vector<Segment> segs;
  const double pi = std::acos(-1.0);
  for (int i = 0; i < 5; ++i) {
    const double a = pi * i / 5.0;
    segs.push_back({{-std::cos(a), -std::sin(a)}, {std::cos(a), std::sin(a)}});
  }
  const SegmentArrangement arr(segs);
  const auto centre = std::find_if(arr.vertices().begin(), arr.vertices().end(),
                                   [](const ArrangementVertex& v) { return norm(v.point) < 1e-9; });
  REQUIRE(centre != arr.vertices().end());
  CHECK(centre->multiplicity() == 5);
  CHECK(centre->wedges == 10);
}

TEST_CASE("counter-based streams are reproducible and split-independent") {
  CounterRng a(derive_seed(3, "x", 1));
  CounterRng b(derive_seed(3, "x", 1), 5);
  for (int i = 0; i < 5; ++i) a.next_u64();
  CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_seed(3, "x", 1) != derive_seed(3, "x", 2));
  CHECK(derive_seed(3, "x") != derive_seed(3, "y"));
  CounterRng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK((v >= 0.0 && v < 1.0));
  }
}
