#include "pwhyp/geometry.hpp"

#include <algorithm>
#include <limits>

#include "pwhyp/error.hpp"

namespace pwhyp {

std::optional<Mat2> Mat2::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
  return Mat2{a22 / d, -a12 / d, -a21 / d, a11 / d};
}

Cone::Cone(double s_lo, double s_hi) : s_lo_(s_lo), s_hi_(s_hi) {
  if (!(s_lo <= s_hi) || !std::isfinite(s_lo) || !std::isfinite(s_hi)) {
    throw Error(ErrorKind::InvalidParameters, "cone needs finite slopes with s_lo <= s_hi");
  }
}

Cone Cone::horizontal() {
  Cone c;
  c.horizontal_ = true;
  return c;
}

bool Cone::contains_direction(Point2 v, double tol) const {
  if (horizontal_) return true;
  const auto s = slope_of(v);
  return s && contains_slope(*s, tol);
}

std::optional<double> slope_of(Point2 v) {
  if (v.x2 == 0.0) return std::nullopt;
  return v.x1 / v.x2;
}

std::optional<double> map_direction(const Mat2& m, double slope) {
  return slope_of(m * Point2{slope, 1.0});
}

namespace {

Interval transport(const IntervalMat2& m, double s) {
  const Interval num = m.a11 * Interval(s) + m.a12;
  const Interval den = m.a21 * Interval(s) + m.a22;
  return num / den;
}

}  // namespace

Cone map_cone(const IntervalMat2& m, const Cone& c) {
  if (c.contains_horizontal()) {
    throw Error(ErrorKind::DegenerateImage, "cannot transport a cone containing the horizontal");
  }
  // For a fixed matrix s -> (a11 s + a12) / (a21 s + a22) is monotone on any
  // interval where the denominator keeps its sign, so the extremes over the
  // cone sit at its two boundary slopes. Each entry appears once per
  // endpoint evaluation, which keeps the enclosure tight.
  const Interval den = m.a21 * c.slopes() + m.a22;
  if (den.contains_zero()) {
    throw Error(ErrorKind::DegenerateImage, "a cone direction can map to the horizontal");
  }
  const Interval image = Interval::hull(transport(m, c.s_lo()), transport(m, c.s_hi()));
  return Cone(image.lo(), image.hi());
}

ConeDisjointness cones_disjoint(const Cone& a, const Cone& b) {
  if (a.contains_horizontal() || b.contains_horizontal()) {
    return {false, false};
  }
  if (a.is_ray() || b.is_ray()) {
    const bool apart = a.s_hi() < b.s_lo() || b.s_hi() < a.s_lo();
    return {apart, false};
  }
  const bool touch = a.s_hi() == b.s_lo() || b.s_hi() == a.s_lo();
  const bool apart = a.s_hi() <= b.s_lo() || b.s_hi() <= a.s_lo();
  return {apart, touch};
}

std::vector<SegmentHit> intersect_segments(const Segment& s, const Segment& r, double tol) {
  const Point2 d1 = s.b - s.a;
  const Point2 d2 = r.b - r.a;
  const double len1 = norm(d1);
  const double len2 = norm(d2);
  std::vector<SegmentHit> hits;
  if (len1 == 0.0 || len2 == 0.0) return hits;

  const Point2 w = r.a - s.a;
  const double denom = cross(d1, d2);
  const double tol1 = tol / len1;
  const double tol2 = tol / len2;

  if (std::abs(denom) > 1e-14 * len1 * len2) {
    double t = cross(w, d2) / denom;
    double u = cross(w, d1) / denom;
    if (t < -tol1 || t > 1.0 + tol1 || u < -tol2 || u > 1.0 + tol2) return hits;
    t = std::clamp(t, 0.0, 1.0);
    u = std::clamp(u, 0.0, 1.0);
    hits.push_back({lerp(s.a, s.b, t), t, u});
    return hits;
  }

  // Parallel: only collinear overlaps produce hits.
  if (std::abs(cross(d1, w)) / len1 > tol) return hits;
  const double inv = 1.0 / (len1 * len1);
  double t0 = dot(w, d1) * inv;
  double t1 = dot(r.b - s.a, d1) * inv;
  if (t0 > t1) std::swap(t0, t1);
  const double lo = std::max(0.0, t0);
  const double hi = std::min(1.0, t1);
  if (lo > hi + tol1) return hits;
  auto param_on_r = [&](double t) {
    const Point2 p = lerp(s.a, s.b, t);
    return std::clamp(dot(p - r.a, d2) / (len2 * len2), 0.0, 1.0);
  };
  hits.push_back({lerp(s.a, s.b, lo), lo, param_on_r(lo)});
  if ((hi - lo) * len1 > tol) hits.push_back({lerp(s.a, s.b, hi), hi, param_on_r(hi)});
  return hits;
}

Polyline::Polyline(std::vector<Point2> vertices, double merge_tol) {
  vertices_.reserve(vertices.size());
  for (const Point2& p : vertices) {
    if (!is_finite(p)) throw Error(ErrorKind::InvalidParameters, "polyline vertex is not finite");
    if (!vertices_.empty() && distance(vertices_.back(), p) <= merge_tol) continue;
    vertices_.push_back(p);
  }
  if (vertices_.size() < 2) {
    throw Error(ErrorKind::InvalidParameters, "polyline needs at least two distinct vertices");
  }
  cumulative_.resize(vertices_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + distance(vertices_[i - 1], vertices_[i]);
  }
}

Point2 Polyline::point_at(double s) const {
  if (s <= 0.0) return vertices_.front();
  if (s >= length()) return vertices_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  const double chord = cumulative_[i] - cumulative_[i - 1];
  const double t = chord > 0.0 ? (s - cumulative_[i - 1]) / chord : 0.0;
  return lerp(vertices_[i - 1], vertices_[i], t);
}

std::pair<double, Point2> Polyline::project(Point2 p) const {
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  Point2 best_p = vertices_.front();
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const Point2 a = vertices_[i - 1];
    const Point2 d = vertices_[i] - a;
    const double dd = dot(d, d);
    const double t = dd > 0.0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
    const Point2 q = lerp(a, vertices_[i], t);
    const double dist = distance(p, q);
    if (dist < best_d) {
      best_d = dist;
      best_s = cumulative_[i - 1] + t * (cumulative_[i] - cumulative_[i - 1]);
      best_p = q;
    }
  }
  return {best_s, best_p};
}

Polyline Polyline::slice(double s0, double s1) const {
  s0 = std::clamp(s0, 0.0, length());
  s1 = std::clamp(s1, 0.0, length());
  std::vector<Point2> out;
  out.push_back(point_at(s0));
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (cumulative_[i] > s0 && cumulative_[i] < s1) out.push_back(vertices_[i]);
  }
  out.push_back(point_at(s1));
  return Polyline(std::move(out), 1e-15);
}

Polyline Polyline::refined(double max_chord) const {
  std::vector<Point2> out;
  out.reserve(vertices_.size());
  out.push_back(vertices_.front());
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const double chord = cumulative_[i] - cumulative_[i - 1];
    const auto pieces = static_cast<std::size_t>(std::ceil(chord / max_chord));
    for (std::size_t j = 1; j < pieces; ++j) {
      out.push_back(lerp(vertices_[i - 1], vertices_[i], static_cast<double>(j) / static_cast<double>(pieces)));
    }
    out.push_back(vertices_[i]);
  }
  return Polyline(std::move(out));
}

}  // namespace pwhyp
