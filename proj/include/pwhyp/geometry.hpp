#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "pwhyp/interval.hpp"

namespace pwhyp {

/// Snapping tolerance for intersections, singularity proximity and domain
/// membership. Functions that use it take it as a defaulted parameter.
inline constexpr double kGeomTol = 1e-12;

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x1, s * a.x2}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Point2 a, Point2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Point2 a) { return std::hypot(a.x1, a.x2); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x1 + t * (b.x1 - a.x1), a.x2 + t * (b.x2 - a.x2)}; }
inline bool is_finite(Point2 p) { return std::isfinite(p.x1) && std::isfinite(p.x2); }

/// Row-major 2x2 matrix; acts on column vectors (x1, x2).
struct Mat2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static Mat2 identity() { return {}; }
  Point2 operator*(Point2 v) const { return {a11 * v.x1 + a12 * v.x2, a21 * v.x1 + a22 * v.x2}; }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  double det() const { return a11 * a22 - a12 * a21; }
  std::optional<Mat2> inverse() const;
  bool finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) && std::isfinite(a22);
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Matrix whose entries range independently over intervals.
struct IntervalMat2 {
  Interval a11{1.0}, a12{0.0};
  Interval a21{0.0}, a22{1.0};

  static IntervalMat2 from(const Mat2& m) { return {m.a11, m.a12, m.a21, m.a22}; }
  bool contains(const Mat2& m) const {
    return a11.contains(m.a11) && a12.contains(m.a12) && a21.contains(m.a21) && a22.contains(m.a22);
  }
};

/// Direction cone in the plane written as a slope interval: the direction
/// (a, b) with b != 0 is inside iff a / b lies in [s_lo, s_hi]. Slopes are
/// x1-over-x2, so slope 0 is the vertical direction. A zero-width cone
/// (s_lo == s_hi) is a single ray. Cones that contain the horizontal
/// direction cannot be written this way and carry the horizontal flag.
class Cone {
 public:
  Cone() = default;
  Cone(double s_lo, double s_hi);
  static Cone horizontal();

  double s_lo() const { return s_lo_; }
  double s_hi() const { return s_hi_; }
  bool contains_horizontal() const { return horizontal_; }
  bool is_ray() const { return !horizontal_ && s_lo_ == s_hi_; }
  double width() const { return s_hi_ - s_lo_; }

  bool contains_slope(double s, double tol = 0.0) const {
    return !horizontal_ && s_lo_ - tol <= s && s <= s_hi_ + tol;
  }
  bool contains_direction(Point2 v, double tol = 0.0) const;
  bool subset_of(const Cone& o) const {
    return !horizontal_ && !o.horizontal_ && o.s_lo_ <= s_lo_ && s_hi_ <= o.s_hi_;
  }
  Interval slopes() const { return {s_lo_, s_hi_}; }

  friend bool operator==(const Cone&, const Cone&) = default;

 private:
  double s_lo_ = 0.0;
  double s_hi_ = 0.0;
  bool horizontal_ = false;
};

/// Slope of v in the (., 1) normalization; nullopt for horizontal vectors.
std::optional<double> slope_of(Point2 v);

/// Image slope of `slope` under m; nullopt when the image is horizontal.
std::optional<double> map_direction(const Mat2& m, double slope);

/// Enclosure of the image cone under every matrix in `m`. Throws
/// Error(DegenerateImage) if some matrix can send a cone direction to the
/// horizontal.
Cone map_cone(const IntervalMat2& m, const Cone& c);

struct ConeDisjointness {
  bool disjoint = false;
  /// The cones share only a boundary ray.
  bool boundary_touch = false;
};

/// Disjointness of open slope intervals. Rays are compared as closed sets.
ConeDisjointness cones_disjoint(const Cone& a, const Cone& b);

struct Segment {
  Point2 a;
  Point2 b;
  double length() const { return distance(a, b); }
};

struct SegmentHit {
  Point2 point;
  double t = 0.0;  // parameter along the first segment
  double u = 0.0;  // parameter along the second segment
};

/// Proper or touching intersection of two segments. Collinear overlaps
/// report the overlap endpoints (up to two hits).
std::vector<SegmentHit> intersect_segments(const Segment& s, const Segment& r, double tol = kGeomTol);

/// Ordered vertex chain with cached arc-length prefix sums.
class Polyline {
 public:
  Polyline() = default;
  /// Requires >= 2 vertices; consecutive duplicates (closer than
  /// `merge_tol`) are dropped. Throws InvalidParameters otherwise.
  explicit Polyline(std::vector<Point2> vertices, double merge_tol = 0.0);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& front() const { return vertices_.front(); }
  const Point2& back() const { return vertices_.back(); }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  /// Arc length from the start to vertex i.
  double arc_at(std::size_t i) const { return cumulative_[i]; }

  /// Point at arc length `s` from the start (clamped to [0, length]).
  Point2 point_at(double s) const;
  /// Arc-length position of the point closest to p, and that point.
  std::pair<double, Point2> project(Point2 p) const;
  /// Sub-curve between arc lengths s0 < s1.
  Polyline slice(double s0, double s1) const;
  /// Inserts vertices so that no chord is longer than `max_chord`.
  Polyline refined(double max_chord) const;
  Point2 midpoint() const { return point_at(0.5 * length()); }

 private:
  std::vector<Point2> vertices_;
  std::vector<double> cumulative_;
};

}  // namespace pwhyp
