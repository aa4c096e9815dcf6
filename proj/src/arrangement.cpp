#include "pwhyp/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pwhyp/error.hpp"

namespace pwhyp {

namespace {

bool lex_less(Point2 a, Point2 b) { return a.x1 < b.x1 || (a.x1 == b.x1 && a.x2 < b.x2); }

bool segment_less(const Segment& s, const Segment& r) {
  if (s.a != r.a) return lex_less(s.a, r.a);
  return lex_less(s.b, r.b);
}

struct RawHit {
  Point2 point;
  std::size_t i;
  std::size_t j;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::size_t count_wedges(Point2 v, const std::vector<Segment>& segs, const std::vector<std::size_t>& ids,
                         double tol) {
  std::vector<double> angles;
  for (std::size_t id : ids) {
    const Segment& s = segs[id];
    const double len = s.length();
    const double t = std::clamp(dot(v - s.a, s.b - s.a) / (len * len), 0.0, 1.0);
    const Point2 d = s.b - s.a;
    if (t * len > tol) angles.push_back(std::atan2(-d.x2, -d.x1));
    if ((1.0 - t) * len > tol) angles.push_back(std::atan2(d.x2, d.x1));
  }
  if (angles.empty()) return 0;
  std::sort(angles.begin(), angles.end());
  constexpr double kAngleTol = 1e-9;
  std::size_t distinct = 1;
  for (std::size_t k = 1; k < angles.size(); ++k) {
    if (angles[k] - angles[k - 1] > kAngleTol) ++distinct;
  }
  if (distinct > 1 && angles.front() + 2.0 * std::numbers::pi - angles.back() <= kAngleTol) --distinct;
  return distinct;
}

}  // namespace

SegmentArrangement::SegmentArrangement(std::vector<Segment> segments, double tol)
    : segments_(std::move(segments)), tol_(tol) {
  for (const Segment& s : segments_) {
    if (!(s.length() > 0.0)) throw Error(ErrorKind::InvalidParameters, "arrangement segment has zero length");
  }
  const std::size_t n = segments_.size();

  std::vector<RawHit> raw;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Evaluate each pair in a canonical order so that the computed point
      // does not depend on where the segments sit in the input.
      const bool swap = segment_less(segments_[j], segments_[i]);
      const Segment& first = swap ? segments_[j] : segments_[i];
      const Segment& second = swap ? segments_[i] : segments_[j];
      for (const SegmentHit& h : intersect_segments(first, second, tol)) {
        raw.push_back({h.point, i, j});
      }
    }
  }

  std::sort(raw.begin(), raw.end(), [](const RawHit& a, const RawHit& b) { return lex_less(a.point, b.point); });
  DisjointSets sets(raw.size());
  for (std::size_t a = 0; a < raw.size(); ++a) {
    for (std::size_t b = a + 1; b < raw.size() && raw[b].point.x1 - raw[a].point.x1 <= tol; ++b) {
      if (std::abs(raw[b].point.x2 - raw[a].point.x2) <= tol) sets.unite(a, b);
    }
  }

  std::vector<std::size_t> root_to_vertex(raw.size(), static_cast<std::size_t>(-1));
  for (std::size_t a = 0; a < raw.size(); ++a) {
    const std::size_t r = sets.find(a);
    if (root_to_vertex[r] == static_cast<std::size_t>(-1)) {
      root_to_vertex[r] = vertices_.size();
      // The root is the lexicographically smallest member of its cluster.
      vertices_.push_back({raw[r].point, {}, 0});
    }
    auto& ids = vertices_[root_to_vertex[r]].segments;
    ids.push_back(raw[a].i);
    ids.push_back(raw[a].j);
  }
  for (ArrangementVertex& v : vertices_) {
    std::sort(v.segments.begin(), v.segments.end());
    v.segments.erase(std::unique(v.segments.begin(), v.segments.end()), v.segments.end());
    v.wedges = count_wedges(v.point, segments_, v.segments, tol_);
  }
  std::sort(vertices_.begin(), vertices_.end(),
            [](const ArrangementVertex& a, const ArrangementVertex& b) { return lex_less(a.point, b.point); });
}

SegmentArrangement build_arrangement(std::vector<Segment> segments, double tol) {
  return SegmentArrangement(std::move(segments), tol);
}

}  // namespace pwhyp
