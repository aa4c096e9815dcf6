#pragma once

#include <cstddef>
#include <vector>

#include "pwhyp/geometry.hpp"

namespace pwhyp {

struct ArrangementVertex {
  Point2 point;
  /// Indices of the input segments passing through (or ending at) the vertex.
  std::vector<std::size_t> segments;
  /// Number of distinct edge directions leaving the vertex; equals the number
  /// of faces meeting there.
  std::size_t wedges = 0;

  std::size_t multiplicity() const { return segments.size(); }
};

/// Intersection structure of a finite set of segments. Intersection points
/// closer than the snapping tolerance are merged into one vertex.
class SegmentArrangement {
 public:
  SegmentArrangement(std::vector<Segment> segments, double tol = kGeomTol);

  const std::vector<Segment>& segments() const { return segments_; }
  /// Vertices sorted lexicographically by (x1, x2), independent of input order.
  const std::vector<ArrangementVertex>& vertices() const { return vertices_; }
  double tolerance() const { return tol_; }

 private:
  std::vector<Segment> segments_;
  std::vector<ArrangementVertex> vertices_;
  double tol_;
};

SegmentArrangement build_arrangement(std::vector<Segment> segments, double tol = kGeomTol);

}  // namespace pwhyp
