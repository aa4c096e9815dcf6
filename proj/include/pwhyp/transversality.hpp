#pragma once

#include <cstdint>
#include <optional>

#include "pwhyp/geometry.hpp"
#include "pwhyp/map_model.hpp"

namespace pwhyp {

struct TransversalityOptions {
  /// Ball centres on a square grid of pitch epsilon / ball_divisions.
  int ball_divisions = 4;
  /// Base and test points on an arc-length grid of pitch epsilon / sample_divisions.
  int sample_divisions = 16;
};

struct TransversalityReport {
  double epsilon = 0.0;
  double delta = 0.0;
  bool passed = false;
  /// Largest delta for which every sampled ball admits a base pair
  /// (capped at 1; 0 means some ball has no separating pair at all).
  double delta_max = 0.0;
  /// No epsilon-ball meets both curves.
  bool vacuous = false;
  std::size_t balls_checked = 0;
  /// Centre of the ball that attains delta_max.
  std::optional<Point2> witness;
};

/// Discretized (epsilon, delta)-transversality of two curves. For every
/// grid ball meeting both curves it searches base points x1, x2 such that
/// |y1 - y2| >= delta (d1(x1, y1) + d2(x2, y2)) for all sampled y1, y2 in the
/// ball, which is disjointness of the two unions of open balls
/// B(y, delta d_i(x_i, y)). Base candidates include the crossing/closest
/// points of the curves; test points include the projections of each curve's
/// samples onto the other. Distances below the geometric tolerance count as 0.
TransversalityReport check_pair_transversal(const Polyline& g1, const Polyline& g2, double epsilon, double delta,
                                            const TransversalityOptions& opts = {});

struct ConditionTOptions {
  double epsilon = 0.05;
  double delta = 1e-3;
  /// Half-length of the random curves drawn in each piece.
  double half_length = 0.1;
  std::optional<Cone> cone;
  TransversalityOptions check;
  unsigned threads = 1;
};

struct ConditionTReport {
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::size_t vacuous_trials = 0;
  /// Minimum of delta_max over the trials.
  double delta_max = 0.0;
  bool passed = false;
  std::optional<Point2> witness;
};

/// Diagnostic sampling of condition (T): each trial picks a point p covered
/// by two branch images, draws a curve with tangent in the unstable cone
/// through each preimage (one per piece), maps both and checks the image pair.
/// Trials reuse the cone's boundary directions before random ones.
ConditionTReport sample_condition_T(const MapSpec& spec, std::size_t trials, std::uint64_t seed,
                                    const ConditionTOptions& opts = {});

}  // namespace pwhyp
