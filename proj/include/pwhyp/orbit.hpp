#pragma once

#include <cstdint>

#include "pwhyp/map_model.hpp"
#include "pwhyp/rng.hpp"

namespace pwhyp {

/// Forward orbit of a piecewise map with a restart policy for the
/// measure-zero events where an iterate lands on the singularity set.
///
/// Such an iterate is discarded and the orbit continues from a random point
/// within `jitter` of the last valid iterate. Burn-in is not repeated: the
/// restart point is as close to the attractor as the point it replaces.
/// Dyadic maps such as x2 -> 2 x2 mod 1 exhaust their mantissa bits after
/// about 53 steps and always end on the singularity, so a full restart
/// (fresh point plus burn-in) would never produce output for them.
class OrbitWalker {
 public:
  OrbitWalker(const MapSpec& spec, CounterRng rng, double jitter = 1e-9);

  /// Starts from a uniform random point of K off the singularity set.
  void reset_random();
  void reset(Point2 start);

  const Point2& current() const { return current_; }
  PieceId current_piece() const { return piece_; }
  /// Advances one step. Throws OrbitEscaped if the image leaves K.
  const Point2& step();
  /// True if the last step() discarded an iterate and restarted.
  bool restarted_last() const { return restarted_last_; }
  std::uint64_t restarts() const { return restarts_; }

 private:
  void restart_near(Point2 anchor);

  const MapSpec* spec_;
  CounterRng rng_;
  double jitter_;
  Point2 current_;
  PieceId piece_ = 1;
  bool restarted_last_ = false;
  std::uint64_t restarts_ = 0;
};

}  // namespace pwhyp
