#include "pwhyp/orbit.hpp"

#include "pwhyp/error.hpp"

namespace pwhyp {

OrbitWalker::OrbitWalker(const MapSpec& spec, CounterRng rng, double jitter)
    : spec_(&spec), rng_(rng), jitter_(jitter) {
  reset_random();
}

void OrbitWalker::reset_random() {
  const Box& k = spec_->domain();
  for (;;) {
    const Point2 p{rng_.uniform(k.x1_lo, k.x1_hi), rng_.uniform(k.x2_lo, k.x2_hi)};
    if (auto id = spec_->try_classify(p)) {
      current_ = p;
      piece_ = *id;
      return;
    }
  }
}

void OrbitWalker::reset(Point2 start) {
  piece_ = spec_->classify(start);
  current_ = start;
}

void OrbitWalker::restart_near(Point2 anchor) {
  const Box& k = spec_->domain();
  for (;;) {
    const Point2 p = k.clamp({anchor.x1 + rng_.uniform(-jitter_, jitter_), anchor.x2 + rng_.uniform(-jitter_, jitter_)});
    if (auto id = spec_->try_classify(p)) {
      current_ = p;
      piece_ = *id;
      return;
    }
  }
}

const Point2& OrbitWalker::step() {
  const Point2 next = spec_->branch(piece_).apply(current_);
  if (!spec_->domain().contains(next, kGeomTol)) {
    throw Error(ErrorKind::OrbitEscaped, "orbit left the domain");
  }
  restarted_last_ = false;
  if (auto id = spec_->try_classify(next)) {
    current_ = next;
    piece_ = *id;
  } else {
    ++restarts_;
    restarted_last_ = true;
    restart_near(next);
  }
  return current_;
}

}  // namespace pwhyp
