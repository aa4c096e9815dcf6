#include "pwhyp/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pwhyp/cone_verifier.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/parallel.hpp"
#include "pwhyp/rng.hpp"

namespace pwhyp {

namespace {

struct CurvePoint {
  double arc;
  Point2 p;
};

std::vector<CurvePoint> arc_samples(const Polyline& g, double pitch) {
  std::vector<CurvePoint> out;
  const double len = g.length();
  const auto n = static_cast<std::size_t>(std::floor(len / pitch));
  out.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) * pitch;
    out.push_back({s, g.point_at(s)});
  }
  if (len - out.back().arc > 1e-15) out.push_back({len, g.back()});
  return out;
}

struct ContactPair {
  CurvePoint on1;
  CurvePoint on2;
};

// Crossings of the two polylines, or their closest pair when they do not meet.
std::vector<ContactPair> contact_pairs(const Polyline& g1, const Polyline& g2) {
  std::vector<ContactPair> out;
  const auto v1 = g1.vertices();
  const auto v2 = g2.vertices();
  for (std::size_t i = 1; i < v1.size(); ++i) {
    const Segment s{v1[i - 1], v1[i]};
    for (std::size_t j = 1; j < v2.size(); ++j) {
      const Segment r{v2[j - 1], v2[j]};
      for (const SegmentHit& h : intersect_segments(s, r)) {
        const double a1 = g1.arc_at(i - 1) + h.t * (g1.arc_at(i) - g1.arc_at(i - 1));
        const double a2 = g2.arc_at(j - 1) + h.u * (g2.arc_at(j) - g2.arc_at(j - 1));
        out.push_back({{a1, h.point}, {a2, h.point}});
      }
    }
  }
  if (!out.empty()) return out;
  double best = std::numeric_limits<double>::infinity();
  ContactPair pair{};
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const auto [s2, q2] = g2.project(v1[i]);
    if (const double d = distance(v1[i], q2); d < best) {
      best = d;
      pair = {{g1.arc_at(i), v1[i]}, {s2, q2}};
    }
  }
  for (std::size_t j = 0; j < v2.size(); ++j) {
    const auto [s1, q1] = g1.project(v2[j]);
    if (const double d = distance(v2[j], q1); d < best) {
      best = d;
      pair = {{s1, q1}, {g2.arc_at(j), v2[j]}};
    }
  }
  out.push_back(pair);
  return out;
}

// Points where the polyline crosses the circle |p - c| = r.
void circle_crossings(const Polyline& g, Point2 c, double r, std::vector<CurvePoint>& out) {
  const auto v = g.vertices();
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Point2 d = v[i] - v[i - 1], f = v[i - 1] - c;
    const double a = dot(d, d), b = dot(f, d), k = dot(f, f) - r * r;
    const double disc = b * b - a * k;
    if (a == 0.0 || disc < 0.0) continue;
    const double root = std::sqrt(disc);
    for (double t : {(-b - root) / a, (-b + root) / a}) {
      if (t < 0.0 || t > 1.0) continue;
      out.push_back({g.arc_at(i - 1) + t * (g.arc_at(i) - g.arc_at(i - 1)), lerp(v[i - 1], v[i], t)});
    }
  }
}

double polyline_distance(const Polyline& g, Point2 c) { return distance(c, g.project(c).second); }

// min over test pairs of |y1 - y2| / (d1 + d2); stops once the running
// minimum drops to `cutoff`.
double pair_value(const CurvePoint& x1, const CurvePoint& x2, const std::vector<CurvePoint>& t1,
                  const std::vector<CurvePoint>& t2, double cutoff) {
  double best = std::numeric_limits<double>::infinity();
  for (const CurvePoint& y1 : t1) {
    const double d1 = std::abs(y1.arc - x1.arc);
    for (const CurvePoint& y2 : t2) {
      const double d = d1 + std::abs(y2.arc - x2.arc);
      // Arc positions of one point computed along two routes differ by rounding.
      if (d <= kGeomTol) continue;
      double gap = distance(y1.p, y2.p);
      if (gap <= kGeomTol) gap = 0.0;
      const double r = gap / d;
      if (r < best) {
        best = r;
        if (best <= cutoff) return best;
      }
    }
  }
  return best;
}

}  // namespace

TransversalityReport check_pair_transversal(const Polyline& g1, const Polyline& g2, double epsilon, double delta,
                                            const TransversalityOptions& opts) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParameters, "epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidParameters, "delta must lie in (0, 1)");

  TransversalityReport report;
  report.epsilon = epsilon;
  report.delta = delta;

  const double sample_pitch = epsilon / opts.sample_divisions;
  const double ball_pitch = epsilon / opts.ball_divisions;
  const auto s1 = arc_samples(g1, sample_pitch);
  const auto s2 = arc_samples(g2, sample_pitch);
  const auto contacts = contact_pairs(g1, g2);

  auto bbox = [](const Polyline& g) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (Point2 p : g.vertices()) {
      b.x1_lo = std::min(b.x1_lo, p.x1), b.x1_hi = std::max(b.x1_hi, p.x1);
      b.x2_lo = std::min(b.x2_lo, p.x2), b.x2_hi = std::max(b.x2_hi, p.x2);
    }
    return b;
  };
  const Box b1 = bbox(g1), b2 = bbox(g2);
  const Box region{std::max(b1.x1_lo, b2.x1_lo) - epsilon, std::min(b1.x1_hi, b2.x1_hi) + epsilon,
                   std::max(b1.x2_lo, b2.x2_lo) - epsilon, std::min(b1.x2_hi, b2.x2_hi) + epsilon};

  double global = 1.0;
  if (region.x1_lo <= region.x1_hi && region.x2_lo <= region.x2_hi) {
    // Grid anchored at multiples of the pitch so nearby curve pairs share centres.
    const auto i0 = static_cast<long>(std::floor(region.x1_lo / ball_pitch));
    const auto i1 = static_cast<long>(std::ceil(region.x1_hi / ball_pitch));
    const auto j0 = static_cast<long>(std::floor(region.x2_lo / ball_pitch));
    const auto j1 = static_cast<long>(std::ceil(region.x2_hi / ball_pitch));
    std::vector<CurvePoint> in1, in2, t1, t2;
    std::vector<std::pair<CurvePoint, CurvePoint>> candidates;
    for (long i = i0; i <= i1; ++i) {
      for (long j = j0; j <= j1; ++j) {
        const Point2 c{static_cast<double>(i) * ball_pitch, static_cast<double>(j) * ball_pitch};
        if (polyline_distance(g1, c) > epsilon || polyline_distance(g2, c) > epsilon) continue;
        ++report.balls_checked;
        // Relative slack so one point computed along two routes gets one answer.
        auto in_ball = [&](Point2 p) { return distance(p, c) <= epsilon * (1.0 + 1e-9); };

        auto collect = [&](const std::vector<CurvePoint>& samples, const Polyline& g, std::vector<CurvePoint>& in) {
          in.clear();
          for (const CurvePoint& q : samples) {
            if (in_ball(q.p)) in.push_back(q);
          }
          // Entry and exit points: the in-ball arc may end far from any sample.
          circle_crossings(g, c, epsilon, in);
          if (in.empty()) {
            const auto [s, q] = g.project(c);
            in.push_back({s, q});
          }
        };
        collect(s1, g1, in1);
        collect(s2, g2, in2);

        candidates.clear();
        for (const ContactPair& cp : contacts) {
          if (in_ball(cp.on1.p) || in_ball(cp.on2.p)) candidates.emplace_back(cp.on1, cp.on2);
        }
        for (const CurvePoint& a : in1) {
          for (const CurvePoint& b : in2) candidates.emplace_back(a, b);
        }

        t1 = in1;
        t2 = in2;
        for (const ContactPair& cp : contacts) {
          if (in_ball(cp.on1.p) || in_ball(cp.on2.p)) {
            t1.push_back(cp.on1);
            t2.push_back(cp.on2);
          }
        }
        for (const CurvePoint& q : in2) {
          const auto [s, p] = g1.project(q.p);
          if (in_ball(p)) t1.push_back({s, p});
        }
        for (const CurvePoint& q : in1) {
          const auto [s, p] = g2.project(q.p);
          if (in_ball(p)) t2.push_back({s, p});
        }

        double ball_best = 0.0;
        for (const auto& [a, b] : candidates) {
          ball_best = std::max(ball_best, pair_value(a, b, t1, t2, ball_best));
          if (ball_best >= global) break;
        }
        if (ball_best < global) {
          global = ball_best;
          report.witness = c;
        }
      }
    }
  }
  report.vacuous = report.balls_checked == 0;
  report.delta_max = std::min(1.0, global);
  report.passed = delta <= report.delta_max;
  return report;
}

ConditionTReport sample_condition_T(const MapSpec& spec, std::size_t trials, std::uint64_t seed,
                                    const ConditionTOptions& opts) {
  const Cone cone = opts.cone ? *opts.cone : default_unstable_cone(spec);
  const std::size_t pieces = spec.piece_count();
  if (pieces < 2) throw Error(ErrorKind::InvalidParameters, "condition (T) needs at least two pieces");

  std::vector<std::pair<PieceId, PieceId>> piece_pairs;
  for (std::size_t i = 1; i <= pieces; ++i) {
    for (std::size_t j = i + 1; j <= pieces; ++j) piece_pairs.emplace_back(static_cast<PieceId>(i), static_cast<PieceId>(j));
  }

  std::vector<std::optional<TransversalityReport>> results(trials);
  parallel_for(trials, opts.threads, [&](std::size_t t) {
    CounterRng rng(derive_seed(seed, "condition-T", t));
    const auto [pa, pb] = piece_pairs[t % piece_pairs.size()];

    std::optional<Point2> xa, xb;
    const Box& k = spec.domain();
    for (int attempt = 0; attempt < 10000 && !(xa && xb); ++attempt) {
      const Point2 y{rng.uniform(k.x1_lo, k.x1_hi), rng.uniform(k.x2_lo, k.x2_hi)};
      xa = spec.inverse_branch(pa, y);
      xb = spec.inverse_branch(pb, y);
      if (!xa || spec.try_classify(*xa) != pa) xa.reset();
      if (!xb || spec.try_classify(*xb) != pb) xb.reset();
    }
    if (!xa || !xb) return;

    const std::size_t corner = t / piece_pairs.size();
    auto pick_slope = [&](int bit) {
      if (corner < 4) return ((corner >> bit) & 1U) ? cone.s_hi() : cone.s_lo();
      return rng.uniform(cone.s_lo(), cone.s_hi());
    };
    auto image_curve = [&](PieceId id, Point2 x, double slope) -> std::optional<Polyline> {
      const Point2 dir = (1.0 / std::hypot(slope, 1.0)) * Point2{slope, 1.0};
      const auto clipped = spec.clip_to_piece({x - opts.half_length * dir, x + opts.half_length * dir}, id);
      if (!clipped) return std::nullopt;
      // Pull the ends off the singularity set before mapping.
      const double len = clipped->length();
      if (len <= 4.0 * kGeomTol) return std::nullopt;
      const double trim = 2.0 * kGeomTol / len;
      const Polyline sigma =
          Polyline({lerp(clipped->a, clipped->b, trim), lerp(clipped->a, clipped->b, 1.0 - trim)}).refined(1e-3);
      std::vector<Point2> mapped;
      mapped.reserve(sigma.size());
      for (Point2 p : sigma.vertices()) mapped.push_back(spec.branch(id).apply(p));
      return Polyline(std::move(mapped), 1e-15);
    };
    const auto ga = image_curve(pa, *xa, pick_slope(0));
    const auto gb = image_curve(pb, *xb, pick_slope(1));
    if (!ga || !gb) return;
    results[t] = check_pair_transversal(*ga, *gb, opts.epsilon, opts.delta, opts.check);
  });

  ConditionTReport report;
  report.epsilon = opts.epsilon;
  report.delta_max = 1.0;
  for (const auto& r : results) {
    if (!r) continue;
    ++report.trials;
    if (r->vacuous) ++report.vacuous_trials;
    if (r->delta_max < report.delta_max) {
      report.delta_max = r->delta_max;
      report.witness = r->witness;
    }
  }
  report.passed = report.trials > 0 && report.delta_max >= opts.delta;
  return report;
}

}  // namespace pwhyp
