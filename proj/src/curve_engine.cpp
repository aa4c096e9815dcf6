#include "pwhyp/curve_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "pwhyp/arrangement.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/parallel.hpp"
#include "pwhyp/text_io.hpp"

namespace pwhyp {

double CurveFamily::total_length() const {
  double s = 0.0;
  for (const TaggedCurve& c : curves) s += c.curve.length();
  return s;
}

CurveFamily CurveFamily::seed(Polyline curve, int q, double l) {
  if (q < 1) throw Error(ErrorKind::InvalidParameters, "q must be >= 1");
  if (!(l > 0.0)) throw Error(ErrorKind::InvalidParameters, "l must be positive");
  CurveFamily fam;
  fam.q = q;
  fam.l = l;
  fam.curves.push_back({std::move(curve), {}, 0});
  return fam;
}

std::vector<CurvePiece> split_at_singularity(const MapSpec& spec, const Polyline& c) {
  const auto v = c.vertices();
  // Sequence of points where each cut point closes one piece and opens the next.
  std::vector<Point2> pts;
  std::vector<bool> cut;
  pts.reserve(v.size() + 4);
  cut.reserve(v.size() + 4);
  auto on_line = [&](Point2 p) {
    return std::any_of(spec.lines().begin(), spec.lines().end(),
                       [&](const Line& ln) { return std::abs(ln.eval(p)) <= kGeomTol; });
  };
  pts.push_back(v[0]);
  cut.push_back(on_line(v[0]));
  std::vector<double> ts;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Point2 a = v[i - 1], b = v[i];
    const double chord = distance(a, b);
    ts.clear();
    for (const Line& ln : spec.lines()) {
      const double ea = ln.eval(a), eb = ln.eval(b);
      if (std::abs(ea) <= kGeomTol || std::abs(eb) <= kGeomTol || (ea > 0.0) == (eb > 0.0)) continue;
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * chord > kGeomTol) {
        const double mid = 0.5 * (lo + hi);
        const double em = ln.eval(lerp(a, b, mid));
        if ((em > 0.0) == (ea > 0.0)) lo = mid; else hi = mid;
        if (hi - lo <= 0x1p-60) break;
      }
      ts.push_back(0.5 * (lo + hi));
    }
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
      pts.push_back(lerp(a, b, t));
      cut.push_back(true);
    }
    pts.push_back(b);
    cut.push_back(on_line(b));
  }

  std::vector<CurvePiece> out;
  std::vector<Point2> run;
  auto flush = [&] {
    if (run.size() >= 2) {
      double len = 0.0;
      for (std::size_t i = 1; i < run.size(); ++i) len += distance(run[i - 1], run[i]);
      if (len > kGeomTol) {
        Polyline piece(run, 1e-15);
        if (const auto id = spec.try_classify(piece.midpoint(), 0.0)) out.push_back({std::move(piece), *id});
      }
    }
    run.clear();
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    run.push_back(pts[i]);
    if (cut[i] && i > 0) {
      flush();
      run.push_back(pts[i]);
    }
  }
  flush();
  return out;
}

namespace {

struct Work {
  Polyline curve;
  std::vector<std::uint8_t> itinerary;
};

struct CurveOutput {
  std::vector<TaggedCurve> curves;
  double mapped_length = 0.0;
  double discarded_length = 0.0;
  std::size_t cuts = 0;
};

void check_cone(const Polyline& c, const Cone& cone, double tol) {
  const auto v = c.vertices();
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Point2 d = v[i] - v[i - 1];
    if (norm(d) <= 1e-9) continue;
    if (d.x2 == 0.0 ? !cone.contains_horizontal() : !cone.contains_slope(d.x1 / d.x2, tol)) {
      throw Error(ErrorKind::ConeViolation, "curve chord left the unstable cone at (" + fmt_real(v[i].x1) + ", " +
                                                fmt_real(v[i].x2) + ")");
    }
  }
}

CurveOutput advance_one(const MapSpec& spec, const TaggedCurve& tc, std::size_t index, int q, double l,
                        const CurveEngineOptions& opts) {
  CurveOutput out;
  const bool refine = !spec.is_affine();
  std::vector<Work> work{{tc.curve, tc.itinerary}};
  std::vector<Work> next;
  for (int step = 0; step < q; ++step) {
    next.clear();
    for (const Work& w : work) {
      const Polyline src = refine ? w.curve.refined(opts.refine_step) : w.curve;
      auto pieces = split_at_singularity(spec, src);
      if (!pieces.empty()) out.cuts += pieces.size() - 1;
      for (const CurvePiece& pc : pieces) {
        const Branch& br = spec.branch(pc.piece);
        std::vector<Point2> mapped;
        mapped.reserve(pc.curve.size());
        for (Point2 p : pc.curve.vertices()) {
          const Point2 img = br.apply(p);
          if (!spec.domain().contains(img, 1e-9)) {
            throw Error(ErrorKind::ImageEscapesDomain, "curve image leaves the domain at (" + fmt_real(img.x1) + ", " + fmt_real(img.x2) + ")");
          }
          // Cut points sit within the tolerance of N; keep their images in K.
          mapped.push_back(spec.domain().clamp(img));
        }
        Work nw{Polyline(std::move(mapped), 1e-15), w.itinerary};
        nw.itinerary.push_back(static_cast<std::uint8_t>(pc.piece));
        next.push_back(std::move(nw));
      }
    }
    std::swap(work, next);
  }

  for (Work& w : work) {
    const double len = w.curve.length();
    out.mapped_length += len;
    if (len < l) {
      out.discarded_length += len;
      continue;
    }
    double s = 0.0;
    while (len - s > 2.0 * l) {
      out.curves.push_back({w.curve.slice(s, s + l), w.itinerary, index});
      s += l;
    }
    out.curves.push_back({s == 0.0 ? std::move(w.curve) : w.curve.slice(s, len), w.itinerary, index});
  }
  for (const TaggedCurve& c : out.curves) check_cone(c.curve, opts.cone, opts.slope_tol);
  return out;
}

}  // namespace

CurveFamily advance_family(const MapSpec& spec, const CurveFamily& fam, const CurveEngineOptions& opts,
                           GenerationRecord* record) {
  std::vector<CurveOutput> outs(fam.curves.size());
  parallel_for(fam.curves.size(), opts.threads,
               [&](std::size_t i) { outs[i] = advance_one(spec, fam.curves[i], i, fam.q, fam.l, opts); });

  CurveFamily next;
  next.generation = fam.generation + 1;
  next.q = fam.q;
  next.l = fam.l;
  GenerationRecord rec;
  rec.n = next.generation;
  for (CurveOutput& o : outs) {
    rec.mapped_length += o.mapped_length;
    rec.discarded_length += o.discarded_length;
    rec.cut_events += o.cuts;
    for (TaggedCurve& c : o.curves) next.curves.push_back(std::move(c));
  }
  rec.count = next.curves.size();
  rec.total_length = next.total_length();
  if (record) *record = rec;
  return next;
}

CurveFamily run_family(const MapSpec& spec, CurveFamily seed, std::size_t generations, const CurveEngineOptions& opts,
                       GrowthLog* log) {
  if (log) log->records.push_back({seed.generation, seed.curves.size(), seed.total_length(), seed.total_length(), 0, 0.0});
  for (std::size_t g = 0; g < generations; ++g) {
    GenerationRecord rec;
    seed = advance_family(spec, seed, opts, &rec);
    if (log) log->records.push_back(rec);
  }
  return seed;
}

double growth_rate(const GrowthLog& log, std::size_t burn_in) {
  std::vector<double> xs, ys;
  for (const GenerationRecord& r : log.records) {
    if (r.n < burn_in || r.count == 0) continue;
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(std::log(static_cast<double>(r.count)));
  }
  if (xs.size() < 3) throw Error(ErrorKind::InsufficientData, "growth fit needs three generations after burn-in");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::size_t count_cylinders(const MapSpec& spec, std::span<const Point2> points, std::size_t m) {
  const std::uint64_t base = spec.piece_count() + 1;
  // Packed keys need base^m < 2^64.
  if (m * std::log2(static_cast<double>(base)) >= 64.0) {
    throw Error(ErrorKind::InvalidParameters, "itinerary too long for packed keys");
  }
  std::unordered_set<std::uint64_t> seen;
  for (Point2 p : points) {
    std::uint64_t key = 0;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      const auto id = spec.try_classify(p);
      if (!id) {
        ok = false;
        break;
      }
      key = key * base + static_cast<std::uint64_t>(*id);
      if (i + 1 < m) p = spec.branch(*id).apply(p);
    }
    if (ok) seen.insert(key);
  }
  return seen.size();
}

std::optional<std::pair<double, double>> log_expansion_factors(const MapSpec& spec, Point2 p, std::size_t r) {
  Point2 q1{1.0, 0.0}, q2{0.0, 1.0};
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const auto id = spec.try_classify(p);
    if (!id) return std::nullopt;
    const Branch& br = spec.branch(*id);
    const Mat2 j = br.jacobian(p);
    const Point2 c1 = j * q1;
    Point2 c2 = j * q2;
    const double r11 = norm(c1);
    q1 = (1.0 / r11) * c1;
    c2 = c2 - dot(q1, c2) * q1;
    const double r22 = norm(c2);
    q2 = (1.0 / r22) * c2;
    l1 += std::log(r11);
    l2 += std::log(r22);
    p = br.apply(p);
    if (!spec.domain().contains(p, kGeomTol)) return std::nullopt;
  }
  return std::make_pair(std::max(l1, l2), std::min(l1, l2));
}

CurveFamily filter_by_expansion(const MapSpec& spec, const CurveFamily& fam, std::size_t r, double eps, double chi_u,
                                double chi_s) {
  const double rr = static_cast<double>(r);
  auto within = [&](double v, double chi) {
    const double slack = 1e-12 * std::max(1.0, std::abs(chi) * rr);
    return v >= (chi - eps) * rr - slack && v <= (chi + eps) * rr + slack;
  };
  CurveFamily out;
  out.generation = fam.generation;
  out.q = fam.q;
  out.l = fam.l;
  for (const TaggedCurve& c : fam.curves) {
    const auto f = log_expansion_factors(spec, c.curve.midpoint(), r);
    if (f && within(f->first, chi_u) && within(f->second, chi_s)) out.curves.push_back(c);
  }
  return out;
}

const char* to_string(MultiplicityMode mode) {
  return mode == MultiplicityMode::ExactArrangement ? "exact-arrangement" : "growth-proxy";
}

std::vector<Segment> singularity_preimages(const MapSpec& spec, std::size_t n) {
  std::vector<Segment> all;
  std::vector<Segment> level = spec.singularity_segments();
  for (std::size_t i = 0; i < n && !level.empty(); ++i) {
    all.insert(all.end(), level.begin(), level.end());
    if (i + 1 == n) break;
    std::vector<Segment> prev;
    for (const Segment& s : level) {
      for (std::size_t id = 1; id <= spec.piece_count(); ++id) {
        const auto pid = static_cast<PieceId>(id);
        const auto a = spec.inverse_branch(pid, s.a);
        const auto b = spec.inverse_branch(pid, s.b);
        if (!a || !b) continue;
        if (auto clipped = spec.clip_to_piece({*a, *b}, pid)) prev.push_back(*clipped);
      }
    }
    level = std::move(prev);
  }
  return all;
}

MultiplicityEstimate multiplicity_exact(const MapSpec& spec, std::size_t n, std::size_t n_max) {
  if (!spec.is_affine()) throw Error(ErrorKind::InvalidParameters, "exact multiplicity needs an affine map");
  if (n > n_max) throw Error(ErrorKind::BudgetExceeded, "n exceeds the arrangement budget n_max");
  MultiplicityEstimate est;
  est.mode = MultiplicityMode::ExactArrangement;
  const Box& k = spec.domain();
  auto interior = [&](Point2 p) {
    return p.x1 > k.x1_lo + kGeomTol && p.x1 < k.x1_hi - kGeomTol && p.x2 > k.x2_lo + kGeomTol &&
           p.x2 < k.x2_hi - kGeomTol;
  };
  for (std::size_t m = 1; m <= n; ++m) {
    const auto segs = singularity_preimages(spec, m);
    MultiplicityRecord rec;
    rec.n = m;
    rec.segments = segs.size();
    bool crosses_interior = false;
    for (const Segment& s : segs) crosses_interior = crosses_interior || interior(lerp(s.a, s.b, 0.5));
    rec.k_n = crosses_interior ? 2 : 1;
    rec.max_concurrent = crosses_interior ? 1 : 0;
    const SegmentArrangement arr(segs);
    for (const ArrangementVertex& v : arr.vertices()) {
      if (!interior(v.point)) continue;
      rec.k_n = std::max(rec.k_n, v.wedges);
      rec.max_concurrent = std::max(rec.max_concurrent, v.multiplicity());
    }
    est.records.push_back(rec);
  }
  if (!est.records.empty()) {
    est.rate = std::log(static_cast<double>(est.records.back().k_n)) / static_cast<double>(est.records.back().n);
  }
  return est;
}

MultiplicityEstimate multiplicity_proxy(const MapSpec& spec, std::size_t n, std::size_t centres,
                                        std::size_t circle_samples, double radius) {
  MultiplicityEstimate est;
  est.mode = MultiplicityMode::GrowthProxy;
  const auto segs = spec.singularity_segments();
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t m = 1; m <= n; ++m) {
    MultiplicityRecord rec;
    rec.n = m;
    rec.segments = segs.size();
    for (const Segment& s : segs) {
      for (std::size_t c = 0; c < centres; ++c) {
        const Point2 centre = lerp(s.a, s.b, (static_cast<double>(c) + 0.5) / static_cast<double>(centres));
        std::vector<std::vector<std::uint8_t>> its;
        for (std::size_t j = 0; j < circle_samples; ++j) {
          const double th = two_pi * static_cast<double>(j) / static_cast<double>(circle_samples);
          Point2 p = centre + radius * Point2{std::cos(th), std::sin(th)};
          std::vector<std::uint8_t> it;
          for (std::size_t i = 0; i < m; ++i) {
            const auto id = spec.try_classify(p, 0.0);
            if (!id) break;
            it.push_back(static_cast<std::uint8_t>(*id));
            p = spec.branch(*id).apply(p);
          }
          if (it.size() == m) its.push_back(std::move(it));
        }
        // Runs of constant itinerary around the circle.
        std::size_t runs = 0;
        for (std::size_t j = 0; j < its.size(); ++j) {
          if (its[j] != its[(j + its.size() - 1) % its.size()]) ++runs;
        }
        rec.k_n = std::max(rec.k_n, std::max<std::size_t>(runs, its.empty() ? 0 : 1));
      }
    }
    est.records.push_back(rec);
  }
  if (!est.records.empty() && est.records.back().k_n > 0) {
    est.rate = std::log(static_cast<double>(est.records.back().k_n)) / static_cast<double>(est.records.back().n);
  }
  return est;
}

void write_growth_csv(std::ostream& os, const GrowthLog& log) {
  os << "n,count,total_length,mapped_length,cut_events,discarded_length\n";
  for (const GenerationRecord& r : log.records) {
    os << r.n << ',' << r.count << ',' << fmt_real(r.total_length) << ',' << fmt_real(r.mapped_length) << ','
       << r.cut_events << ',' << fmt_real(r.discarded_length) << '\n';
  }
}

void write_multiplicity_csv(std::ostream& os, const MultiplicityEstimate& est) {
  os << "n,k_n,max_concurrent,segments,mode\n";
  for (const MultiplicityRecord& r : est.records) {
    os << r.n << ',' << r.k_n << ',' << r.max_concurrent << ',' << r.segments << ',' << to_string(est.mode) << '\n';
  }
}

void write_family_csv(std::ostream& os, const CurveFamily& fam) {
  os << "curve,vertex,x1,x2\n";
  for (std::size_t i = 0; i < fam.curves.size(); ++i) {
    const auto v = fam.curves[i].curve.vertices();
    for (std::size_t j = 0; j < v.size(); ++j) {
      os << i << ',' << j << ',' << fmt_real(v[j].x1) << ',' << fmt_real(v[j].x2) << '\n';
    }
  }
}

}  // namespace pwhyp
