#include "pwhyp/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pwhyp/error.hpp"
#include "pwhyp/rng.hpp"

namespace pwhyp {

double Polynomial::value(double x) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs[k];
  return acc;
}

bool Polynomial::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

double Polynomial::derivative_bound() const {
  double b = 0.0;
  for (std::size_t k = 1; k < coeffs.size(); ++k) b += static_cast<double>(k) * std::abs(coeffs[k]);
  return b;
}

double Polynomial::sampled_derivative_max(double lo, double hi, double step) const {
  double m = 0.0;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = std::min(hi, lo + static_cast<double>(i) * step);
    m = std::max(m, std::abs(derivative(x)));
  }
  return m;
}

Point2 Box::clamp(Point2 p) const {
  return {std::clamp(p.x1, x1_lo, x1_hi), std::clamp(p.x2, x2_lo, x2_hi)};
}

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Belykh: return "belykh";
    case MapKind::DegenerateRemark: return "degenerate_remark";
    case MapKind::GenericAffine: return "generic_affine";
  }
  return "unknown";
}

MapSpec MapSpec::belykh(const BelykhParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.lambda) || !finite(p.gamma) || !finite(p.rho) || !finite(p.k) || !finite(p.a1) ||
      !finite(p.a2) || !finite(p.b1) || !finite(p.b2)) {
    throw Error(ErrorKind::InvalidParameters, "Belykh parameters must be finite");
  }
  if (!(p.lambda > 0.0 && p.lambda < 1.0)) throw Error(ErrorKind::InvalidParameters, "need 0 < lambda < 1");
  if (!(p.gamma > 1.0)) throw Error(ErrorKind::InvalidParameters, "need gamma > 1");
  if (!(p.k > -1.0 && p.k < 1.0)) throw Error(ErrorKind::InvalidParameters, "need -1 < k < 1");

  MapSpec spec;
  spec.kind_ = MapKind::Belykh;
  spec.domain_ = Box{};
  if (!(p.lambda > 0.5)) {
    spec.warnings_.push_back("lambda outside (1/2, 1); accepted because the dimension formula only needs gamma > 2 lambda");
  }

  const bool perturbed = !p.psi1.is_zero() || !p.psi2.is_zero();
  const double rho_psi =
      p.rho_psi.value_or(std::max(p.psi1.derivative_bound(), p.psi2.derivative_bound()));
  if (!(rho_psi >= 0.0) || !std::isfinite(rho_psi)) throw Error(ErrorKind::InvalidParameters, "rho_psi must be >= 0");
  if (p.rho == 0.0) {
    if (perturbed) throw Error(ErrorKind::InvalidParameters, "rho = 0 requires psi1 = psi2 = 0");
  } else if (!(rho_psi < std::abs(p.rho) / 2.0)) {
    throw Error(ErrorKind::InvalidParameters, "need rho_psi < |rho| / 2");
  }
  if (perturbed) {
    const double sampled =
        std::max(p.psi1.sampled_derivative_max(-1.0, 1.0, 1e-3), p.psi2.sampled_derivative_max(-1.0, 1.0, 1e-3));
    if (!(sampled < rho_psi)) {
      throw Error(ErrorKind::InvalidParameters, "sampled |psi'| reaches rho_psi on [-1, 1]");
    }
  }
  spec.rho_psi_ = perturbed ? rho_psi : 0.0;

  spec.lines_ = {Line{{-p.k, 1.0}, 0.0}};
  spec.pieces_ = {
      Piece{{+1}, Branch{Mat2{p.lambda, p.rho, 0.0, p.gamma}, {p.a1, p.b1}, p.psi1}},
      Piece{{-1}, Branch{Mat2{p.lambda, 0.0, 0.0, p.gamma}, {p.a2, p.b2}, p.psi2}},
  };
  spec.belykh_ = p;
  spec.belykh_->rho_psi = spec.rho_psi_;
  spec.validate_domain_invariance();
  return spec;
}

MapSpec MapSpec::degenerate_remark() {
  MapSpec spec;
  spec.kind_ = MapKind::DegenerateRemark;
  spec.domain_ = Box{0.0, 1.0, 0.0, 1.0};
  spec.lines_ = {Line{{0.0, 1.0}, 0.5}};
  spec.pieces_ = {
      Piece{{-1}, Branch{Mat2{0.5, 0.0, 0.0, 2.0}, {0.0, 0.0}, {}}},
      Piece{{+1}, Branch{Mat2{0.5, 0.0, 0.0, 2.0}, {0.0, -1.0}, {}}},
  };
  spec.validate_domain_invariance();
  return spec;
}

MapSpec MapSpec::generic_affine(const Box& domain, std::vector<Line> lines, std::vector<Piece> pieces) {
  if (!(domain.x1_lo < domain.x1_hi && domain.x2_lo < domain.x2_hi)) {
    throw Error(ErrorKind::InvalidParameters, "empty domain box");
  }
  if (pieces.empty()) throw Error(ErrorKind::InvalidParameters, "need at least one piece");
  for (const Line& l : lines) {
    if (norm(l.normal) == 0.0) throw Error(ErrorKind::InvalidParameters, "line normal must be nonzero");
  }
  for (const Piece& pc : pieces) {
    if (pc.signs.size() != lines.size()) {
      throw Error(ErrorKind::InvalidParameters, "piece sign pattern length must match line count");
    }
    for (int s : pc.signs) {
      if (s != 1 && s != -1) throw Error(ErrorKind::InvalidParameters, "piece signs must be +1 or -1");
    }
    if (!pc.branch.linear.finite()) throw Error(ErrorKind::InvalidParameters, "branch matrix must be finite");
    if (!pc.branch.psi.is_zero()) throw Error(ErrorKind::InvalidParameters, "generic maps are affine (psi = 0)");
  }
  MapSpec spec;
  spec.kind_ = MapKind::GenericAffine;
  spec.domain_ = domain;
  spec.lines_ = std::move(lines);
  spec.pieces_ = std::move(pieces);
  spec.validate_domain_invariance();
  return spec;
}

bool MapSpec::is_affine() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.branch.psi.is_zero(); });
}

std::optional<PieceId> MapSpec::try_classify(Point2 p, double tol) const noexcept {
  if (!is_finite(p) || !domain_.contains(p, tol)) return std::nullopt;
  for (const Line& l : lines_) {
    if (std::abs(l.eval(p)) <= tol) return std::nullopt;
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < lines_.size() && match; ++j) {
      match = (lines_[j].eval(p) > 0.0 ? 1 : -1) == pieces_[i].signs[j];
    }
    if (match) return static_cast<PieceId>(i + 1);
  }
  return std::nullopt;
}

PieceId MapSpec::classify(Point2 p, double tol) const {
  if (!is_finite(p) || !domain_.contains(p, tol)) throw Error(ErrorKind::OutsideDomain, "point outside K");
  for (const Line& l : lines_) {
    if (std::abs(l.eval(p)) <= tol) throw Error(ErrorKind::OnSingularity, "point on the singularity set");
  }
  if (auto id = try_classify(p, tol)) return *id;
  throw Error(ErrorKind::OutsideDomain, "point lies in no listed piece");
}

Point2 MapSpec::apply(Point2 p, double tol) const {
  const Point2 q = branch(classify(p, tol)).apply(p);
  if (!domain_.contains(q, tol)) throw Error(ErrorKind::ImageEscapesDomain, "image leaves the closure of K");
  return q;
}

Mat2 MapSpec::jacobian(Point2 p, double tol) const { return branch(classify(p, tol)).jacobian(p); }

IntervalMat2 MapSpec::jacobian_enclosure(PieceId id) const {
  const Branch& b = branch(id);
  IntervalMat2 m = IntervalMat2::from(b.linear);
  if (rho_psi_ > 0.0) m.a12 = Interval(b.linear.a12) + Interval(-rho_psi_, rho_psi_);
  return m;
}

std::optional<Point2> MapSpec::inverse_branch(PieceId id, Point2 image) const {
  const Branch& b = branch(id);
  const Mat2& m = b.linear;
  if (b.psi.is_zero()) {
    const auto inv = m.inverse();
    if (!inv) return std::nullopt;
    return *inv * (image - b.offset);
  }
  // Triangular case: x2 is determined first, then x1 absorbs psi(x2).
  if (m.a21 != 0.0 || m.a11 == 0.0 || m.a22 == 0.0) return std::nullopt;
  const double x2 = (image.x2 - b.offset.x2) / m.a22;
  const double x1 = (image.x1 - b.offset.x1 - m.a12 * x2 - b.psi.value(x2)) / m.a11;
  return Point2{x1, x2};
}

std::optional<std::pair<double, double>> MapSpec::analytic_exponents() const {
  if (!is_affine()) return std::nullopt;
  const Mat2& ref = pieces_.front().branch.linear;
  const bool upper = std::all_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) {
    const Mat2& m = p.branch.linear;
    return m.a21 == 0.0 && m.a11 == ref.a11 && m.a22 == ref.a22;
  });
  const bool lower = std::all_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) {
    const Mat2& m = p.branch.linear;
    return m.a12 == 0.0 && m.a11 == ref.a11 && m.a22 == ref.a22;
  });
  if (!upper && !lower) return std::nullopt;
  if (ref.a11 == 0.0 || ref.a22 == 0.0) return std::nullopt;
  const double e1 = std::log(std::abs(ref.a11));
  const double e2 = std::log(std::abs(ref.a22));
  return std::make_pair(std::max(e1, e2), std::min(e1, e2));
}

namespace {

std::vector<Point2> clip_polygon(const std::vector<Point2>& poly, const Line& line, int sign) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const double fa = sign * line.eval(a);
    const double fb = sign * line.eval(b);
    if (fa >= 0.0) out.push_back(a);
    if ((fa >= 0.0) != (fb >= 0.0)) out.push_back(lerp(a, b, fa / (fa - fb)));
  }
  return out;
}

// Parametric clip of s against {sign * line(p) >= 0}; updates [t0, t1].
bool clip_param(const Segment& s, const Line& line, int sign, double& t0, double& t1) {
  const double f0 = sign * line.eval(s.a);
  const double df = sign * (line.eval(s.b) - line.eval(s.a));
  if (df == 0.0) return f0 >= 0.0;
  const double t = -f0 / df;
  if (df > 0.0) {
    t0 = std::max(t0, t);
  } else {
    t1 = std::min(t1, t);
  }
  return t0 <= t1;
}

std::vector<Line> box_lines(const Box& b) {
  return {Line{{1.0, 0.0}, b.x1_lo}, Line{{-1.0, 0.0}, -b.x1_hi}, Line{{0.0, 1.0}, b.x2_lo},
          Line{{0.0, -1.0}, -b.x2_hi}};
}

}  // namespace

std::vector<Point2> MapSpec::piece_polygon(PieceId id) const {
  std::vector<Point2> poly = {{domain_.x1_lo, domain_.x2_lo},
                              {domain_.x1_hi, domain_.x2_lo},
                              {domain_.x1_hi, domain_.x2_hi},
                              {domain_.x1_lo, domain_.x2_hi}};
  const Piece& pc = pieces_.at(static_cast<std::size_t>(id - 1));
  for (std::size_t j = 0; j < lines_.size() && !poly.empty(); ++j) poly = clip_polygon(poly, lines_[j], pc.signs[j]);
  return poly;
}

std::optional<Segment> MapSpec::clip_to_piece(const Segment& s, PieceId id, double tol) const {
  double t0 = 0.0, t1 = 1.0;
  for (const Line& l : box_lines(domain_)) {
    if (!clip_param(s, l, +1, t0, t1)) return std::nullopt;
  }
  const Piece& pc = pieces_.at(static_cast<std::size_t>(id - 1));
  for (std::size_t j = 0; j < lines_.size(); ++j) {
    if (!clip_param(s, lines_[j], pc.signs[j], t0, t1)) return std::nullopt;
  }
  const Segment out{lerp(s.a, s.b, t0), lerp(s.a, s.b, t1)};
  if (out.length() <= tol) return std::nullopt;
  return out;
}

std::vector<Segment> MapSpec::singularity_segments() const {
  std::vector<Segment> out;
  for (const Line& l : lines_) {
    // Long segment along the line, then clip to the box.
    const Point2 n = l.normal;
    const double nn = dot(n, n);
    const Point2 base = (l.offset / nn) * n;
    const Point2 dir = {-n.x2, n.x1};
    const double reach = 4.0 * (domain_.width() + domain_.height() + norm(base) + 1.0) / std::sqrt(nn);
    Segment s{base - reach * dir, base + reach * dir};
    double t0 = 0.0, t1 = 1.0;
    bool ok = true;
    for (const Line& b : box_lines(domain_)) ok = ok && clip_param(s, b, +1, t0, t1);
    if (!ok) continue;
    const Segment clipped{lerp(s.a, s.b, t0), lerp(s.a, s.b, t1)};
    if (clipped.length() > kGeomTol) out.push_back(clipped);
  }
  return out;
}

void MapSpec::validate_domain_invariance() const {
  constexpr double kStep = 1e-3;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto id = static_cast<PieceId>(i + 1);
    const auto poly = piece_polygon(id);
    if (poly.size() < 3) continue;
    const Branch& b = pieces_[i].branch;
    for (std::size_t v = 0; v < poly.size(); ++v) {
      const Point2 a = poly[v];
      const Point2 c = poly[(v + 1) % poly.size()];
      // Affine images of a convex piece are fixed by its corners; perturbed
      // branches are sampled along the boundary, where the x1 extremes live.
      const std::size_t steps = b.psi.is_zero() ? 1 : static_cast<std::size_t>(std::ceil(distance(a, c) / kStep));
      for (std::size_t k = 0; k < steps; ++k) {
        const Point2 p = lerp(a, c, static_cast<double>(k) / static_cast<double>(steps));
        if (!domain_.contains(b.apply(p), 1e-9)) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "piece %d maps (%.6g, %.6g) outside K", id, p.x1, p.x2);
          throw Error(ErrorKind::ImageEscapesDomain, buf);
        }
      }
    }
  }
}

std::string MapSpec::canonical_string() const {
  std::string out = to_string(kind_);
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    out += buf;
  };
  put(domain_.x1_lo), put(domain_.x1_hi), put(domain_.x2_lo), put(domain_.x2_hi);
  for (const Line& l : lines_) {
    out += " |line";
    put(l.normal.x1), put(l.normal.x2), put(l.offset);
  }
  for (const Piece& p : pieces_) {
    out += " |piece";
    for (int s : p.signs) out += s > 0 ? " +" : " -";
    const Mat2& m = p.branch.linear;
    put(m.a11), put(m.a12), put(m.a21), put(m.a22), put(p.branch.offset.x1), put(p.branch.offset.x2);
    out += " psi";
    for (double c : p.branch.psi.coeffs) put(c);
  }
  out += " |rho_psi";
  put(rho_psi_);
  return out;
}

std::uint64_t MapSpec::content_hash() const { return fnv1a64(canonical_string()); }

}  // namespace pwhyp
