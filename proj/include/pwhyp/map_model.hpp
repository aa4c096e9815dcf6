#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwhyp/geometry.hpp"

namespace pwhyp {

/// Polynomial in x2 with coefficients c0 + c1 x + c2 x^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  double value(double x) const;
  double derivative(double x) const;
  bool is_zero() const;
  /// sum k |c_k|: bounds |p'(x)| on [-1, 1].
  double derivative_bound() const;
  /// max |p'(x)| sampled on [lo, hi] with the given step (both ends included).
  double sampled_derivative_max(double lo, double hi, double step) const;
};

/// Parameters of the skew-Belykh family:
///   piece 1 (x2 > k x1): (lambda x1 + a1 + rho x2 + psi1(x2), gamma x2 + b1)
///   piece 2 (x2 < k x1): (lambda x1 + a2 + psi2(x2),           gamma x2 + b2)
/// on K = [-1, 1]^2 with singularity line x2 = k x1.
struct BelykhParams {
  double lambda = 0.3;
  double gamma = 1.8;
  double rho = 0.1;
  double k = 0.1;
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = -0.8;
  double b2 = 0.8;
  Polynomial psi1;
  Polynomial psi2;
  /// Bound on |psi1'|, |psi2'|. When absent the coefficient bound is used.
  std::optional<double> rho_psi;

  /// The parameters drawn in the figures: lambda 0.3, gamma 1.8, rho 0.1,
  /// k 0.1, b1 = -b2 = -0.8.
  static BelykhParams figure_map() { return {}; }
  /// Same map with lambda = 0.5.
  static BelykhParams figure_map_half_lambda() {
    BelykhParams p;
    p.lambda = 0.5;
    return p;
  }
  /// rho = 0, k = 0 member: attractor is the segment x1 = 0, |x2| <= gamma - 1.
  static BelykhParams degenerate_rho_zero() {
    BelykhParams p;
    p.rho = 0.0;
    p.k = 0.0;
    return p;
  }
};

struct Box {
  double x1_lo = -1.0, x1_hi = 1.0;
  double x2_lo = -1.0, x2_hi = 1.0;

  bool contains(Point2 p, double tol = 0.0) const {
    return p.x1 >= x1_lo - tol && p.x1 <= x1_hi + tol && p.x2 >= x2_lo - tol && p.x2 <= x2_hi + tol;
  }
  double width() const { return x1_hi - x1_lo; }
  double height() const { return x2_hi - x2_lo; }
  Point2 center() const { return {0.5 * (x1_lo + x1_hi), 0.5 * (x2_lo + x2_hi)}; }
  Point2 clamp(Point2 p) const;
  friend bool operator==(const Box&, const Box&) = default;
};

/// Line {p : normal . p = offset}. `eval` is the signed residual.
struct Line {
  Point2 normal;
  double offset = 0.0;
  double eval(Point2 p) const { return dot(normal, p) - offset; }
};

/// p -> linear p + offset + (psi(x2), 0).
struct Branch {
  Mat2 linear;
  Point2 offset;
  Polynomial psi;

  Point2 apply(Point2 p) const {
    const Point2 q = linear * p + offset;
    return psi.is_zero() ? q : Point2{q.x1 + psi.value(p.x2), q.x2};
  }
  Mat2 jacobian(Point2 p) const {
    Mat2 m = linear;
    if (!psi.is_zero()) m.a12 += psi.derivative(p.x2);
    return m;
  }
};

/// Continuity piece: the open region where every line residual has the
/// listed sign (+1 or -1), intersected with the domain.
struct Piece {
  std::vector<int> signs;
  Branch branch;
};

/// 1-based piece index. For the Belykh family 1 = {x2 > k x1}, 2 = {x2 < k x1}.
using PieceId = int;

enum class MapKind { Belykh, DegenerateRemark, GenericAffine };

const char* to_string(MapKind kind);

/// Declarative, immutable piecewise map f : K \ N -> K.
class MapSpec {
 public:
  /// Validates the perturbation bound and domain invariance; throws
  /// InvalidParameters / ImageEscapesDomain.
  static MapSpec belykh(const BelykhParams& params);
  /// (x1, x2) -> (x1 / 2, 2 x2 mod 1) on [0, 1]^2; pieces split at x2 = 1/2.
  static MapSpec degenerate_remark();
  static MapSpec generic_affine(const Box& domain, std::vector<Line> lines, std::vector<Piece> pieces);

  MapKind kind() const { return kind_; }
  const Box& domain() const { return domain_; }
  const std::vector<Line>& lines() const { return lines_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }
  const Branch& branch(PieceId id) const { return pieces_.at(static_cast<std::size_t>(id - 1)).branch; }
  const std::optional<BelykhParams>& belykh_params() const { return belykh_; }
  /// Bound on |psi'| over all pieces (0 for affine maps).
  double rho_psi() const { return rho_psi_; }
  bool is_affine() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Throws OutsideDomain or OnSingularity.
  PieceId classify(Point2 p, double tol = kGeomTol) const;
  /// classify without exceptions: nullopt when p is outside K or near N.
  std::optional<PieceId> try_classify(Point2 p, double tol = kGeomTol) const noexcept;
  /// Throws as classify, plus ImageEscapesDomain.
  Point2 apply(Point2 p, double tol = kGeomTol) const;
  Mat2 jacobian(Point2 p, double tol = kGeomTol) const;
  /// All differentials of the piece as psi' ranges over [-rho_psi, rho_psi].
  IntervalMat2 jacobian_enclosure(PieceId id) const;
  /// Inverse of one branch (requires the branch linear part upper triangular
  /// or psi = 0). nullopt for singular branches.
  std::optional<Point2> inverse_branch(PieceId id, Point2 image) const;

  /// (chi_u, chi_s) when every branch has the same constant triangular
  /// Jacobian diagonal; nullopt otherwise.
  std::optional<std::pair<double, double>> analytic_exponents() const;

  /// The singularity lines clipped to the domain.
  std::vector<Segment> singularity_segments() const;
  /// Convex polygon of the closed piece (counter-clockwise).
  std::vector<Point2> piece_polygon(PieceId id) const;
  /// Clip a segment to the closed piece; nullopt if less than `tol` remains.
  std::optional<Segment> clip_to_piece(const Segment& s, PieceId id, double tol = kGeomTol) const;

  /// Canonical identity used for content hashes of configs.
  std::string canonical_string() const;
  std::uint64_t content_hash() const;

 private:
  MapSpec() = default;
  void validate_domain_invariance() const;

  MapKind kind_ = MapKind::GenericAffine;
  Box domain_;
  std::vector<Line> lines_;
  std::vector<Piece> pieces_;
  std::optional<BelykhParams> belykh_;
  double rho_psi_ = 0.0;
  std::vector<std::string> warnings_;
};

}  // namespace pwhyp
