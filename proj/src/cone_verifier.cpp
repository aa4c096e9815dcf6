#include "pwhyp/cone_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwhyp/error.hpp"

namespace pwhyp {

namespace {

bool subset_with_slack(const Cone& inner, const Cone& outer, double slack) {
  return inner.s_lo() >= outer.s_lo() - slack && inner.s_hi() <= outer.s_hi() + slack;
}

// Rigorous lower bound of |M v| / |v| over directions (s, 1), s in `slopes`.
double expansion_lower_bound(const IntervalMat2& m, const Interval& slopes) {
  constexpr int kSplits = 64;
  const int splits = slopes.width() > 0.0 ? kSplits : 1;
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < splits; ++i) {
    const double lo = slopes.lo() + slopes.width() * i / splits;
    const double hi = i + 1 == splits ? slopes.hi() : slopes.lo() + slopes.width() * (i + 1) / splits;
    const Interval s(lo, hi);
    const Interval num = sqr(m.a11 * s + m.a12) + sqr(m.a21 * s + m.a22);
    const Interval den = Interval(1.0) + sqr(s);
    const double ratio = std::max(0.0, num.lo()) / den.hi();
    bound = std::min(bound, std::nextafter(std::sqrt(ratio), 0.0));
  }
  return bound;
}

const BelykhParams& require_belykh(const MapSpec& spec) {
  if (!spec.belykh_params()) throw Error(ErrorKind::InvalidParameters, "check needs a Belykh map");
  return *spec.belykh_params();
}

}  // namespace

ConeCertificate certify_unstable_cone(const MapSpec& spec, const Cone& candidate, double slack) {
  ConeCertificate cert;
  cert.unstable_cone = candidate;
  cert.invariant = true;
  cert.expansion_lower_bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= spec.piece_count(); ++i) {
    const IntervalMat2 m = spec.jacobian_enclosure(static_cast<PieceId>(i));
    const Cone image = map_cone(m, candidate);
    cert.image_cones.push_back(image);
    cert.invariant = cert.invariant && subset_with_slack(image, candidate, slack);
    cert.expansion_lower_bound = std::min(cert.expansion_lower_bound, expansion_lower_bound(m, candidate.slopes()));
  }
  cert.expanding = cert.expansion_lower_bound > 1.0;
  cert.disjoint_images = true;
  for (std::size_t i = 0; i < cert.image_cones.size(); ++i) {
    for (std::size_t j = i + 1; j < cert.image_cones.size(); ++j) {
      const auto d = cones_disjoint(cert.image_cones[i], cert.image_cones[j]);
      cert.disjoint_images = cert.disjoint_images && d.disjoint;
      cert.boundary_touch = cert.boundary_touch || d.boundary_touch;
    }
  }
  return cert;
}

Cone belykh_unstable_cone(const BelykhParams& p) {
  const double rho_psi = p.rho_psi.value_or(0.0);
  const double gap = p.gamma - p.lambda;
  return Cone((std::min(0.0, p.rho) - rho_psi) / gap, (std::max(0.0, p.rho) + rho_psi) / gap);
}

Cone default_unstable_cone(const MapSpec& spec) {
  switch (spec.kind()) {
    case MapKind::Belykh: return belykh_unstable_cone(*spec.belykh_params());
    case MapKind::DegenerateRemark: return Cone(0.0, 0.0);
    case MapKind::GenericAffine: break;
  }
  throw Error(ErrorKind::InvalidParameters, "generic maps need an explicit unstable cone");
}

ConeCertificate check_condition_T_cones(const MapSpec& spec) {
  const BelykhParams& p = require_belykh(spec);
  if (p.rho == 0.0) {
    throw Error(ErrorKind::InvalidForRhoZero, "the unstable cone degenerates to a ray when rho = 0");
  }
  ConeCertificate cert = certify_unstable_cone(spec, belykh_unstable_cone(p));

  // Lower edge of the piece-1 image cone must clear the upper edge of the
  // piece-2 image cone; with rho_psi = 0 this is gamma > 2 lambda.
  const double rp = spec.rho_psi();
  const double r = std::abs(p.rho);
  const double g = p.gamma, l = p.lambda;
  const bool inequality = rp == 0.0 ? g > 2.0 * l
                                    : -rp * l / (g * (g - l)) + (r - rp) / g > (r + rp) * l / (g * (g - l)) + rp / g;
  cert.equivalent_inequality_holds = inequality;
  cert.agreement = inequality == cert.disjoint_images;
  return cert;
}

MultiplicityCertificate check_multiplicity_cones(const MapSpec& spec, const Cone& cu, const Cone& cd) {
  MultiplicityCertificate cert;
  cert.cu = cu;
  cert.cd = cd;
  cert.tangent_image_in_cd = true;
  cert.tangent_N_outside_cu = true;
  for (const Line& line : spec.lines()) {
    const Point2 tangent{-line.normal.x2, line.normal.x1};
    const auto slope = slope_of(tangent);
    if (!slope) {
      throw Error(ErrorKind::CriterionInapplicable,
                  "horizontal singularity line: its tangent is fixed by the differential");
    }
    const Cone tangent_ray(*slope, *slope);
    cert.tangent_N_outside_cu = cert.tangent_N_outside_cu && !cu.contains_slope(*slope);
    for (std::size_t i = 1; i <= spec.piece_count(); ++i) {
      const Cone image = map_cone(spec.jacobian_enclosure(static_cast<PieceId>(i)), tangent_ray);
      cert.tangent_images.push_back(image);
      cert.tangent_image_in_cd = cert.tangent_image_in_cd && image.subset_of(cd);
    }
  }
  cert.cd_maps_into_cu = true;
  for (std::size_t i = 1; i <= spec.piece_count(); ++i) {
    const Cone image = map_cone(spec.jacobian_enclosure(static_cast<PieceId>(i)), cd);
    cert.cd_images.push_back(image);
    cert.cd_maps_into_cu = cert.cd_maps_into_cu && image.subset_of(cu);
  }
  const auto d = cones_disjoint(cu, cd);
  cert.cd_cu_disjoint = d.disjoint && !d.boundary_touch;
  return cert;
}

std::pair<Cone, Cone> search_multiplicity_cones(const MapSpec& spec, int budget) {
  const BelykhParams& p = require_belykh(spec);
  if (p.k == 0.0) throw Error(ErrorKind::CriterionInapplicable, "k = 0: multiplicity entropy is trivially zero");

  // Smallest cd holding every image of the singularity tangent.
  const double tangent_slope = 1.0 / p.k;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 1; i <= spec.piece_count(); ++i) {
    const Cone image = map_cone(spec.jacobian_enclosure(static_cast<PieceId>(i)), Cone(tangent_slope, tangent_slope));
    lo = std::min(lo, image.s_lo());
    hi = std::max(hi, image.s_hi());
  }
  const Cone base_u = belykh_unstable_cone(p);

  for (int attempt = 0; attempt < budget; ++attempt) {
    // Relative inflation grows geometrically from 1e-6 to ~1.
    const double inflate = 1e-6 * std::pow(10.0, 6.0 * attempt / std::max(1, budget - 1));
    const double pad = inflate * std::max(hi - lo, std::abs(hi) + std::abs(lo));
    const Cone cd(lo - pad, hi + pad);
    double u_lo = base_u.s_lo();
    double u_hi = base_u.s_hi();
    for (std::size_t i = 1; i <= spec.piece_count(); ++i) {
      const Cone image = map_cone(spec.jacobian_enclosure(static_cast<PieceId>(i)), cd);
      u_lo = std::min(u_lo, image.s_lo());
      u_hi = std::max(u_hi, image.s_hi());
    }
    const double upad = inflate * std::max(u_hi - u_lo, 1e-12);
    const Cone cu(u_lo - upad, u_hi + upad);
    if (!certify_unstable_cone(spec, cu).invariant) continue;
    if (check_multiplicity_cones(spec, cu, cd).pass()) return {cu, cd};
  }
  throw Error(ErrorKind::NotFound, "no admissible cone pair within the search budget");
}

}  // namespace pwhyp
