#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pwhyp/geometry.hpp"
#include "pwhyp/map_model.hpp"

namespace pwhyp {

struct ConeCertificate {
  Cone unstable_cone;
  /// Image of the unstable cone under each branch (all admissible psi').
  std::vector<Cone> image_cones;
  bool invariant = false;
  /// Lower bound of |Df v| / |v| over the cone and all branches.
  double expansion_lower_bound = 0.0;
  bool expanding = false;
  bool disjoint_images = false;
  bool boundary_touch = false;
  /// Closed-form counterpart of disjoint_images (gamma > 2 lambda when
  /// rho_psi = 0); only set by check_condition_T_cones.
  std::optional<bool> equivalent_inequality_holds;
  std::optional<bool> agreement;
};

/// Checks that `candidate` is mapped into itself by every branch differential
/// and reports a rigorous expansion lower bound. Image containment is tested
/// with an absolute slope slack, which lets a cone whose boundary ray is
/// exactly fixed by a branch still certify under outward rounding.
ConeCertificate certify_unstable_cone(const MapSpec& spec, const Cone& candidate, double slack = 1e-12);

/// The Belykh unstable cone spanned by (-rho_psi / (gamma - lambda), 1) and
/// ((rho + rho_psi) / (gamma - lambda), 1) (mirrored for rho < 0).
/// Zero width when rho = rho_psi = 0.
Cone belykh_unstable_cone(const BelykhParams& p);

/// Default cone for curve iteration and transversality sampling: the Belykh
/// cone above, or the vertical ray for the degenerate remark map.
Cone default_unstable_cone(const MapSpec& spec);

/// Sufficient check of condition (T) for the Belykh family through
/// disjointness of the two branch images of the unstable cone, cross-checked
/// against the closed-form inequality. Throws InvalidForRhoZero for rho = 0
/// and InvalidParameters for non-Belykh specs.
ConeCertificate check_condition_T_cones(const MapSpec& spec);

struct MultiplicityCertificate {
  Cone cu;
  Cone cd;
  /// Image slopes of the singularity tangents, one per (line, branch).
  std::vector<Cone> tangent_images;
  /// Image of cd, one per branch.
  std::vector<Cone> cd_images;
  bool tangent_image_in_cd = false;
  bool cd_maps_into_cu = false;
  bool cd_cu_disjoint = false;
  bool tangent_N_outside_cu = false;

  bool pass() const { return tangent_image_in_cd && cd_maps_into_cu && cd_cu_disjoint && tangent_N_outside_cu; }
};

/// Cone criterion for vanishing multiplicity entropy on maps with straight
/// singularity lines. Throws CriterionInapplicable when a singularity line is
/// horizontal (its tangent is fixed by triangular differentials).
MultiplicityCertificate check_multiplicity_cones(const MapSpec& spec, const Cone& cu, const Cone& cd);

/// Searches inflations of the minimal admissible (cu, cd) pair. Throws
/// NotFound when the budget is exhausted and CriterionInapplicable for k = 0.
std::pair<Cone, Cone> search_multiplicity_cones(const MapSpec& spec, int budget = 64);

}  // namespace pwhyp
