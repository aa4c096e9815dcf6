#include <cmath>

#include "doctest.h"
#include "pwhyp/cone_verifier.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/rng.hpp"

using namespace pwhyp;

namespace {

BelykhParams params(double lambda, double gamma, double rho) {
  BelykhParams p;
  p.lambda = lambda;
  p.gamma = gamma;
  p.rho = rho;
  p.b1 = -(gamma - 1.0);
  p.b2 = gamma - 1.0;
  return p;
}

}  // namespace

TEST_CASE("figure map unstable cone") {
  const BelykhParams p = BelykhParams::figure_map();
  const Cone c = belykh_unstable_cone(p);
  CHECK(c.s_lo() == 0.0);
  CHECK(c.s_hi() == doctest::Approx(0.1 / 1.5));
  const MapSpec f = MapSpec::belykh(p);
  const ConeCertificate cert = certify_unstable_cone(f, c);
  CHECK(cert.invariant);
  CHECK(cert.expanding);

  // Sampled minimum of |Df v| / |v| over the cone bounds the certificate from above.
  double sampled = INFINITY;
  for (PieceId id : {1, 2}) {
    const Mat2 m = f.branch(id).linear;
    for (int i = 0; i <= 1000; ++i) {
      const double s = c.s_lo() + c.width() * i / 1000.0;
      sampled = std::min(sampled, norm(m * Point2{s, 1.0}) / norm(Point2{s, 1.0}));
    }
  }
  CHECK(cert.expansion_lower_bound <= sampled);
  CHECK(cert.expansion_lower_bound > sampled - 1e-2);
  CHECK_FALSE(certify_unstable_cone(f, Cone(0.5, 0.6)).invariant);
}

TEST_CASE("condition T cones on named maps") {
  const ConeCertificate fig = check_condition_T_cones(MapSpec::belykh(BelykhParams::figure_map()));
  CHECK(fig.disjoint_images);
  CHECK(fig.agreement == true);
  const ConeCertificate weak = check_condition_T_cones(MapSpec::belykh(params(0.7, 1.2, 0.1)));
  CHECK_FALSE(weak.disjoint_images);
  CHECK(weak.equivalent_inequality_holds == false);
  CHECK_THROWS_AS(check_condition_T_cones(MapSpec::belykh(BelykhParams::degenerate_rho_zero())), Error);
  CHECK_THROWS_AS(check_condition_T_cones(MapSpec::degenerate_remark()), Error);
}

TEST_CASE("cone disjointness agrees with gamma > 2 lambda") {
  CounterRng rng(derive_seed(5, "cone-equivalence"));
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const double lambda = rng.uniform(0.05, 0.95), gamma = rng.uniform(1.05, 1.95);
    const double rho = rng.uniform(0.01, 0.2) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    try {
      const ConeCertificate c = check_condition_T_cones(MapSpec::belykh(params(lambda, gamma, rho)));
      CHECK(c.disjoint_images == (gamma > 2.0 * lambda));
      ++checked;
    } catch (const Error&) {
      // Parameters whose image leaves K are not Belykh maps on K.
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("multiplicity cones") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const MultiplicityCertificate documented = check_multiplicity_cones(f, Cone(0.0, 0.6), Cone(1.0, 3.0));
  CHECK(documented.pass());
  const auto [cu, cd] = search_multiplicity_cones(f);
  CHECK(check_multiplicity_cones(f, cu, cd).pass());
  CHECK_FALSE(check_multiplicity_cones(f, Cone(0.0, 0.6), Cone(0.5, 3.0)).pass());
  CHECK_THROWS_AS(search_multiplicity_cones(MapSpec::belykh(BelykhParams::degenerate_rho_zero())), Error);
}
