#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pwhyp/transversality.hpp"
#include "transversality_oracle.hpp"

using namespace pwhyp;
using oracle::critical_delta;
using oracle::through;

TEST_CASE("crossing segments separate at sin of the half angle") {
  for (double theta : {0.4, 1.0, 2.0}) {
    const Polyline g1 = through({0, 0}, 0.5 * theta, 0.2), g2 = through({0, 0}, -0.5 * theta, 0.2);
    const double critical = critical_delta(theta);
    CHECK(check_pair_transversal(g1, g2, 0.05, 0.5 * critical).passed);
    CHECK_FALSE(check_pair_transversal(g1, g2, 0.05, std::min(0.99, 1.5 * critical)).passed);
    CHECK(check_pair_transversal(g1, g2, 0.05, 0.5 * critical).delta_max == doctest::Approx(critical).epsilon(0.02));
  }
}

TEST_CASE("far apart curves are vacuously transversal") {
  const TransversalityReport r = check_pair_transversal(through({0, 0}, 0.3, 0.1), through({1, 1}, 0.3, 0.1), 0.05, 0.5);
  CHECK(r.vacuous);
  CHECK(r.passed);
}

TEST_CASE("discretized check agrees with the fine brute-force oracle") {
  // Every fifth pair here; the acceptance run covers the whole corpus.
  const auto pairs = oracle::corpus();
  for (std::size_t i = 0; i < pairs.size(); i += 5) {
    const auto& p = pairs[i];
    CHECK_MESSAGE(check_pair_transversal(p.g1, p.g2, 0.05, p.delta).passed ==
                      oracle::transversal(p.g1, p.g2, 0.05, p.delta),
                  "pair " << i);
  }
}

TEST_CASE("condition T sampling on the degenerate family is zero") {
  const ConditionTReport r = sample_condition_T(MapSpec::belykh(BelykhParams::degenerate_rho_zero()), 10, 1);
  CHECK(r.delta_max == 0.0);
  CHECK_FALSE(r.passed);
}
