#include <cmath>
#include <functional>

#include "doctest.h"
#include "pwhyp/curve_engine.hpp"
#include "pwhyp/dimension.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/orbit.hpp"
#include "pwhyp/rng.hpp"

using namespace pwhyp;

namespace {

// Adaptive Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 60);
}

BelykhParams perturbed() {
  BelykhParams p;
  p.psi1.coeffs = {0.0, 0.01, 0.005};
  p.psi2.coeffs = {0.0, -0.01, 0.0, 0.004};
  return p;
}

EmpiricalMeasure cantor_dust(int n) {
  // Centres of the 4^n squares of the product of two middle-thirds Cantor sets.
  std::vector<double> c{0.5};
  double side = 1.0;
  for (int i = 0; i < n; ++i) {
    side /= 3.0;
    std::vector<double> next;
    for (double x : c) {
      next.push_back(x - side);
      next.push_back(x + side);
    }
    c = std::move(next);
  }
  EmpiricalMeasure mu;
  for (double x : c)
    for (double y : c) mu.points.push_back({x, y});
  mu.weights.assign(mu.points.size(), 1.0 / static_cast<double>(mu.points.size()));
  mu.generation = static_cast<std::size_t>(n);
  return mu;
}

}  // namespace

TEST_CASE("dimension formula") {
  const FormulaResult fig = dim_formula(std::log(1.8), std::log(0.3));
  CHECK(fig.value == doctest::Approx(1.488206).epsilon(1e-6));
  CHECK(fig.invertible);
  CHECK(dim_formula(std::log(1.8), std::log(0.5)).value == doctest::Approx(1.847999).epsilon(1e-6));
  CHECK(dim_formula(std::log(2.0), std::log(0.9)).value == 2.0);
  CHECK_FALSE(dim_formula(std::log(2.0), std::log(0.9)).invertible);
  CHECK_THROWS_AS(dim_formula(-0.1, -1.0), Error);
}

TEST_CASE("Lyapunov exponents of affine maps are exact") {
  const MapSpec f = MapSpec::belykh(BelykhParams::figure_map());
  const LyapunovEstimate e = estimate_lyapunov(f, 20000, 9);
  CHECK(std::abs(e.chi_u - std::log(1.8)) < 1e-9);
  CHECK(std::abs(e.chi_s - std::log(0.3)) < 1e-9);
  CHECK_THROWS_AS(estimate_lyapunov(f, 10, 9), Error);
}

TEST_CASE("per-step Gram-Schmidt agrees with QR of the Jacobian product") {
  const MapSpec f = MapSpec::belykh(perturbed());
  OrbitWalker walker(f, CounterRng(derive_seed(2, "qr-oracle")));
  for (int i = 0; i < 200; ++i) walker.step();
  for (int trial = 0; trial < 20; ++trial) {
    const Point2 p = walker.current();
    Mat2 product;
    Point2 q = p;
    for (int i = 0; i < 20; ++i) {
      product = f.jacobian(q) * product;
      q = f.apply(q);
    }
    // QR of the product: R11 = |M e1|, R22 = det M / R11.
    const double r11 = std::hypot(product.a11, product.a21);
    const double r22 = std::abs(product.det()) / r11;
    const auto factors = log_expansion_factors(f, p, 20);
    REQUIRE(factors.has_value());
    CHECK(factors->first == doctest::Approx(std::log(r22)).epsilon(1e-10));
    CHECK(factors->second == doctest::Approx(std::log(r11)).epsilon(1e-10));
    for (int i = 0; i < 7; ++i) walker.step();
  }
}

TEST_CASE("beta integral against quadrature") {
  const double pi = std::acos(-1.0);
  for (double s : {1.5, 2.0, 2.5, 3.0}) {
    // x = tan(t), then t = (pi / 2)(1 - w^2) to tame the endpoint singularity at s < 2.
    const auto g = [s, pi](double w) {
      if (w == 0.0) return s == 1.5 ? pi / std::sqrt(pi / 2.0) : 0.0;
      return std::pow(std::sin(pi * w * w / 2.0), s - 2.0) * pi * w;
    };
    CHECK(std::abs(beta_integral(s) - integrate(g, 0.0, 1.0, 1e-13)) < 1e-8);
  }
  CHECK(std::abs(beta_integral(3.0) - 1.0) < 1e-10);
  CHECK(beta_integral(2.0) == doctest::Approx(std::acos(-1.0) / 2.0));
  CHECK_THROWS_AS(beta_integral(1.0), Error);
}

TEST_CASE("box counting on sets of known dimension") {
  std::vector<Point2> square, segment;
  CounterRng rng(7);
  for (int i = 0; i < 200000; ++i) {
    square.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    segment.push_back({0.3, rng.uniform(-1, 1)});
  }
  CHECK(box_count_dimension(square, 2, 6).value == doctest::Approx(2.0).epsilon(0.02));
  CHECK(box_count_dimension(segment, 2, 8).value == doctest::Approx(1.0).epsilon(0.02));
  const std::vector<Point2> few(10, Point2{0.1, 0.1});
  CHECK_THROWS_AS(box_count_dimension(few, 4, 9), Error);
}

TEST_CASE("energy estimators against the exact double sum") {
  const EmpiricalMeasure mu = cantor_dust(3);
  for (double s : {0.8, 1.5}) {
    double exact = 0.0;
    for (std::size_t i = 0; i < mu.points.size(); ++i)
      for (std::size_t j = 0; j < mu.points.size(); ++j) {
        const double d = distance(mu.points[i], mu.points[j]);
        exact += mu.weights[i] * mu.weights[j] * (d == 0.0 ? 1e6 : std::min(1e6, std::pow(d, -s)));
      }
    const EnergyEstimate e = energy(mu, s, 1e6, 400000, 3);
    CHECK(std::abs(e.value - exact) < 4.0 * e.std_error + 1e-3 * exact);
    const PairDistanceSample sample(mu, 400000, 3);
    CHECK(sample.energy(s, 1e6) == doctest::Approx(exact).epsilon(0.05));
  }
}

TEST_CASE("critical exponent of a Cantor dust") {
  // The product of two middle-thirds Cantor sets has dimension log 4 / log 3.
  // Its energies converge slowly below the critical exponent, so only the
  // divergent side is sharp at these generations.
  const double d = std::log(4.0) / std::log(3.0);
  ScanOptions opts;
  opts.s_grid = make_grid(1.05, 1.55, 0.05);
  opts.generations = {6, 8, 10};
  opts.pairs = 1000000;
  opts.seed = 4;
  const DimensionReport r = critical_exponent_scan([](std::size_t n) { return cantor_dust(static_cast<int>(n)); }, opts);
  REQUIRE(r.bracket_lo.has_value());
  CHECK(*r.bracket_lo <= d);
  CHECK(*r.bracket_hi >= d);
  for (const EnergyScanRow& row : r.scan) {
    if (row.s < d) CHECK(row.verdict != "divergent");
    if (row.s >= 1.5) CHECK(row.verdict == "divergent");
  }
}

TEST_CASE("s grid") {
  const auto g = make_grid(1.05, 1.95, 0.05);
  CHECK(g.size() == 19);
  CHECK(g.back() == doctest::Approx(1.95));
  CHECK_THROWS_AS(make_grid(1.0, 0.5, 0.1), Error);
}
