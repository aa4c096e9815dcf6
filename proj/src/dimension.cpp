#include "pwhyp/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "pwhyp/error.hpp"
#include "pwhyp/orbit.hpp"
#include "pwhyp/rng.hpp"

namespace pwhyp {

FormulaResult dim_formula(double chi_u, double chi_s) {
  if (!(chi_s < 0.0 && chi_u > 0.0)) throw Error(ErrorKind::SignError, "need chi_s < 0 < chi_u");
  return {std::min(2.0, 1.0 - chi_u / chi_s), chi_u + chi_s <= 0.0};
}

namespace {

double batch_stderr(const std::vector<double>& means) {
  const double b = static_cast<double>(means.size());
  double m = 0.0;
  for (double v : means) m += v;
  m /= b;
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  var /= (b - 1.0);
  return std::sqrt(var / b);
}

}  // namespace

LyapunovEstimate estimate_lyapunov(const MapSpec& spec, std::size_t n_steps, std::uint64_t seed, std::size_t burn_in) {
  if (n_steps < 1000) throw Error(ErrorKind::InvalidParameters, "need at least 1000 steps");
  constexpr std::size_t kBatches = 32;
  OrbitWalker walker(spec, CounterRng(derive_seed(seed, "lyapunov")));
  for (std::size_t i = 0; i < burn_in; ++i) walker.step();

  Point2 q1{1.0, 0.0}, q2{0.0, 1.0};
  std::vector<double> b1(kBatches, 0.0), b2(kBatches, 0.0);
  std::vector<std::size_t> bn(kBatches, 0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const Mat2 j = spec.branch(walker.current_piece()).jacobian(walker.current());
    const Point2 c1 = j * q1;
    Point2 c2 = j * q2;
    const double r11 = norm(c1);
    q1 = (1.0 / r11) * c1;
    c2 = c2 - dot(q1, c2) * q1;
    const double r22 = norm(c2);
    q2 = (1.0 / r22) * c2;
    const std::size_t b = i * kBatches / n_steps;
    b1[b] += std::log(r11);
    b2[b] += std::log(r22);
    ++bn[b];
    walker.step();
  }
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < kBatches; ++b) {
    s1 += b1[b];
    s2 += b2[b];
    b1[b] /= static_cast<double>(bn[b]);
    b2[b] /= static_cast<double>(bn[b]);
  }
  const double n = static_cast<double>(n_steps);
  LyapunovEstimate est;
  est.steps = n_steps;
  est.seed = seed;
  est.restarts = walker.restarts();
  const bool first_unstable = s1 >= s2;
  est.chi_u = (first_unstable ? s1 : s2) / n;
  est.chi_s = (first_unstable ? s2 : s1) / n;
  est.stderr_u = batch_stderr(first_unstable ? b1 : b2);
  est.stderr_s = batch_stderr(first_unstable ? b2 : b1);
  return est;
}

DimensionReport box_count_dimension(std::span<const Point2> points, int min_level, int max_level, const Box& box,
                                    std::size_t min_points) {
  if (!(2 <= min_level && min_level < max_level && max_level <= 12)) {
    throw Error(ErrorKind::InvalidParameters, "need 2 <= min_level < max_level <= 12");
  }
  if (points.size() < min_points) throw Error(ErrorKind::InsufficientPoints, "box counting needs more points");

  DimensionReport rep;
  rep.method = "boxcount";
  rep.points = points.size();
  const std::size_t side_max = std::size_t{1} << max_level;
  // Occupancy at the finest level; coarser levels are derived from it.
  std::vector<std::uint64_t> fine((side_max * side_max + 63) / 64, 0);
  auto index = [](double v, double lo, double width, std::size_t side) {
    const double t = (v - lo) / width * static_cast<double>(side);
    if (!(t > 0.0)) return std::size_t{0};
    return std::min(side - 1, static_cast<std::size_t>(t));
  };
  for (Point2 p : points) {
    const std::size_t i = index(p.x1, box.x1_lo, box.width(), side_max);
    const std::size_t j = index(p.x2, box.x2_lo, box.height(), side_max);
    const std::size_t c = i * side_max + j;
    fine[c >> 6] |= std::uint64_t{1} << (c & 63);
  }
  for (int level = min_level; level <= max_level; ++level) {
    const int shift = max_level - level;
    const std::size_t side = std::size_t{1} << level;
    std::vector<std::uint64_t> occ((side * side + 63) / 64, 0);
    std::size_t count = 0;
    for (std::size_t w = 0; w < fine.size(); ++w) {
      std::uint64_t bits = fine[w];
      while (bits) {
        const std::size_t c = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
        bits &= bits - 1;
        const std::size_t i = (c / side_max) >> shift, j = (c % side_max) >> shift;
        const std::size_t k = i * side + j;
        const std::uint64_t bit = std::uint64_t{1} << (k & 63);
        if (!(occ[k >> 6] & bit)) {
          occ[k >> 6] |= bit;
          ++count;
        }
      }
    }
    rep.levels.push_back({level, count, true, 0.0});
  }
  // Saturation guard on the two finest levels.
  for (std::size_t back = 0; back < 2; ++back) {
    BoxCountLevel& lv = rep.levels[rep.levels.size() - 1 - back];
    if (2 * lv.occupied > points.size()) lv.used = false;
  }
  std::vector<double> xs, ys;
  for (const BoxCountLevel& lv : rep.levels) {
    if (!lv.used) continue;
    xs.push_back(lv.level * std::log(2.0));
    ys.push_back(std::log(static_cast<double>(lv.occupied)));
  }
  if (xs.size() < 2) throw Error(ErrorKind::InsufficientPoints, "too few unsaturated levels");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  rep.value = sxy / sxx;
  rep.intercept = my - rep.value * mx;
  rep.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  for (BoxCountLevel& lv : rep.levels) {
    lv.residual = std::log(static_cast<double>(std::max<std::size_t>(lv.occupied, 1))) -
                  (rep.intercept + rep.value * lv.level * std::log(2.0));
  }
  return rep;
}

double beta_integral(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) throw Error(ErrorKind::DomainError, "the integral diverges for s <= 1");
  return 0.5 * std::sqrt(std::acos(-1.0)) * std::exp(std::lgamma(0.5 * (s - 1.0)) - std::lgamma(0.5 * s));
}

}  // namespace pwhyp
