#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwhyp/curve_engine.hpp"
#include "pwhyp/geometry.hpp"
#include "pwhyp/map_model.hpp"

namespace pwhyp {

struct FormulaResult {
  double value = 0.0;
  /// chi_u + chi_s <= 0.
  bool invertible = false;
};

/// min{2, 1 - chi_u / chi_s}. Throws SignError unless chi_s < 0 < chi_u.
FormulaResult dim_formula(double chi_u, double chi_s);

struct LyapunovEstimate {
  double chi_u = 0.0;
  double chi_s = 0.0;
  std::size_t steps = 0;
  double stderr_u = 0.0;
  double stderr_s = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t restarts = 0;
};

/// Averages the Gram-Schmidt growth of the Jacobian cocycle along one random
/// orbit, re-orthonormalizing every step from the coordinate frame. Standard
/// errors come from 32 batch means. Throws OrbitEscaped, InvalidParameters
/// for n_steps < 1000.
LyapunovEstimate estimate_lyapunov(const MapSpec& spec, std::size_t n_steps, std::uint64_t seed,
                                   std::size_t burn_in = 100);

struct BoxCountLevel {
  int level = 0;
  std::size_t occupied = 0;
  bool used = false;
  double residual = 0.0;
};

struct EnergyScanRow {
  double s = 0.0;
  /// E(n) at the final generation for each M in the ladder.
  std::vector<double> energy_by_M;
  /// E(n_{i+1}) / E(n_i) at the middle cap for consecutive generations.
  std::vector<double> generation_ratios;
  double m_ratio_bounded = 0.0;
  double m_ratio_divergent = 0.0;
  std::string verdict;  // bounded | divergent | inconclusive
};

struct DimensionReport {
  std::string method;  // formula | boxcount | energy-critical
  std::string status = "ok";
  double value = 0.0;
  std::optional<double> bracket_lo;
  std::optional<double> bracket_hi;
  std::optional<bool> invertible;
  // box counting
  std::vector<BoxCountLevel> levels;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  // energy scan
  std::vector<double> caps;
  std::vector<std::size_t> generations;
  std::vector<EnergyScanRow> scan;
};

/// Slope of log N(eps) against log(1/eps) with cells of side 2^-level of the
/// box. The two finest levels are dropped while their counts exceed half the
/// point count. Throws InsufficientPoints below 10^5 points or when fewer than
/// two levels remain, InvalidParameters for a bad level range.
DimensionReport box_count_dimension(std::span<const Point2> points, int min_level, int max_level,
                                    const Box& box = Box{}, std::size_t min_points = 100000);

/// (sqrt(pi) / 2) Gamma((s - 1) / 2) / Gamma(s / 2), the integral of
/// (1 + x^2)^(-s/2) over [0, inf). Throws DomainError for s <= 1.
double beta_integral(double s);

struct EmpiricalMeasure {
  std::vector<Point2> points;
  std::vector<double> weights;
  std::size_t generation = 0;
};

/// Arc-length midpoints of `points_per_curve` equal cells on each curve, each
/// curve carrying total mass 1 / N(n).
EmpiricalMeasure build_mu_n(const CurveFamily& fam, std::size_t points_per_curve);

struct EnergyOptions {
  /// Drop pairs at distance 0 (the diagonal of an atomic measure).
  bool exclude_duplicates = false;
  unsigned threads = 1;
  /// Finest quadtree level of the local proposal.
  int max_level = 24;
};

struct EnergyEstimate {
  double s = 0.0;
  double M = 0.0;
  std::size_t n = 0;
  double value = 0.0;
  std::size_t pairs_sampled = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  /// Estimated mu x mu mass of distance-0 pairs (removed when excluded).
  double duplicate_mass = 0.0;
};

/// Importance-sampled estimate of sum_ij w_i w_j min{M, |x_i - x_j|^-s}.
/// The second point is drawn half the time from mu and half the time from mu
/// restricted to a random quadtree cell around the first point, and weighted
/// by the likelihood ratio. Stderr from 64 batch means. Throws
/// InvalidParameters outside s in (0, 2.5), M > 0, pairs >= 10^4.
EnergyEstimate energy(const EmpiricalMeasure& mu, double s, double M, std::size_t pairs, std::uint64_t seed,
                      const EnergyOptions& opts = {});

/// Weighted pair-distance sample: a log-distance histogram from which
/// E(s, M) is evaluated for any s and M.
class PairDistanceSample {
 public:
  PairDistanceSample(const EmpiricalMeasure& mu, std::size_t pairs, std::uint64_t seed, const EnergyOptions& opts = {});
  double energy(double s, double M) const;
  std::size_t pairs() const { return pairs_; }
  double duplicate_mass() const { return zero_mass_ / static_cast<double>(pairs_); }

 private:
  std::size_t pairs_ = 0;
  bool exclude_ = false;
  double zero_mass_ = 0.0;
  std::vector<double> mass_;
  std::vector<double> log_mass_;
};

struct ScanOptions {
  std::vector<double> s_grid;
  /// Increasing generations spaced by 2; at least three.
  std::vector<std::size_t> generations;
  double m_low = 1e4;
  double m_mid = 1e6;
  double m_high = 1e8;
  std::size_t pairs = 4000000;
  std::uint64_t seed = 0;
  EnergyOptions energy{.exclude_duplicates = true};
};

using MeasureGenerator = std::function<EmpiricalMeasure(std::size_t generation)>;

/// Per s: bounded iff the last two generation ratios are <= 1.1 and
/// E(m_high) / E(m_mid) <= 1.25; divergent iff a generation ratio or
/// E(m_high) / E(m_low) is >= 2; inconclusive otherwise. The estimate is the
/// midpoint of [last bounded s, first divergent s]; status "inconclusive"
/// when a bounded s follows a divergent one.
DimensionReport critical_exponent_scan(const MeasureGenerator& generator, const ScanOptions& opts);

/// s-grid from lo to hi inclusive in steps of `step` (rounded to 1e-9).
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace pwhyp
