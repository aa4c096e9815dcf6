#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "pwhyp/dimension.hpp"
#include "pwhyp/error.hpp"
#include "pwhyp/parallel.hpp"
#include "pwhyp/rng.hpp"

namespace pwhyp {

EmpiricalMeasure build_mu_n(const CurveFamily& fam, std::size_t points_per_curve) {
  if (fam.curves.empty()) throw Error(ErrorKind::InvalidParameters, "empty curve family");
  if (points_per_curve == 0) throw Error(ErrorKind::InvalidParameters, "need at least one point per curve");
  EmpiricalMeasure mu;
  mu.generation = fam.generation;
  const double w = 1.0 / static_cast<double>(fam.curves.size() * points_per_curve);
  mu.points.reserve(fam.curves.size() * points_per_curve);
  for (const TaggedCurve& c : fam.curves) {
    const double len = c.curve.length();
    for (std::size_t j = 0; j < points_per_curve; ++j) {
      mu.points.push_back(c.curve.point_at(len * (static_cast<double>(j) + 0.5) / static_cast<double>(points_per_curve)));
    }
  }
  mu.weights.assign(mu.points.size(), w);
  return mu;
}

namespace {

constexpr int kMortonBits = 24;
constexpr std::size_t kBatches = 64;

std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0xffffffULL;
  v = (v | (v << 16)) & 0x0000ff0000ffULL;
  v = (v | (v << 8)) & 0x00f00f00f00fULL;
  v = (v | (v << 4)) & 0x0c30c30c30c3ULL;
  v = (v | (v << 2)) & 0x249249249249ULL;
  return v;
}

// Points in Morton order of a 2^24 grid over their bounding square, with
// prefix masses, so every quadtree cell is a contiguous index range.
class PairSampler {
 public:
  PairSampler(const EmpiricalMeasure& mu, int max_level) : max_level_(std::clamp(max_level, 1, kMortonBits)) {
    if (mu.points.empty() || mu.points.size() != mu.weights.size()) {
      throw Error(ErrorKind::InvalidParameters, "measure needs matching points and weights");
    }
    double lo1 = mu.points[0].x1, hi1 = lo1, lo2 = mu.points[0].x2, hi2 = lo2;
    for (Point2 p : mu.points) {
      lo1 = std::min(lo1, p.x1), hi1 = std::max(hi1, p.x1);
      lo2 = std::min(lo2, p.x2), hi2 = std::max(hi2, p.x2);
    }
    const double side = std::max({hi1 - lo1, hi2 - lo2, 1e-300}) * (1.0 + 1e-12);
    const double scale = static_cast<double>(1ULL << kMortonBits) / side;
    std::vector<std::uint64_t> code(mu.points.size());
    for (std::size_t i = 0; i < mu.points.size(); ++i) {
      const auto gx = std::min<std::uint64_t>((1ULL << kMortonBits) - 1,
                                              static_cast<std::uint64_t>((mu.points[i].x1 - lo1) * scale));
      const auto gy = std::min<std::uint64_t>((1ULL << kMortonBits) - 1,
                                              static_cast<std::uint64_t>((mu.points[i].x2 - lo2) * scale));
      code[i] = (spread_bits(gx) << 1) | spread_bits(gy);
    }
    std::vector<std::size_t> order(mu.points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return code[a] < code[b]; });
    points_.reserve(order.size());
    codes_.reserve(order.size());
    prefix_.assign(order.size() + 1, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) total += mu.weights[order[k]];
    for (std::size_t k = 0; k < order.size(); ++k) {
      points_.push_back(mu.points[order[k]]);
      codes_.push_back(code[order[k]]);
      prefix_[k + 1] = prefix_[k] + mu.weights[order[k]] / total;
    }
    prefix_.back() = 1.0;
  }

  // Draws (x, y) and returns {|x - y|, likelihood ratio mu(y) / q(y | x)}.
  std::pair<double, double> draw(CounterRng& rng) const {
    const std::size_t i = pick(0, points_.size(), rng);
    const std::uint64_t ci = codes_[i];
    std::size_t j;
    if (rng.uniform() < 0.5) {
      j = pick(0, points_.size(), rng);
    } else {
      const int level = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_level_)));
      const auto [lo, hi] = cell(ci, level, 0, points_.size());
      j = pick(lo, hi, rng);
    }
    // Sum over the levels whose cell around x also holds y of 1 / mu(cell).
    const std::uint64_t diff = ci ^ codes_[j];
    const int common_bits = diff == 0 ? 2 * kMortonBits : __builtin_clzll(diff) - (64 - 2 * kMortonBits);
    const int shared = std::min(max_level_, common_bits / 2);
    double inv_mass = 0.0;
    std::size_t lo = 0, hi = points_.size();
    for (int level = 1; level <= shared; ++level) {
      std::tie(lo, hi) = cell(ci, level, lo, hi);
      inv_mass += 1.0 / (prefix_[hi] - prefix_[lo]);
    }
    const double q_ratio = 0.5 + 0.5 * inv_mass / static_cast<double>(max_level_);
    return {distance(points_[i], points_[j]), 1.0 / q_ratio};
  }

 private:
  std::size_t pick(std::size_t lo, std::size_t hi, CounterRng& rng) const {
    const double u = prefix_[lo] + rng.uniform() * (prefix_[hi] - prefix_[lo]);
    auto it = std::upper_bound(prefix_.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                               prefix_.begin() + static_cast<std::ptrdiff_t>(hi), u);
    return static_cast<std::size_t>(it - prefix_.begin()) - 1;
  }

  // Index range of the level-`level` cell holding `c`, searched within [lo, hi).
  std::pair<std::size_t, std::size_t> cell(std::uint64_t c, int level, std::size_t lo, std::size_t hi) const {
    const int shift = 2 * (kMortonBits - level);
    const std::uint64_t key = c >> shift;
    const auto b = codes_.begin();
    auto first = std::partition_point(b + static_cast<std::ptrdiff_t>(lo), b + static_cast<std::ptrdiff_t>(hi),
                                      [&](std::uint64_t v) { return (v >> shift) < key; });
    auto last = std::partition_point(first, b + static_cast<std::ptrdiff_t>(hi),
                                     [&](std::uint64_t v) { return (v >> shift) == key; });
    return {static_cast<std::size_t>(first - b), static_cast<std::size_t>(last - b)};
  }

  int max_level_;
  std::vector<Point2> points_;
  std::vector<std::uint64_t> codes_;
  std::vector<double> prefix_;
};

std::size_t batch_size(std::size_t pairs, std::size_t b) { return pairs * (b + 1) / kBatches - pairs * b / kBatches; }

// Log-distance histogram geometry: 1000 bins per decade over [1e-18, 10).
constexpr double kLogLo = -18.0;
constexpr double kBinsPerDecade = 1000.0;
constexpr std::size_t kBins = 19000;

std::size_t bin_of(double r) {
  const double t = (std::log10(r) - kLogLo) * kBinsPerDecade;
  if (!(t > 0.0)) return 0;
  return std::min(kBins - 1, static_cast<std::size_t>(t));
}

}  // namespace

EnergyEstimate energy(const EmpiricalMeasure& mu, double s, double M, std::size_t pairs, std::uint64_t seed,
                      const EnergyOptions& opts) {
  if (!(s > 0.0 && s < 2.5)) throw Error(ErrorKind::InvalidParameters, "need 0 < s < 2.5");
  if (!(M > 0.0)) throw Error(ErrorKind::InvalidParameters, "need M > 0");
  if (pairs < 10000) throw Error(ErrorKind::InvalidParameters, "need at least 10^4 pairs");
  const PairSampler sampler(mu, opts.max_level);
  std::vector<double> sums(kBatches, 0.0), zero(kBatches, 0.0);
  parallel_for(kBatches, opts.threads, [&](std::size_t b) {
    CounterRng rng(derive_seed(seed, "energy", b));
    double acc = 0.0, z = 0.0;
    for (std::size_t k = batch_size(pairs, b); k-- > 0;) {
      const auto [r, w] = sampler.draw(rng);
      if (r == 0.0) {
        z += w;
        if (opts.exclude_duplicates) continue;
      }
      acc += w * (r == 0.0 ? M : std::min(M, std::pow(r, -s)));
    }
    sums[b] = acc;
    zero[b] = z;
  });
  EnergyEstimate est;
  est.s = s;
  est.M = M;
  est.seed = seed;
  est.pairs_sampled = pairs;
  double total = 0.0, ztotal = 0.0;
  std::vector<double> means(kBatches);
  for (std::size_t b = 0; b < kBatches; ++b) {
    total += sums[b];
    ztotal += zero[b];
    means[b] = sums[b] / static_cast<double>(batch_size(pairs, b));
  }
  est.value = total / static_cast<double>(pairs);
  est.duplicate_mass = ztotal / static_cast<double>(pairs);
  double var = 0.0;
  for (double m : means) var += (m - est.value) * (m - est.value);
  est.std_error = std::sqrt(var / static_cast<double>(kBatches - 1) / static_cast<double>(kBatches));
  return est;
}

PairDistanceSample::PairDistanceSample(const EmpiricalMeasure& mu, std::size_t pairs, std::uint64_t seed,
                                       const EnergyOptions& opts)
    : pairs_(pairs), exclude_(opts.exclude_duplicates) {
  if (pairs < 10000) throw Error(ErrorKind::InvalidParameters, "need at least 10^4 pairs");
  const PairSampler sampler(mu, opts.max_level);
  struct Batch {
    std::vector<double> mass, log_mass;
    double zero = 0.0;
  };
  std::vector<Batch> batches(kBatches);
  parallel_for(kBatches, opts.threads, [&](std::size_t b) {
    CounterRng rng(derive_seed(seed, "pair-distances", b));
    Batch& out = batches[b];
    out.mass.assign(kBins, 0.0);
    out.log_mass.assign(kBins, 0.0);
    for (std::size_t k = batch_size(pairs, b); k-- > 0;) {
      const auto [r, w] = sampler.draw(rng);
      if (r == 0.0) {
        out.zero += w;
        continue;
      }
      const std::size_t bin = bin_of(r);
      out.mass[bin] += w;
      out.log_mass[bin] += w * std::log(r);
    }
  });
  mass_.assign(kBins, 0.0);
  log_mass_.assign(kBins, 0.0);
  for (const Batch& b : batches) {
    zero_mass_ += b.zero;
    for (std::size_t i = 0; i < kBins; ++i) {
      mass_[i] += b.mass[i];
      log_mass_[i] += b.log_mass[i];
    }
  }
}

double PairDistanceSample::energy(double s, double M) const {
  double acc = exclude_ ? 0.0 : zero_mass_ * M;
  for (std::size_t i = 0; i < kBins; ++i) {
    if (mass_[i] == 0.0) continue;
    // Kernel at the bin's mass-weighted mean log distance.
    const double log_r = log_mass_[i] / mass_[i];
    acc += mass_[i] * std::min(M, std::exp(-s * log_r));
  }
  return acc / static_cast<double>(pairs_);
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorKind::InvalidParameters, "bad grid");
  std::vector<double> g;
  for (std::size_t i = 0;; ++i) {
    const double v = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (v > hi + 1e-12) break;
    g.push_back(v);
  }
  return g;
}

DimensionReport critical_exponent_scan(const MeasureGenerator& generator, const ScanOptions& opts) {
  if (opts.generations.size() < 3) throw Error(ErrorKind::InvalidParameters, "scan needs three generations");
  if (opts.s_grid.empty()) throw Error(ErrorKind::InvalidParameters, "empty s grid");
  for (double s : opts.s_grid) {
    if (!(s > 1.0 && s < 2.0)) throw Error(ErrorKind::InvalidParameters, "s grid must lie in (1, 2)");
  }
  DimensionReport rep;
  rep.method = "energy-critical";
  rep.caps = {opts.m_low, opts.m_mid, opts.m_high};
  rep.generations = opts.generations;

  std::vector<PairDistanceSample> samples;
  for (std::size_t gi = 0; gi < opts.generations.size(); ++gi) {
    const EmpiricalMeasure mu = generator(opts.generations[gi]);
    samples.emplace_back(mu, opts.pairs, derive_seed(opts.seed, "scan-generation", opts.generations[gi]), opts.energy);
  }
  const PairDistanceSample& last = samples.back();

  std::optional<double> last_bounded, first_divergent;
  bool monotone = true;
  for (double s : opts.s_grid) {
    EnergyScanRow row;
    row.s = s;
    for (double m : rep.caps) row.energy_by_M.push_back(last.energy(s, m));
    for (std::size_t gi = 1; gi < samples.size(); ++gi) {
      row.generation_ratios.push_back(samples[gi].energy(s, opts.m_mid) / samples[gi - 1].energy(s, opts.m_mid));
    }
    row.m_ratio_bounded = row.energy_by_M[2] / row.energy_by_M[1];
    row.m_ratio_divergent = row.energy_by_M[2] / row.energy_by_M[0];
    const std::size_t g = row.generation_ratios.size();
    const bool gen_bounded = row.generation_ratios[g - 1] <= 1.1 && row.generation_ratios[g - 2] <= 1.1;
    const bool gen_divergent = std::any_of(row.generation_ratios.begin(), row.generation_ratios.end(),
                                           [](double r) { return r >= 2.0; });
    if (gen_bounded && row.m_ratio_bounded <= 1.25) {
      row.verdict = "bounded";
      if (first_divergent) monotone = false;
      last_bounded = s;
    } else if (gen_divergent || row.m_ratio_divergent >= 2.0) {
      row.verdict = "divergent";
      if (!first_divergent) first_divergent = s;
    } else {
      row.verdict = "inconclusive";
    }
    rep.scan.push_back(std::move(row));
  }
  rep.bracket_lo = last_bounded.value_or(1.0);
  rep.bracket_hi = first_divergent.value_or(2.0);
  if (!monotone || *rep.bracket_hi < *rep.bracket_lo) {
    rep.status = "inconclusive";
    rep.value = std::nan("");
  } else {
    rep.value = 0.5 * (*rep.bracket_lo + *rep.bracket_hi);
  }
  return rep;
}

}  // namespace pwhyp
