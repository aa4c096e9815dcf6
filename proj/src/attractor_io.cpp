#include "pwhyp/attractor_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pwhyp/error.hpp"
#include "pwhyp/orbit.hpp"
#include "pwhyp/parallel.hpp"
#include "pwhyp/rng.hpp"
#include "pwhyp/text_io.hpp"

namespace pwhyp {

PointCloud sample_orbit_cloud(const MapSpec& spec, std::size_t burn_in, std::size_t count, std::uint64_t seed,
                              std::size_t orbits, unsigned threads) {
  if (burn_in < 100) throw Error(ErrorKind::InvalidParameters, "burn-in must be at least 100");
  if (orbits == 0) throw Error(ErrorKind::InvalidParameters, "need at least one orbit");
  PointCloud cloud;
  cloud.spec_hash = spec.content_hash();
  cloud.mode = "orbit";
  cloud.burn_in = burn_in;
  cloud.orbits = orbits;
  cloud.seed = seed;
  cloud.points.resize(count);

  std::vector<std::uint64_t> restarts(orbits, 0);
  std::vector<std::vector<std::size_t>> breaks(orbits);
  parallel_for(orbits, threads, [&](std::size_t o) {
    const std::size_t begin = count * o / orbits, end = count * (o + 1) / orbits;
    if (begin == end) return;
    OrbitWalker walker(spec, CounterRng(derive_seed(seed, "orbit-cloud", o)));
    for (std::size_t i = 0; i < burn_in; ++i) walker.step();
    const std::uint64_t before = walker.restarts();
    breaks[o].push_back(begin);
    cloud.points[begin] = walker.current();
    for (std::size_t i = begin + 1; i < end; ++i) {
      cloud.points[i] = walker.step();
      if (walker.restarted_last()) breaks[o].push_back(i);
    }
    restarts[o] = walker.restarts() - before;
  });
  for (std::size_t o = 0; o < orbits; ++o) {
    cloud.restarts += restarts[o];
    cloud.breaks.insert(cloud.breaks.end(), breaks[o].begin(), breaks[o].end());
  }
  return cloud;
}

PointCloud sample_curve_cloud(const MapSpec& spec, const CurveFamily& seed_family, std::size_t generations,
                              const CurveEngineOptions& opts, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidParameters, "spacing must be positive");
  const CurveFamily fam = run_family(spec, seed_family, generations, opts);
  PointCloud cloud;
  cloud.spec_hash = spec.content_hash();
  cloud.mode = "curves";
  for (const TaggedCurve& c : fam.curves) {
    const double len = c.curve.length();
    const auto n = static_cast<std::size_t>(std::ceil(len / spacing));
    for (std::size_t i = 0; i <= n; ++i) cloud.points.push_back(c.curve.point_at(len * static_cast<double>(i) / n));
  }
  return cloud;
}

std::pair<int, int> world_to_pixel(const Box& world, int width, int height, Point2 p) {
  const double u = (p.x1 - world.x1_lo) / world.width() * width;
  const double v = (world.x2_hi - p.x2) / world.height() * height;
  const int col = std::clamp(static_cast<int>(std::floor(u)), 0, width - 1);
  const int row = std::clamp(static_cast<int>(std::floor(v)), 0, height - 1);
  return {col, row};
}

RasterImage rasterize(const std::vector<Point2>& points, int width, int height, const Box& world) {
  if (width < 16 || height < 16) throw Error(ErrorKind::InvalidParameters, "image must be at least 16 x 16");
  RasterImage img;
  img.width = width;
  img.height = height;
  img.world = world;
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(width) * height, 0);
  for (Point2 p : points) {
    if (!world.contains(p, 1e-9)) continue;
    const auto [c, r] = world_to_pixel(world, width, height, p);
    ++hits[static_cast<std::size_t>(r) * width + c];
  }
  const std::uint64_t peak = *std::max_element(hits.begin(), hits.end());
  img.pixels.assign(hits.size(), 0);
  if (peak == 0) return img;
  const double denom = std::log1p(static_cast<double>(peak));
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] == 0) continue;
    // Any hit stays visible.
    const double v = 255.0 * std::log1p(static_cast<double>(hits[i])) / denom;
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 1L, 255L));
  }
  return img;
}

std::string encode_pgm(const RasterImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

void write_cloud_csv(std::ostream& os, const std::vector<Point2>& points) {
  os << "x1,x2\n";
  for (Point2 p : points) os << fmt_real(p.x1) << ',' << fmt_real(p.x2) << '\n';
}

}  // namespace pwhyp
