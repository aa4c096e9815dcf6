#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pwhyp/curve_engine.hpp"
#include "pwhyp/map_model.hpp"

namespace pwhyp {

struct PointCloud {
  std::vector<Point2> points;
  std::uint64_t spec_hash = 0;
  std::string mode;  // orbit | curves
  std::size_t burn_in = 0;
  std::size_t orbits = 0;
  std::uint64_t seed = 0;
  /// Orbit restarts caused by iterates on the singularity set.
  std::uint64_t restarts = 0;
  /// Indices i such that points[i] is not the image of points[i - 1].
  std::vector<std::size_t> breaks;
};

/// `count` points from `orbits` independent random orbits, each burning in
/// `burn_in` steps first. Points on N restart the orbit nearby (recorded in
/// `breaks`). Throws InvalidParameters for burn_in < 100.
PointCloud sample_orbit_cloud(const MapSpec& spec, std::size_t burn_in, std::size_t count, std::uint64_t seed,
                              std::size_t orbits = 1, unsigned threads = 1);

/// Arc-length samples (pitch `spacing`) of the final generation of the curve
/// construction started from `seed_family`.
PointCloud sample_curve_cloud(const MapSpec& spec, const CurveFamily& seed_family, std::size_t generations,
                              const CurveEngineOptions& opts, double spacing = 1e-3);

struct RasterImage {
  int width = 0;
  int height = 0;
  /// Row-major, row 0 at the top (largest x2).
  std::vector<std::uint8_t> pixels;
  Box world;

  std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Pixel (col, row) of a point: x1 across, x2 upward; K maps onto the image.
std::pair<int, int> world_to_pixel(const Box& world, int width, int height, Point2 p);

/// log(1 + hits) normalized to 255 at the busiest pixel; empty clouds give
/// a black image. Throws InvalidParameters below 16 x 16.
RasterImage rasterize(const std::vector<Point2>& points, int width, int height, const Box& world);

std::string encode_pgm(const RasterImage& img);
void write_cloud_csv(std::ostream& os, const std::vector<Point2>& points);

}  // namespace pwhyp
