#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwhyp/geometry.hpp"
#include "pwhyp/map_model.hpp"

namespace pwhyp {

/// A curve together with the pieces visited since the seed.
struct TaggedCurve {
  Polyline curve;
  std::vector<std::uint8_t> itinerary;
  /// Index of the parent curve in the previous generation.
  std::size_t parent = 0;
};

/// Generation n of the iterate-split-chop construction.
struct CurveFamily {
  std::size_t generation = 0;
  int q = 1;
  double l = 0.05;
  std::vector<TaggedCurve> curves;

  double total_length() const;
  static CurveFamily seed(Polyline curve, int q, double l);
};

struct GenerationRecord {
  std::size_t n = 0;
  std::size_t count = 0;
  double total_length = 0.0;
  /// Length of the q-fold images before chopping.
  double mapped_length = 0.0;
  std::size_t cut_events = 0;
  double discarded_length = 0.0;
};

struct GrowthLog {
  std::vector<GenerationRecord> records;
};

struct CurveEngineOptions {
  Cone cone;
  double refine_step = 1e-3;
  double slope_tol = 1e-9;
  unsigned threads = 1;
};

/// Piece of a curve lying in one continuity piece.
struct CurvePiece {
  Polyline curve;
  PieceId piece = 1;
};

/// Cuts a polyline at its crossings with the singularity lines. Crossings are
/// located by bisection on the chord until the bracket is below the
/// geometric tolerance. Pieces shorter than the tolerance are dropped.
std::vector<CurvePiece> split_at_singularity(const MapSpec& spec, const Polyline& c);

/// One generation: refine, apply f q times splitting after every step, chop
/// the images greedily from their start into lengths in [l, 2l] and drop
/// shorter remnants. Throws ConeViolation if an output chord leaves the cone.
CurveFamily advance_family(const MapSpec& spec, const CurveFamily& fam, const CurveEngineOptions& opts,
                           GenerationRecord* record = nullptr);

/// Runs `generations` steps from `seed`; the log starts with the seed record.
CurveFamily run_family(const MapSpec& spec, CurveFamily seed, std::size_t generations, const CurveEngineOptions& opts,
                       GrowthLog* log = nullptr);

/// Least-squares slope of log N(n) against n over records with n >= burn_in.
/// Throws InsufficientData with fewer than three such records.
double growth_rate(const GrowthLog& log, std::size_t burn_in);

/// Number of distinct length-m forward itineraries among the points. Points
/// whose orbit meets the singularity set or leaves K are skipped.
std::size_t count_cylinders(const MapSpec& spec, std::span<const Point2> points, std::size_t m);

/// Diagonal growth of the r-step cocycle at p: Gram-Schmidt of Df^r applied to
/// the coordinate frame, as (log unstable factor, log stable factor).
/// nullopt if the orbit meets N or leaves K within r steps.
std::optional<std::pair<double, double>> log_expansion_factors(const MapSpec& spec, Point2 p, std::size_t r);

/// Keeps the curves whose midpoint factors lie within e^{(chi +- eps) r}.
/// Bounds are compared in log space with a relative rounding slack of 1e-12.
CurveFamily filter_by_expansion(const MapSpec& spec, const CurveFamily& fam, std::size_t r, double eps, double chi_u,
                                double chi_s);

enum class MultiplicityMode { ExactArrangement, GrowthProxy };

const char* to_string(MultiplicityMode mode);

struct MultiplicityRecord {
  std::size_t n = 0;
  std::size_t k_n = 0;
  /// Largest number of singularity preimage segments through one vertex.
  std::size_t max_concurrent = 0;
  std::size_t segments = 0;
};

struct MultiplicityEstimate {
  MultiplicityMode mode = MultiplicityMode::ExactArrangement;
  std::vector<MultiplicityRecord> records;
  /// log(k_n) / n at the largest n.
  double rate = 0.0;
};

/// Preimages f^{-i}(N), 0 <= i < n, as segments clipped to the pieces.
std::vector<Segment> singularity_preimages(const MapSpec& spec, std::size_t n);

/// k_1..k_n from the arrangement of the singularity preimages; k_n is the
/// largest number of faces meeting at an interior point. Affine maps only;
/// throws BudgetExceeded for n > n_max.
MultiplicityEstimate multiplicity_exact(const MapSpec& spec, std::size_t n, std::size_t n_max = 10);

/// Non-affine fallback: counts distinct n-step itineraries on small circles
/// centred on a grid along N. A lower bound for k_n.
MultiplicityEstimate multiplicity_proxy(const MapSpec& spec, std::size_t n, std::size_t centres = 64,
                                        std::size_t circle_samples = 720, double radius = 1e-6);

void write_growth_csv(std::ostream& os, const GrowthLog& log);
void write_multiplicity_csv(std::ostream& os, const MultiplicityEstimate& est);
/// One row per vertex: curve index, vertex index, x1, x2.
void write_family_csv(std::ostream& os, const CurveFamily& fam);

}  // namespace pwhyp
