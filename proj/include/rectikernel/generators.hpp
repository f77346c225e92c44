#pragma once

// Synthetic measures: rectifiable stand-ins (segments, arcs, Lipschitz graphs,
// polylines) and the purely unrectifiable four-corner Cantor set.

#include "rectikernel/geometry.hpp"
#include "rectikernel/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rectikernel {

struct SegmentParams {
  Point2 a{0.0, 0.0};
  Point2 b{1.0, 0.0};
};

/// Graph of A(u) = sum_j c_j sin(2 pi f_j u + phi_j) over [u0, u1], with the
/// coefficients chosen so that sum_j |c_j| 2 pi f_j = amplitude * slope.
/// Phases come from the seed.
struct LipschitzGraphParams {
  double u0 = 0.0;
  double u1 = 1.0;
  double slope = 0.5;
  std::vector<double> frequencies{1.0, 2.0, 4.0};
  double amplitude = 1.0;  // fraction of the slope bound actually used, in (0, 1]
};

struct CircleArcParams {
  Point2 center{0.0, 0.0};
  double radius = 1.0;
  double angle0 = 0.0;
  double angle1 = 3.141592653589793;
};

/// Depth-d approximation of the four-corner Cantor set in [0,1]^2: the 4^d
/// kept squares of side 4^-d, one atom at each square's centre. When n_points
/// exceeds 4^d each centre is repeated n_points / 4^d times (rounded down).
struct CantorParams {
  int depth = 0;
};

struct PolylineParams {
  std::vector<Point2> vertices{{0.0, 0.0}, {1.0, 0.0}};
};

enum class WeightRule { Arclength, Uniform };

struct GeneratorSpec {
  std::variant<SegmentParams, LipschitzGraphParams, CircleArcParams, CantorParams, PolylineParams> variant;
  std::size_t n_points = 100;
  std::uint64_t seed = 0;
  WeightRule weight_rule = WeightRule::Arclength;
  /// Total mass; defaults to arclength (curves) or 1 (Cantor).
  std::optional<double> mass;
  /// Isotropic Gaussian perturbation of every point.
  double noise_sigma = 0.0;

  [[nodiscard]] std::string variant_name() const;
};

constexpr int kMaxCantorDepth = 12;

/// Deterministic given the spec. Throws std::invalid_argument on invalid specs.
[[nodiscard]] DiscreteMeasure generate(const GeneratorSpec& spec);

void validate(const GeneratorSpec& spec);

/// The generated Lipschitz function itself, for checks against samples.
[[nodiscard]] double lipschitz_graph_value(const LipschitzGraphParams& p, std::uint64_t seed, double u);

}  // namespace rectikernel
