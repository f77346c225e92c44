#pragma once

// Weighted planar point clouds standing in for a Radon measure, with a
// uniform-grid index for ball and rectangle queries.

#include "rectikernel/geometry.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rectikernel {

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  [[nodiscard]] double diagonal() const { return std::hypot(max_x - min_x, max_y - min_y); }
};

/// Immutable after construction; every query is read-only.
class DiscreteMeasure {
 public:
  /// Throws std::invalid_argument on empty input, length mismatch,
  /// non-positive weights or non-finite coordinates.
  DiscreteMeasure(std::vector<Point2> points, std::vector<double> weights);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] std::span<const Point2> points() const { return points_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] Point2 point(std::size_t i) const { return points_[i]; }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] double total_mass() const { return total_mass_; }
  [[nodiscard]] const BoundingBox& bbox() const { return bbox_; }
  [[nodiscard]] double cell_size() const { return cell_; }

  /// Indices of points in the closed ball, ascending.
  [[nodiscard]] std::vector<std::size_t> indices_in_ball(const Ball& b) const;

  /// Indices of points within Euclidean distance `margin` of the closed
  /// rectangle [x0,x1] x [y0,y1], ascending.
  [[nodiscard]] std::vector<std::size_t> indices_near_rect(double x0, double y0, double x1, double y1,
                                                           double margin) const;

  /// Restriction to a subset of indices (kept in the given order).
  [[nodiscard]] DiscreteMeasure subset(std::span<const std::size_t> indices) const;

  /// mu restricted to a closed ball; nullopt when the ball holds no point.
  [[nodiscard]] std::optional<DiscreteMeasure> restrict_to(const Ball& b) const;

  [[nodiscard]] Point2 centroid() const;

 private:
  template <typename Fn>
  void visit_cells(double x0, double y0, double x1, double y1, Fn&& fn) const;

  std::vector<Point2> points_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
  BoundingBox bbox_;

  double cell_ = 1.0;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::vector<std::size_t> cell_start_;  // CSR offsets, size nx*ny+1
  std::vector<std::size_t> cell_items_;  // point indices grouped by cell
};

/// Validating constructor with the operation's name.
[[nodiscard]] DiscreteMeasure build_measure(std::vector<Point2> points, std::vector<double> weights);

/// Sum of weights in the closed ball, accumulated in ascending index order.
[[nodiscard]] double mass_in_ball(const DiscreteMeasure& mu, const Ball& b);

/// Same value from a full linear scan; the reference for the index.
[[nodiscard]] double mass_in_ball_linear(const DiscreteMeasure& mu, const Ball& b);

/// mu(B(x,t)) / t.
[[nodiscard]] double density(const DiscreteMeasure& mu, const Ball& b);

/// max over support centers and probe radii of mu(B)/diam(B).
[[nodiscard]] double linear_growth_constant(const DiscreteMeasure& mu, std::span<const double> probe_scales);

/// Push-forward under x -> (x - anchor)/d with weights divided by d.
[[nodiscard]] DiscreteMeasure renormalize(const DiscreteMeasure& mu, double d, Point2 anchor);

struct ThreeBalls {
  std::array<Ball, 3> balls;
  std::array<double, 3> masses;
  double c1 = 0.0;        // radius divisor that succeeded
  double c1_prime = 0.0;  // mass divisor used
};

struct ThreeBallOptions {
  std::vector<double> c1_schedule{4, 8, 16, 32, 64, 128, 256, 512, 1024};
  /// Mass divisor; 0 means 2/delta.
  double c1_prime = 0.0;
};

/// Three balls of radius r/C1 centred at support points of B, pairwise
/// centre distance >= 12 r/C1, each of mass >= (r/C1)/C1'. Tries C1 along
/// the schedule and returns the first success.
[[nodiscard]] std::optional<ThreeBalls> three_ball_decomposition(const DiscreteMeasure& mu, const Ball& b,
                                                                 double delta,
                                                                 const ThreeBallOptions& options = {});

}  // namespace rectikernel
