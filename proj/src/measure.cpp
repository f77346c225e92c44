#include "rectikernel/measure.hpp"

#include "rectikernel/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rectikernel {

namespace {

constexpr double kMinCell = 1e-9;

std::size_t clamp_index(double v, std::size_t n) {
  if (!(v > 0.0)) return 0;
  if (v >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<std::size_t>(v);
}

double rect_distance2(Point2 p, double x0, double y0, double x1, double y1) {
  const double dx = p.x < x0 ? x0 - p.x : (p.x > x1 ? p.x - x1 : 0.0);
  const double dy = p.y < y0 ? y0 - p.y : (p.y > y1 ? p.y - y1 : 0.0);
  return dx * dx + dy * dy;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Point2> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw std::invalid_argument("measure: empty point set");
  if (points_.size() != weights_.size())
    throw std::invalid_argument("measure: points and weights differ in length");
  CompensatedSum mass;
  bbox_ = {points_[0].x, points_[0].y, points_[0].x, points_[0].y};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point2 p = points_[i];
    if (!p.finite()) throw std::invalid_argument("measure: non-finite coordinate");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw std::invalid_argument("measure: weights must be positive and finite");
    mass.add(weights_[i]);
    bbox_.min_x = std::min(bbox_.min_x, p.x);
    bbox_.min_y = std::min(bbox_.min_y, p.y);
    bbox_.max_x = std::max(bbox_.max_x, p.x);
    bbox_.max_y = std::max(bbox_.max_y, p.y);
  }
  total_mass_ = mass.value();

  const double per_side = std::ceil(std::sqrt(static_cast<double>(points_.size())));
  cell_ = std::max(bbox_.diagonal() / per_side, kMinCell);
  nx_ = static_cast<std::size_t>(std::floor((bbox_.max_x - bbox_.min_x) / cell_)) + 1;
  ny_ = static_cast<std::size_t>(std::floor((bbox_.max_y - bbox_.min_y) / cell_)) + 1;

  const std::size_t n_cells = nx_ * ny_;
  std::vector<std::size_t> cell_of(points_.size());
  cell_start_.assign(n_cells + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const std::size_t cx = clamp_index((points_[i].x - bbox_.min_x) / cell_, nx_);
    const std::size_t cy = clamp_index((points_[i].y - bbox_.min_y) / cell_, ny_);
    cell_of[i] = cy * nx_ + cx;
    ++cell_start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.resize(points_.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) cell_items_[fill[cell_of[i]]++] = i;
}

template <typename Fn>
void DiscreteMeasure::visit_cells(double x0, double y0, double x1, double y1, Fn&& fn) const {
  if (x1 < bbox_.min_x || x0 > bbox_.max_x || y1 < bbox_.min_y || y0 > bbox_.max_y) return;
  const std::size_t cx0 = clamp_index(std::floor((x0 - bbox_.min_x) / cell_), nx_);
  const std::size_t cx1 = clamp_index(std::floor((x1 - bbox_.min_x) / cell_), nx_);
  const std::size_t cy0 = clamp_index(std::floor((y0 - bbox_.min_y) / cell_), ny_);
  const std::size_t cy1 = clamp_index(std::floor((y1 - bbox_.min_y) / cell_), ny_);
  for (std::size_t cy = cy0; cy <= cy1; ++cy) {
    for (std::size_t cx = cx0; cx <= cx1; ++cx) {
      const std::size_t c = cy * nx_ + cx;
      for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) fn(cell_items_[k]);
    }
  }
}

std::vector<std::size_t> DiscreteMeasure::indices_in_ball(const Ball& b) const {
  std::vector<std::size_t> out;
  // Cells are clamped at the grid border, so points on the bbox edge are
  // always reachable even when floor() lands one past the last cell.
  visit_cells(b.center.x - b.radius, b.center.y - b.radius, b.center.x + b.radius,
              b.center.y + b.radius, [&](std::size_t i) {
                if (b.contains(points_[i])) out.push_back(i);
              });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> DiscreteMeasure::indices_near_rect(double x0, double y0, double x1, double y1,
                                                            double margin) const {
  std::vector<std::size_t> out;
  const double m2 = margin * margin;
  visit_cells(x0 - margin, y0 - margin, x1 + margin, y1 + margin, [&](std::size_t i) {
    if (rect_distance2(points_[i], x0, y0, x1, y1) <= m2) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

DiscreteMeasure DiscreteMeasure::subset(std::span<const std::size_t> indices) const {
  std::vector<Point2> pts;
  std::vector<double> ws;
  pts.reserve(indices.size());
  ws.reserve(indices.size());
  for (std::size_t i : indices) {
    pts.push_back(points_.at(i));
    ws.push_back(weights_.at(i));
  }
  return {std::move(pts), std::move(ws)};
}

std::optional<DiscreteMeasure> DiscreteMeasure::restrict_to(const Ball& b) const {
  const auto idx = indices_in_ball(b);
  if (idx.empty()) return std::nullopt;
  return subset(idx);
}

Point2 DiscreteMeasure::centroid() const {
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    sx.add(weights_[i] * points_[i].x);
    sy.add(weights_[i] * points_[i].y);
  }
  return {sx.value() / total_mass_, sy.value() / total_mass_};
}

DiscreteMeasure build_measure(std::vector<Point2> points, std::vector<double> weights) {
  return {std::move(points), std::move(weights)};
}

double mass_in_ball(const DiscreteMeasure& mu, const Ball& b) {
  CompensatedSum acc;
  for (std::size_t i : mu.indices_in_ball(b)) acc.add(mu.weight(i));
  return acc.value();
}

double mass_in_ball_linear(const DiscreteMeasure& mu, const Ball& b) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (b.contains(mu.point(i))) acc.add(mu.weight(i));
  }
  return acc.value();
}

double density(const DiscreteMeasure& mu, const Ball& b) {
  if (!(b.radius > 0.0)) throw std::invalid_argument("density: radius must be positive");
  return mass_in_ball(mu, b) / b.radius;
}

double linear_growth_constant(const DiscreteMeasure& mu, std::span<const double> probe_scales) {
  if (probe_scales.empty()) throw std::invalid_argument("linear_growth_constant: no probe scales");
  double best = 0.0;
  for (double r : probe_scales) {
    if (!(r > 0.0)) throw std::invalid_argument("linear_growth_constant: probe radius must be positive");
    for (std::size_t i = 0; i < mu.size(); ++i) {
      best = std::max(best, mass_in_ball(mu, {mu.point(i), r}) / (2.0 * r));
    }
  }
  return best;
}

DiscreteMeasure renormalize(const DiscreteMeasure& mu, double d, Point2 anchor) {
  if (!(d > 0.0)) throw std::invalid_argument("renormalize: diameter must be positive");
  std::vector<Point2> pts;
  std::vector<double> ws;
  pts.reserve(mu.size());
  ws.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point2 p = mu.point(i) - anchor;
    pts.push_back({p.x / d, p.y / d});
    ws.push_back(mu.weight(i) / d);
  }
  return {std::move(pts), std::move(ws)};
}

std::optional<ThreeBalls> three_ball_decomposition(const DiscreteMeasure& mu, const Ball& b, double delta,
                                                   const ThreeBallOptions& options) {
  if (!(b.radius > 0.0) || !(delta > 0.0)) return std::nullopt;
  if (density(mu, b) < delta) return std::nullopt;
  const double c1_prime = options.c1_prime > 0.0 ? options.c1_prime : 2.0 / delta;
  const auto centers = mu.indices_in_ball(b);

  for (double c1 : options.c1_schedule) {
    const double rho = b.radius / c1;
    const double min_mass = rho / c1_prime;
    const double sep2 = (12.0 * rho) * (12.0 * rho);

    struct Candidate {
      std::size_t index;
      double mass;
    };
    std::vector<Candidate> cands;
    for (std::size_t i : centers) {
      const double m = mass_in_ball(mu, {mu.point(i), rho});
      if (m >= min_mass) cands.push_back({i, m});
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& c) { return a.mass > c.mass; });

    std::vector<Candidate> chosen;
    for (const Candidate& c : cands) {
      const bool separated = std::all_of(chosen.begin(), chosen.end(), [&](const Candidate& o) {
        return norm2(mu.point(c.index) - mu.point(o.index)) >= sep2;
      });
      if (separated) chosen.push_back(c);
      if (chosen.size() == 3) break;
    }
    if (chosen.size() == 3) {
      ThreeBalls out;
      for (int k = 0; k < 3; ++k) {
        out.balls[k] = {mu.point(chosen[k].index), rho};
        out.masses[k] = chosen[k].mass;
      }
      out.c1 = c1;
      out.c1_prime = c1_prime;
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace rectikernel
