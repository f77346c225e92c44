#include "rectikernel/generators.hpp"

#include "rectikernel/parallel.hpp"
#include "rectikernel/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rectikernel {

namespace {

struct Sample {
  std::vector<Point2> points;
  std::vector<double> lengths;  // arclength share carried by each point
};

double stratum(std::size_t i, std::size_t n) {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

Sample sample_segment(const SegmentParams& p, std::size_t n) {
  Sample s;
  const double len = distance(p.a, p.b);
  for (std::size_t i = 0; i < n; ++i) {
    s.points.push_back(p.a + stratum(i, n) * (p.b - p.a));
    s.lengths.push_back(len / static_cast<double>(n));
  }
  return s;
}

struct Harmonics {
  std::vector<double> coeffs;
  std::vector<double> phases;
};

Harmonics harmonics(const LipschitzGraphParams& p, std::uint64_t seed) {
  Harmonics h;
  Rng rng(seed ^ 0x5eedULL);
  const double m = static_cast<double>(p.frequencies.size());
  for (double f : p.frequencies) {
    h.coeffs.push_back(p.amplitude * p.slope / (m * 2.0 * std::numbers::pi * f));
    h.phases.push_back(2.0 * std::numbers::pi * rng.uniform());
  }
  return h;
}

double graph_value(const LipschitzGraphParams& p, const Harmonics& h, double u) {
  double a = 0.0;
  for (std::size_t j = 0; j < p.frequencies.size(); ++j)
    a += h.coeffs[j] * std::sin(2.0 * std::numbers::pi * p.frequencies[j] * u + h.phases[j]);
  return a;
}

double graph_slope(const LipschitzGraphParams& p, const Harmonics& h, double u) {
  double d = 0.0;
  for (std::size_t j = 0; j < p.frequencies.size(); ++j) {
    const double w = 2.0 * std::numbers::pi * p.frequencies[j];
    d += h.coeffs[j] * w * std::cos(w * u + h.phases[j]);
  }
  return d;
}

Sample sample_graph(const LipschitzGraphParams& p, std::uint64_t seed, std::size_t n) {
  const Harmonics h = harmonics(p, seed);
  Sample s;
  const double du = (p.u1 - p.u0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = p.u0 + stratum(i, n) * (p.u1 - p.u0);
    s.points.push_back({u, graph_value(p, h, u)});
    const double d = graph_slope(p, h, u);
    s.lengths.push_back(std::sqrt(1.0 + d * d) * du);
  }
  // The analytic bound already holds; rounding could still push a chord a
  // few ulps over, so shrink ordinates until every chord respects it.
  for (int pass = 0; pass < 8; ++pass) {
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double dx = s.points[i].x - s.points[i - 1].x;
      worst = std::max(worst, std::abs(s.points[i].y - s.points[i - 1].y) / dx);
    }
    if (worst <= p.slope) break;
    const double shrink = p.slope / worst * (1.0 - 1e-12);
    for (auto& q : s.points) q.y *= shrink;
  }
  return s;
}

Sample sample_arc(const CircleArcParams& p, std::size_t n) {
  Sample s;
  const double span = p.angle1 - p.angle0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = p.angle0 + stratum(i, n) * span;
    s.points.push_back({p.center.x + p.radius * std::cos(a), p.center.y + p.radius * std::sin(a)});
    s.lengths.push_back(std::abs(span) * p.radius / static_cast<double>(n));
  }
  return s;
}

Sample sample_polyline(const PolylineParams& p, std::size_t n) {
  std::vector<double> cum{0.0};
  for (std::size_t k = 1; k < p.vertices.size(); ++k)
    cum.push_back(cum.back() + distance(p.vertices[k - 1], p.vertices[k]));
  const double total = cum.back();
  Sample s;
  std::size_t seg = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = stratum(i, n) * total;
    while (seg + 1 < cum.size() && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double f = len > 0.0 ? (target - cum[seg - 1]) / len : 0.0;
    s.points.push_back(p.vertices[seg - 1] + f * (p.vertices[seg] - p.vertices[seg - 1]));
    s.lengths.push_back(total / static_cast<double>(n));
  }
  return s;
}

Sample sample_cantor(const CantorParams& p, std::size_t n) {
  std::vector<Point2> corners{{0.0, 0.0}};
  double side = 1.0;
  for (int level = 0; level < p.depth; ++level) {
    std::vector<Point2> next;
    next.reserve(corners.size() * 4);
    const double shift = 0.75 * side;
    for (const Point2 c : corners) {
      next.push_back(c);
      next.push_back({c.x + shift, c.y});
      next.push_back({c.x, c.y + shift});
      next.push_back({c.x + shift, c.y + shift});
    }
    corners = std::move(next);
    side *= 0.25;
  }
  // n / 4^d coincident copies of each centre keep N matched across depths
  // while every square still carries mass 4^-d.
  const std::size_t copies = std::max<std::size_t>(1, n / corners.size());
  Sample s;
  for (const Point2 c : corners) {
    for (std::size_t k = 0; k < copies; ++k) {
      s.points.push_back({c.x + 0.5 * side, c.y + 0.5 * side});
      s.lengths.push_back(1.0);
    }
  }
  return s;
}

}  // namespace

std::string GeneratorSpec::variant_name() const {
  switch (variant.index()) {
    case 0: return "segment";
    case 1: return "lipschitz_graph";
    case 2: return "circle_arc";
    case 3: return "cantor_four_corner";
    default: return "ad_regular_curve";
  }
}

void validate(const GeneratorSpec& spec) {
  if (spec.n_points < 1) throw std::invalid_argument("generator: n_points must be >= 1");
  if (spec.mass && !(*spec.mass > 0.0)) throw std::invalid_argument("generator: mass must be positive");
  if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("generator: noise_sigma must be >= 0");
  if (const auto* s = std::get_if<SegmentParams>(&spec.variant)) {
    if (s->a == s->b) throw std::invalid_argument("generator: degenerate segment");
  } else if (const auto* g = std::get_if<LipschitzGraphParams>(&spec.variant)) {
    if (!(g->slope >= 0.0)) throw std::invalid_argument("generator: slope bound must be >= 0");
    if (!(g->u1 > g->u0)) throw std::invalid_argument("generator: empty graph domain");
    if (!(g->amplitude > 0.0 && g->amplitude <= 1.0))
      throw std::invalid_argument("generator: amplitude must lie in (0, 1]");
    if (g->frequencies.empty()) throw std::invalid_argument("generator: no frequencies");
    for (double f : g->frequencies)
      if (!(f > 0.0)) throw std::invalid_argument("generator: frequencies must be positive");
  } else if (const auto* a = std::get_if<CircleArcParams>(&spec.variant)) {
    if (!(a->radius > 0.0)) throw std::invalid_argument("generator: arc radius must be positive");
    if (a->angle0 == a->angle1) throw std::invalid_argument("generator: empty arc");
  } else if (const auto* c = std::get_if<CantorParams>(&spec.variant)) {
    if (c->depth < 0) throw std::invalid_argument("generator: depth must be >= 0");
    if (c->depth > kMaxCantorDepth) throw std::invalid_argument("generator: depth above 12");
  } else if (const auto* p = std::get_if<PolylineParams>(&spec.variant)) {
    if (p->vertices.size() < 2) throw std::invalid_argument("generator: polyline needs two vertices");
    double len = 0.0;
    for (std::size_t k = 1; k < p->vertices.size(); ++k) len += distance(p->vertices[k - 1], p->vertices[k]);
    if (!(len > 0.0)) throw std::invalid_argument("generator: polyline has zero length");
  }
}

double lipschitz_graph_value(const LipschitzGraphParams& p, std::uint64_t seed, double u) {
  return graph_value(p, harmonics(p, seed), u);
}

DiscreteMeasure generate(const GeneratorSpec& spec) {
  validate(spec);
  Sample s;
  bool cantor = false;
  std::visit(
      [&](const auto& params) {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, SegmentParams>) {
          s = sample_segment(params, spec.n_points);
        } else if constexpr (std::is_same_v<T, LipschitzGraphParams>) {
          s = sample_graph(params, spec.seed, spec.n_points);
        } else if constexpr (std::is_same_v<T, CircleArcParams>) {
          s = sample_arc(params, spec.n_points);
        } else if constexpr (std::is_same_v<T, CantorParams>) {
          s = sample_cantor(params, spec.n_points);
          cantor = true;
        } else {
          s = sample_polyline(params, spec.n_points);
        }
      },
      spec.variant);

  const std::size_t n = s.points.size();
  const double arclength = compensated_sum(s.lengths);
  const double total = spec.mass.value_or(cantor ? 1.0 : arclength);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = (spec.weight_rule == WeightRule::Arclength && !cantor)
                     ? total * (s.lengths[i] / arclength)
                     : total / static_cast<double>(n);
  }
  if (spec.noise_sigma > 0.0) {
    Rng rng(spec.seed ^ 0x9015eULL);
    for (auto& q : s.points) {
      q.x += spec.noise_sigma * rng.normal();
      q.y += spec.noise_sigma * rng.normal();
    }
  }
  return {std::move(s.points), std::move(weights)};
}

}  // namespace rectikernel
