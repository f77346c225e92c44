#include "rectikernel/multiscale.hpp"

#include "rectikernel/io.hpp"
#include "rectikernel/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace rectikernel {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double mass_of(const DiscreteMeasure& mu, std::span<const std::size_t> idx) {
  CompensatedSum s;
  for (std::size_t i : idx) s.add(mu.weight(i));
  return s.value();
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamsLedger

ParamsLedger ParamsLedger::desk() { return ParamsLedger{}; }

ParamsLedger ParamsLedger::paper_faithful() {
  ParamsLedger p;
  p.profile = "paper-faithful";
  p.theta0 = kPi / 1e6;
  p.besicovitch_n = 19;
  p.delta = 1e-10 / p.besicovitch_n;
  p.alpha_small = p.theta0 / 10.0;
  p.alpha_big = 10.0 * p.theta0;
  // eps^(1/50) < alpha_small would need eps below 1e-326.
  p.eps = std::numeric_limits<double>::denorm_min();
  p.tau = 1e4 * 1024.0;
  return p;
}

ParamsLedger ParamsLedger::from_name(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper-faithful") return paper_faithful();
  throw std::invalid_argument("unknown parameter profile '" + name + "'");
}

double ParamsLedger::alpha_for(const Line& reference) const {
  return angle_to_vertical(reference) > theta0 ? alpha_small : alpha_big;
}

void ParamsLedger::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) throw std::invalid_argument(std::string("params: ") + name + " must be > 0");
  };
  positive(delta, "delta");
  positive(eps, "eps");
  positive(theta0, "theta0");
  positive(alpha_small, "alpha_small");
  positive(alpha_big, "alpha_big");
  positive(eta_budget, "eta_budget");
  positive(c_lipschitz, "c_lipschitz");
  for (double c : c_slots) positive(c, "c_slots");
  if (!(tau >= 1.0)) throw std::invalid_argument("params: tau must be >= 1");
  if (!(k_dilate > 1.0)) throw std::invalid_argument("params: k_dilate must be > 1");
  if (besicovitch_n < 1) throw std::invalid_argument("params: besicovitch_n must be >= 1");
  if (alpha_small > kPi / 2.0 || alpha_big > kPi) throw std::invalid_argument("params: alpha out of range");
}

std::vector<std::string> ParamsLedger::violated_relations() const {
  std::vector<std::string> out;
  if (profile != "paper-faithful") return out;
  const double alpha_min = std::min(alpha_small, alpha_big);
  // Compare in log space; eps^(1/50) itself is representable.
  if (!(std::log(eps) / 50.0 < std::log(alpha_min)))
    out.emplace_back("eps^(1/50) < alpha: unsatisfiable in double precision (eps = " + format_double(eps) + ")");
  if (!(std::max(alpha_small, alpha_big) < kPi / 1e4)) out.emplace_back("alpha < pi/1e4");
  if (!(delta <= 1e-10 / besicovitch_n * (1 + 1e-12))) out.emplace_back("delta <= 1e-10 / N");
  return out;
}

json ParamsLedger::to_json() const {
  return {{"profile", profile},     {"delta", delta},
          {"eps", eps},             {"theta0", theta0},
          {"alpha_small", alpha_small}, {"alpha_big", alpha_big},
          {"tau", tau},             {"k_dilate", k_dilate},
          {"eta_budget", eta_budget}, {"besicovitch_n", besicovitch_n},
          {"c_slots", c_slots},     {"c_lipschitz", c_lipschitz}};
}

// ---------------------------------------------------------------------------
// Cube lattice

std::vector<double> CubeLattice::scales() const {
  std::vector<double> out;
  for (int j = j_min; j <= j_max; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

std::vector<std::size_t> dilated_cube_members(const CubeLattice& lattice, const Cube& q, double a) {
  if (!(a >= 1.0)) throw std::invalid_argument("dilated_cube_members: a must be >= 1");
  const double l = q.side;
  const double x0 = lattice.offset.x + l * static_cast<double>(q.gx);
  const double y0 = lattice.offset.y + l * static_cast<double>(q.gy);
  return lattice.measure->indices_near_rect(x0, y0, x0 + l, y0 + l, (a - 1.0) * l);
}

CubeBeta cube_beta1(const CubeLattice& lattice, const Cube& q) {
  const DiscreteMeasure& mu = *lattice.measure;
  const auto idx = dilated_cube_members(lattice, q, 3.0);
  CubeBeta out;
  out.line = total_least_squares_line(mu, idx);
  CompensatedSum s;
  for (std::size_t i : idx) s.add(out.line.distance(mu.point(i)) / q.side * mu.weight(i));
  out.beta1 = s.value() / q.side;
  return out;
}

CubeLattice build_cubes(const DiscreteMeasure& mu, int j_min, int j_max, std::uint64_t offset_seed, double k_3q) {
  if (j_max < j_min) throw std::invalid_argument("build_cubes: j_max < j_min");
  if (j_max - j_min > kMaxGenerationSpan) throw std::invalid_argument("build_cubes: generation span exceeds 40");
  if (k_3q != 3.0) throw std::invalid_argument("build_cubes: only 3Q dilation is supported");

  CubeLattice lat;
  lat.measure = std::make_shared<const DiscreteMeasure>(mu);
  lat.j_min = j_min;
  lat.j_max = j_max;
  if (offset_seed != 0) {
    const double top = std::ldexp(1.0, -j_min);
    lat.offset = {top * unit_from_bits(splitmix64(offset_seed)), top * unit_from_bits(splitmix64(offset_seed + 1))};
  }

  // Finest-generation integer coordinates; coarser ones by arithmetic shift,
  // so nesting holds exactly.
  const std::size_t n = mu.size();
  std::vector<std::int64_t> fx(n);
  std::vector<std::int64_t> fy(n);
  constexpr double kLimit = 0x1.0p62;
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = std::floor(std::ldexp(mu.point(i).x - lat.offset.x, j_max));
    const double uy = std::floor(std::ldexp(mu.point(i).y - lat.offset.y, j_max));
    if (!(std::abs(ux) < kLimit && std::abs(uy) < kLimit))
      throw std::invalid_argument("build_cubes: coordinates too large for the finest generation");
    fx[i] = static_cast<std::int64_t>(ux);
    fy[i] = static_cast<std::int64_t>(uy);
  }

  struct Key {
    std::int64_t gx;
    std::int64_t gy;
    std::size_t index;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, int> previous;
  for (int j = j_min; j <= j_max; ++j) {
    const int shift = j_max - j;
    std::vector<Key> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = {fx[i] >> shift, fy[i] >> shift, i};
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
      return std::tie(a.gx, a.gy, a.index) < std::tie(b.gx, b.gy, b.index);
    });
    std::vector<int> ids;
    std::map<std::pair<std::int64_t, std::int64_t>, int> current;
    for (std::size_t s = 0; s < n;) {
      Cube q;
      q.generation = j;
      q.gx = keys[s].gx;
      q.gy = keys[s].gy;
      q.side = std::ldexp(1.0, -j);
      std::size_t e = s;
      while (e < n && keys[e].gx == q.gx && keys[e].gy == q.gy) q.members.push_back(keys[e++].index);
      q.mass = mass_of(mu, q.members);
      const int id = static_cast<int>(lat.cubes.size());
      if (j > j_min) {
        const int parent = previous.at({q.gx >> 1, q.gy >> 1});
        q.parent = parent;
        lat.cubes[parent].children.push_back(id);
      }
      current[{q.gx, q.gy}] = id;
      ids.push_back(id);
      lat.cubes.push_back(std::move(q));
      s = e;
    }
    lat.by_generation.push_back(std::move(ids));
    previous = std::move(current);
  }

  const std::size_t m = lat.cubes.size();
  const std::size_t block = 64;
  parallel_for_blocks((m + block - 1) / block, [&](std::size_t b) {
    for (std::size_t c = b * block; c < std::min(m, (b + 1) * block); ++c) {
      const CubeBeta cb = cube_beta1(lat, lat.cubes[c]);
      lat.cubes[c].beta1 = cb.beta1;
      lat.cubes[c].line = cb.line;
    }
  });
  return lat;
}

double weak_geometric_packing(const CubeLattice& lattice, double eps, int root) {
  const Cube& r = lattice.cubes.at(static_cast<std::size_t>(root));
  CompensatedSum s;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const Cube& q = lattice.cubes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (q.beta1 >= eps) s.add(q.mass);
    for (int c : q.children) stack.push_back(c);
  }
  return s.value() / r.mass;
}

// ---------------------------------------------------------------------------
// Stopping-time region

bool StoppingTime::in_s_total(std::size_t point, std::size_t scale, const ParamsLedger& p) const {
  const std::size_t at = point * scales.size() + scale;
  return density[at] >= p.delta / 2.0 && beta1[at] < 2.0 * p.eps && angle[at] <= alpha;
}

namespace {

StoppingTime stopping_time_impl(const DiscreteMeasure& mu, Point2 x0, const Line& d0, const ParamsLedger& params,
                                std::vector<double> scales) {
  params.validate();
  if (density(mu, Ball{x0, 1.0}) < params.delta / 2.0)
    throw std::invalid_argument("stopping_time_region: top ball density below delta/2");

  StoppingTime st;
  st.d0 = d0;
  st.alpha = params.alpha_for(d0);
  std::erase_if(scales, [](double t) { return !(t < 5.0); });
  std::sort(scales.begin(), scales.end(), std::greater<>());
  if (scales.empty()) throw std::invalid_argument("stopping_time_region: no scale below 5");
  st.scales = scales;

  const std::size_t n = mu.size();
  const std::size_t ns = scales.size();
  st.density.assign(n * ns, 0.0);
  st.beta1.assign(n * ns, 0.0);
  st.angle.assign(n * ns, 0.0);
  const std::size_t block = 16;
  parallel_for_blocks((n + block - 1) / block, [&](std::size_t b) {
    for (std::size_t i = b * block; i < std::min(n, (b + 1) * block); ++i) {
      for (std::size_t s = 0; s < ns; ++s) {
        const Ball ball{mu.point(i), scales[s]};
        const BestLine bl = best_line(mu, ball, params.k_dilate);
        st.density[i * ns + s] = density(mu, ball);
        st.beta1[i * ns + s] = bl.beta1;
        st.angle[i * ns + s] = angle_between(bl.line, d0);
      }
    }
  });

  // h(x) = sup of 4s over bad (y, s) with |x - y| <= s/3.
  st.h.assign(n, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t y = 0; y < n; ++y) {
      if (st.in_s_total(y, s, params)) continue;
      for (std::size_t x : mu.indices_in_ball(Ball{mu.point(y), scales[s] / 3.0}))
        st.h[x] = std::max(st.h[x], 4.0 * scales[s]);
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < ns; ++s)
      if (st.in_s_total(i, s, params) && scales[s] >= st.h[i]) st.s.push_back({i, mu.point(i), scales[s]});

  // First match over every witness (y, s) with s in [h/5, h/2] and |x - y| <= s/2.
  st.region.assign(n, Region::Z);
  for (std::size_t x = 0; x < n; ++x) {
    if (st.h[x] == 0.0) continue;
    bool f1 = false;
    bool f2 = false;
    bool f3 = false;
    for (std::size_t s = 0; s < ns; ++s) {
      if (scales[s] < st.h[x] / 5.0 || scales[s] > st.h[x] / 2.0) continue;
      for (std::size_t y : mu.indices_in_ball(Ball{mu.point(x), scales[s] / 2.0})) {
        const std::size_t at = y * ns + s;
        f1 = f1 || st.density[at] <= params.delta;
        f2 = f2 || st.beta1[at] >= params.eps;
        f3 = f3 || st.angle[at] >= 0.75 * st.alpha;
      }
    }
    if (f1) {
      st.region[x] = Region::F1;
    } else if (f2) {
      st.region[x] = Region::F2;
    } else if (f3) {
      st.region[x] = Region::F3;
    } else {
      throw std::logic_error("stopping_time_region: point with h > 0 has no witness");
    }
  }
  std::array<CompensatedSum, 4> masses;
  for (std::size_t i = 0; i < n; ++i) masses[static_cast<std::size_t>(st.region[i])].add(mu.weight(i));
  for (std::size_t r = 0; r < 4; ++r) st.region_mass[r] = masses[r].value();
  return st;
}

}  // namespace

StoppingTime stopping_time_region(const DiscreteMeasure& mu, Point2 x0, const Line& d0, const ParamsLedger& params,
                                  const CubeLattice& lattice) {
  return stopping_time_impl(mu, x0, d0, params, lattice.scales());
}

double d_function(Point2 x, std::span<const ScaleBall> s) {
  double best = std::numeric_limits<double>::infinity();
  for (const ScaleBall& b : s) best = std::min(best, distance(x, b.center) + b.radius);
  return best;
}

double D_function(double p, std::span<const ScaleBall> s, const Line& d0) {
  double best = std::numeric_limits<double>::infinity();
  for (const ScaleBall& b : s) best = std::min(best, std::abs(d0.abscissa(b.center) - p) + b.radius);
  return best;
}

// ---------------------------------------------------------------------------
// Graphs

double GraphFunction::value(double u) const {
  if (abscissae.empty()) throw std::logic_error("GraphFunction: no samples");
  if (u <= abscissae.front()) return ordinates.front();
  if (u >= abscissae.back()) return ordinates.back();
  const auto it = std::upper_bound(abscissae.begin(), abscissae.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - abscissae.begin());
  const double u0 = abscissae[k - 1];
  const double u1 = abscissae[k];
  const double s = (u - u0) / (u1 - u0);
  return ordinates[k - 1] + s * (ordinates[k] - ordinates[k - 1]);
}

GraphFunction build_graph_function(const DiscreteMeasure& mu, std::span<const std::size_t> indices, const Line& base,
                                   double slope_bound) {
  if (indices.empty()) throw std::invalid_argument("build_graph_function: no points");
  std::vector<std::pair<double, double>> samples;
  samples.reserve(indices.size());
  for (std::size_t i : indices) samples.emplace_back(base.abscissa(mu.point(i)), base.signed_distance(mu.point(i)));
  std::sort(samples.begin(), samples.end());

  GraphFunction g;
  g.base = base;
  g.slope_bound = slope_bound;
  for (const auto& [u, a] : samples) {
    if (!g.abscissae.empty() && u == g.abscissae.back()) {
      if (std::abs(a - g.ordinates.back()) > 1e-12 * std::max(1.0, std::abs(a)))
        throw std::domain_error("build_graph_function: two points share an abscissa");
      continue;
    }
    g.abscissae.push_back(u);
    g.ordinates.push_back(a);
  }
  for (std::size_t k = 1; k < g.abscissae.size(); ++k)
    g.lipschitz_estimate = std::max(g.lipschitz_estimate, std::abs(g.ordinates[k] - g.ordinates[k - 1]) /
                                                              (g.abscissae[k] - g.abscissae[k - 1]));
  g.accepted = g.lipschitz_estimate <= slope_bound;
  return g;
}

GraphFunction build_graph_function(const DiscreteMeasure& mu, const StoppingTime& st, const ParamsLedger& params) {
  std::vector<std::size_t> z;
  for (std::size_t i = 0; i < st.region.size(); ++i)
    if (st.region[i] == Region::Z) z.push_back(i);
  return build_graph_function(mu, z, st.d0, params.c_lipschitz * st.alpha);
}

double gamma_affine(const GraphFunction& graph, double p, double t, int refine_iterations) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("gamma_affine: t must be > 0");
  if (refine_iterations < 0) throw std::invalid_argument("gamma_affine: negative iteration count");
  constexpr int kCells = 512;
  const double h = 2.0 * t / kCells;
  std::vector<double> u(kCells);
  std::vector<double> a(kCells);
  for (int k = 0; k < kCells; ++k) {
    u[k] = (k + 0.5) * h - t;  // relative to p
    a[k] = graph.value(p + u[k]);
  }

  const auto fit = [&](std::span<const double> w) {
    double sw = 0, su = 0, sa = 0, suu = 0, sua = 0;
    for (int k = 0; k < kCells; ++k) {
      sw += w[k];
      su += w[k] * u[k];
      sa += w[k] * a[k];
      suu += w[k] * u[k] * u[k];
      sua += w[k] * u[k] * a[k];
    }
    const double det = sw * suu - su * su;
    const double slope = det > 0.0 ? (sw * sua - su * sa) / det : 0.0;
    return std::pair{(sa - slope * su) / sw, slope};
  };
  const auto l1 = [&](std::pair<double, double> c) {
    CompensatedSum s;
    for (int k = 0; k < kCells; ++k) s.add(std::abs(a[k] - c.first - c.second * u[k]));
    return s.value() * h / (t * t);
  };

  std::vector<double> w(kCells, 1.0);
  auto coef = fit(w);
  double best = l1(coef);
  for (int it = 0; it < refine_iterations; ++it) {
    for (int k = 0; k < kCells; ++k) w[k] = 1.0 / std::max(std::abs(a[k] - coef.first - coef.second * u[k]), 1e-12 * t);
    coef = fit(w);
    best = std::min(best, l1(coef));
  }
  return best;
}

JoinedGraph vertical_case_graph(const DiscreteMeasure& mu, const StoppingTime& st, const ParamsLedger& params,
                                const CubeLattice& lattice) {
  struct Candidate {
    Ball ball;
    std::size_t point;
  };
  std::vector<Candidate> candidates;
  const double reach = 2.0 * mu.bbox().diagonal() + 1.0;
  for (std::size_t i = 0; i < st.region.size(); ++i) {
    if (st.region[i] != Region::F3) continue;
    double r = st.h[i];
    // Smallest 100^m h(x) with mu(100 B) <= 200 mu(B); once B holds everything it holds trivially.
    while (mass_in_ball(mu, Ball{mu.point(i), 100.0 * r}) > 200.0 * mass_in_ball(mu, Ball{mu.point(i), r}) &&
           r < reach)
      r *= 100.0;
    candidates.push_back({Ball{mu.point(i), r}, i});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.ball.radius != b.ball.radius ? a.ball.radius > b.ball.radius : a.point < b.point;
  });

  JoinedGraph out;
  for (const Candidate& c : candidates) {
    const bool disjoint = std::all_of(out.balls.begin(), out.balls.end(), [&](const Ball& b) {
      return distance(b.center, c.ball.center) > 20.0 * (b.radius + c.ball.radius);
    });
    if (disjoint) out.balls.push_back(c.ball);
  }

  std::vector<std::size_t> joined;
  for (std::size_t i = 0; i < st.region.size(); ++i)
    if (st.region[i] == Region::Z) joined.push_back(i);

  for (const Ball& b : out.balls) {
    const auto idx = mu.indices_in_ball(b);
    const Line local = total_least_squares_line(mu, idx);
    const DiscreteMeasure rescaled = renormalize(mu.subset(idx), b.radius, b.center);
    const Line local_rescaled((1.0 / b.radius) * (local.anchor - b.center), local.theta);
    StoppingTime piece;
    try {
      piece = stopping_time_impl(rescaled, {0.0, 0.0}, local_rescaled, params, lattice.scales());
    } catch (const std::invalid_argument&) {
      continue;  // ball too sparse at its own top scale
    }
    std::vector<std::size_t> z;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (piece.region[k] == Region::Z) z.push_back(idx[k]);
    if (z.empty()) continue;
    out.pieces.push_back(build_graph_function(mu, z, local, params.c_lipschitz * piece.alpha));
    joined.insert(joined.end(), z.begin(), z.end());
  }
  std::sort(joined.begin(), joined.end());
  joined.erase(std::unique(joined.begin(), joined.end()), joined.end());
  if (joined.empty()) throw std::invalid_argument("vertical_case_graph: no graph points");
  out.joined = build_graph_function(mu, joined, st.d0, params.c_lipschitz * st.alpha);
  return out;
}

// ---------------------------------------------------------------------------
// Corona decomposition

std::string to_string(TreeType t) {
  switch (t) {
    case TreeType::I: return "I";
    case TreeType::II: return "II";
    case TreeType::III: return "III";
    case TreeType::IV: return "IV";
  }
  return "?";
}

Corona corona_decompose(const CubeLattice& lattice, const ParamsLedger& params) {
  params.validate();
  const auto& cubes = lattice.cubes;
  Corona out;
  out.bad.resize(cubes.size());
  out.tree_of.assign(cubes.size(), -1);
  for (std::size_t c = 0; c < cubes.size(); ++c) out.bad[c] = cubes[c].beta1 > params.eps;

  for (int j = lattice.j_min; j <= lattice.j_max; ++j) {
    for (int root : lattice.generation(j)) {
      if (out.bad[root] || out.tree_of[root] >= 0) continue;
      Tree tree;
      tree.root = root;
      const Line& root_line = cubes[root].line;
      tree.alpha = params.alpha_for(root_line);
      const int tree_id = static_cast<int>(out.trees.size());
      std::vector<int> queue{root};
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int q = queue[head];
        tree.members.push_back(q);
        out.tree_of[q] = tree_id;
        const Cube& cube = cubes[q];
        if (cube.children.empty()) continue;
        if (q != root && angle_between(cube.line, root_line) >= tree.alpha / 2.0) {
          tree.stop_alpha.push_back(q);
        } else if (std::any_of(cube.children.begin(), cube.children.end(), [&](int c) { return out.bad[c]; })) {
          tree.stop_beta.push_back(q);
        } else if (std::any_of(cube.children.begin(), cube.children.end(), [&](int c) {
                     return angle_between(cubes[c].line, root_line) > tree.alpha;
                   })) {
          tree.stop_jump.push_back(q);
        } else {
          queue.insert(queue.end(), cube.children.begin(), cube.children.end());
        }
      }
      out.trees.push_back(std::move(tree));
    }
  }
  return out;
}

TreeSummary classify_trees(Corona& corona, const CubeLattice& lattice, const ParamsLedger& params) {
  const auto& cubes = lattice.cubes;
  const double total = lattice.measure->total_mass();
  const auto mass = [&](const std::vector<int>& ids) {
    CompensatedSum s;
    for (int id : ids) s.add(cubes[id].mass);
    return s.value();
  };
  TreeSummary summary;
  for (Tree& tree : corona.trees) {
    const Cube& root = cubes[tree.root];
    const double m_beta = mass(tree.stop_beta);
    const double m_alpha = mass(tree.stop_alpha) + mass(tree.stop_jump);
    const double unstopped = root.mass - m_beta - m_alpha;
    if (unstopped >= 0.5 * root.mass) {
      tree.type = TreeType::I;
    } else if (m_beta >= 0.25 * root.mass) {
      tree.type = TreeType::II;
    } else if (m_alpha >= 0.25 * root.mass && angle_to_vertical(root.line) > params.theta0) {
      tree.type = TreeType::III;
    } else {
      tree.type = TreeType::IV;
    }
    const auto t = static_cast<std::size_t>(tree.type);
    ++summary.count[t];
    summary.packing[t] += root.mass / total;

    // Graph over the root line through centroids of the minimal cubes.
    std::vector<Point2> pts;
    std::vector<double> ws;
    for (int q : tree.members) {
      const bool minimal = std::none_of(cubes[q].children.begin(), cubes[q].children.end(),
                                        [&](int c) { return corona.tree_of[c] == corona.tree_of[tree.root]; });
      if (!minimal) continue;
      CompensatedSum sx;
      CompensatedSum sy;
      for (std::size_t i : cubes[q].members) {
        sx.add(lattice.measure->weight(i) * lattice.measure->point(i).x);
        sy.add(lattice.measure->weight(i) * lattice.measure->point(i).y);
      }
      pts.push_back({sx.value() / cubes[q].mass, sy.value() / cubes[q].mass});
      ws.push_back(cubes[q].mass);
    }
    try {
      const DiscreteMeasure centroids(std::move(pts), std::move(ws));
      std::vector<std::size_t> all(centroids.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      tree.graph = build_graph_function(centroids, all, root.line, params.c_lipschitz * tree.alpha);
    } catch (const std::domain_error&) {
      tree.graph.reset();
    }
  }
  return summary;
}

double tree_p_sum(const KernelId& k, const CubeLattice& lattice, int cube, double c_band) {
  if (!(c_band >= 1.0)) throw std::invalid_argument("tree_p_sum: band constant must be >= 1");
  const DiscreteMeasure& mu = *lattice.measure;
  const Cube& q = lattice.cubes.at(static_cast<std::size_t>(cube));
  const auto xs = dilated_cube_members(lattice, q, 3.0);
  const double lo = q.side / c_band;
  const double hi = q.side * c_band;
  return parallel_block_sum(xs.size(), [&](std::size_t b) {
    const std::size_t x = xs[b];
    CompensatedSum s;
    for (std::size_t y : mu.indices_in_ball(Ball{mu.point(x), hi})) {
      const double d = distance(mu.point(x), mu.point(y));
      if (d < lo) continue;
      s.add(mu.weight(x) * mu.weight(y) * pair_permutation(k, mu, mu.point(x), mu.point(y)));
    }
    return s.value();
  });
}

double corona_coverage(const CubeLattice& lattice, const Corona& corona, int top_generations) {
  CompensatedSum covered;
  for (int id : lattice.generation(lattice.j_max)) {
    const int t = corona.tree_of[id];
    if (t < 0) continue;
    if (lattice.cubes[corona.trees[t].root].generation < lattice.j_min + top_generations)
      covered.add(lattice.cubes[id].mass);
  }
  return covered.value() / lattice.measure->total_mass();
}

// ---------------------------------------------------------------------------
// Report

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GraphLike: return "graph-like";
    case Verdict::Mixed: return "mixed";
    case Verdict::DustLike: return "dust-like";
  }
  return "?";
}

DiscreteMeasure normalize_measure(const DiscreteMeasure& mu) {
  const BoundingBox& bb = mu.bbox();
  const double diag = bb.diagonal();
  if (!(diag > 0.0)) throw std::invalid_argument("normalize_measure: support is a single point");
  std::vector<Point2> pts(mu.size());
  std::vector<double> ws(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    pts[i] = (1.0 / diag) * (mu.point(i) - Point2{bb.min_x, bb.min_y});
    ws[i] = mu.weight(i) / mu.total_mass();
  }
  return build_measure(std::move(pts), std::move(ws));
}

RectifiabilityReport rectifiability_report(const DiscreteMeasure& mu, const ParamsLedger& params,
                                           const ReportOptions& options) {
  params.validate();
  const DiscreteMeasure nu = normalize_measure(mu);
  RectifiabilityReport r;
  r.n_points = nu.size();
  r.thresholds = options.thresholds;
  r.j_min = options.j_min;
  if (options.j_max) {
    r.j_max = *options.j_max;
  } else {
    const int guess = static_cast<int>(std::floor(std::log2(static_cast<double>(nu.size()) / 16.0)));
    r.j_max = std::clamp(guess, r.j_min + 2, r.j_min + 12);
  }

  if (options.triple_sums) {
    const bool exact = nu.size() <= options.exact_cap;
    for (int n : options.kernels) {
      const KernelId k = KernelId::coordinate_power(n);
      r.p_normalized.emplace_back(
          n, exact ? triple_sum(k, nu) : triple_sum_montecarlo(k, nu, {}, options.mc_samples, options.seed));
    }
    r.c2_normalized = exact ? curvature_triple_sum(nu) : curvature_triple_sum_montecarlo(nu, {}, options.mc_samples,
                                                                                         options.seed);
  }

  const CubeLattice lattice = build_cubes(nu, r.j_min, r.j_max, options.offset_seed);
  CompensatedSum packed;
  for (const Cube& q : lattice.cubes)
    if (q.beta1 >= params.eps) packed.add(q.mass);
  r.packing_ratio = packed.value();
  for (int id : lattice.generation(r.j_min))
    r.packing_max_top = std::max(r.packing_max_top, weak_geometric_packing(lattice, params.eps, id));

  Corona corona = corona_decompose(lattice, params);
  r.trees = classify_trees(corona, lattice, params);
  r.n_trees = corona.trees.size();
  r.n_bad = static_cast<std::size_t>(std::count(corona.bad.begin(), corona.bad.end(), char{1}));
  r.corona_coverage = corona_coverage(lattice, corona, 3);

  for (int j = r.j_min; j <= r.j_max; ++j) {
    GenerationRow row;
    row.generation = j;
    row.cubes = lattice.generation(j).size();
    CompensatedSum beta;
    CompensatedSum pack;
    for (int id : lattice.generation(j)) {
      beta.add(lattice.cubes[id].beta1);
      if (lattice.cubes[id].beta1 >= params.eps) pack.add(lattice.cubes[id].mass);
    }
    row.mean_beta1 = beta.value() / static_cast<double>(row.cubes);
    row.packing = pack.value();
    for (const Tree& t : corona.trees)
      if (lattice.cubes[t.root].generation == j) ++row.roots;
    r.generations.push_back(row);
  }

  // Stopping time from the support point nearest the centre of the box.
  const BoundingBox& bb = nu.bbox();
  const Point2 mid{0.5 * (bb.min_x + bb.max_x), 0.5 * (bb.min_y + bb.max_y)};
  std::size_t x0 = 0;
  for (std::size_t i = 1; i < nu.size(); ++i)
    if (norm2(nu.point(i) - mid) < norm2(nu.point(x0) - mid)) x0 = i;
  const Line d0 = total_least_squares_line(nu, nu.indices_in_ball(Ball{nu.point(x0), 1.0}));
  try {
    const StoppingTime st = stopping_time_region(nu, nu.point(x0), d0, params, lattice);
    r.region_mass = st.region_mass;
    r.graph_coverage = st.region_mass[0];
  } catch (const std::invalid_argument&) {
    r.region_mass = {0.0, 1.0, 0.0, 0.0};
    r.graph_coverage = 0.0;
  }

  r.packing_per_generation = r.packing_ratio / static_cast<double>(r.j_max - r.j_min + 1);
  const VerdictThresholds& th = options.thresholds;
  if (r.corona_coverage >= th.graph_coverage && r.packing_per_generation <= th.graph_packing) {
    r.verdict = Verdict::GraphLike;
  } else if (r.packing_per_generation >= th.dust_packing) {
    r.verdict = Verdict::DustLike;
  } else {
    r.verdict = Verdict::Mixed;
  }
  return r;
}

json to_json(const RectifiabilityReport& r) {
  json p = json::object();
  for (const auto& [n, e] : r.p_normalized) p[std::to_string(n)] = to_json(e);
  json gens = json::array();
  for (const GenerationRow& g : r.generations)
    gens.push_back({{"generation", g.generation},
                    {"cubes", g.cubes},
                    {"mean_beta1", g.mean_beta1},
                    {"packing", g.packing},
                    {"roots", g.roots}});
  json types = json::object();
  for (std::size_t t = 0; t < 4; ++t)
    types[to_string(static_cast<TreeType>(t))] = {{"count", r.trees.count[t]}, {"packing", r.trees.packing[t]}};
  return {{"n_points", r.n_points},
          {"j_min", r.j_min},
          {"j_max", r.j_max},
          {"p_normalized", p},
          {"c2_normalized", r.c2_normalized ? to_json(*r.c2_normalized) : json(nullptr)},
          {"packing_ratio", r.packing_ratio},
          {"packing_max_top", r.packing_max_top},
          {"packing_per_generation", r.packing_per_generation},
          {"corona_coverage", r.corona_coverage},
          {"graph_coverage", r.graph_coverage},
          {"region_mass",
           {{"Z", r.region_mass[0]}, {"F1", r.region_mass[1]}, {"F2", r.region_mass[2]}, {"F3", r.region_mass[3]}}},
          {"trees", r.n_trees},
          {"bad_cubes", r.n_bad},
          {"tree_types", types},
          {"generations", gens},
          {"verdict", to_string(r.verdict)},
          {"thresholds",
           {{"graph_coverage", r.thresholds.graph_coverage},
            {"graph_packing", r.thresholds.graph_packing},
            {"dust_packing", r.thresholds.dust_packing}}}};
}

json lattice_to_json(const CubeLattice& lattice) {
  json cubes = json::array();
  for (std::size_t id = 0; id < lattice.cubes.size(); ++id) {
    const Cube& q = lattice.cubes[id];
    cubes.push_back({{"id", id},
                     {"generation", q.generation},
                     {"gx", q.gx},
                     {"gy", q.gy},
                     {"side", q.side},
                     {"mass", q.mass},
                     {"n_points", q.members.size()},
                     {"beta1", q.beta1},
                     {"line_angle", q.line.theta},
                     {"parent", q.parent}});
  }
  return {{"j_min", lattice.j_min},
          {"j_max", lattice.j_max},
          {"offset", {lattice.offset.x, lattice.offset.y}},
          {"cubes", cubes}};
}

json trees_to_json(const Corona& corona) {
  json trees = json::array();
  for (const Tree& t : corona.trees) {
    json tj = {{"root", t.root},
               {"members", t.members},
               {"alpha", t.alpha},
               {"type", to_string(t.type)},
               {"stop_alpha", t.stop_alpha},
               {"stop_beta", t.stop_beta},
               {"stop_jump", t.stop_jump}};
    if (t.graph) tj["graph"] = {{"lipschitz_estimate", t.graph->lipschitz_estimate}, {"accepted", t.graph->accepted}};
    trees.push_back(std::move(tj));
  }
  std::vector<int> bad;
  for (std::size_t c = 0; c < corona.bad.size(); ++c)
    if (corona.bad[c]) bad.push_back(static_cast<int>(c));
  return {{"trees", trees}, {"bad_cubes", bad}};
}

std::string generations_to_csv(std::span<const GenerationRow> rows) {
  std::string out = "generation,cubes,mean_beta1,packing,roots\n";
  for (const GenerationRow& g : rows) {
    out += std::to_string(g.generation) + ',' + std::to_string(g.cubes) + ',' + format_double(g.mean_beta1) + ',' +
           format_double(g.packing) + ',' + std::to_string(g.roots) + '\n';
  }
  return out;
}

}  // namespace rectikernel
