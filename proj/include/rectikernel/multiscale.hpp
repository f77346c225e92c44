#pragma once

// Multiscale geometry on discrete measures: a dyadic cube lattice with beta_1
// numbers, weak geometric packing, the stopping-time partition Z/F1/F2/F3
// with its d, D and h functions, graph extraction, and the corona
// decomposition into bad cubes and coherent trees.

#include "rectikernel/geometry.hpp"
#include "rectikernel/kernels.hpp"
#include "rectikernel/measure.hpp"
#include "rectikernel/statistics.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rectikernel {

// ---------------------------------------------------------------------------
// Parameters

struct ParamsLedger {
  std::string profile = "desk";
  double delta = 0.05;        // density threshold
  double eps = 0.1;           // flatness threshold
  double theta0 = 0.2617993877991494;       // pi/12
  double alpha_small = 1.0471975511965976;  // used when the reference line is far from vertical
  double alpha_big = 2.6179938779914944;    // used when it is within theta0 of vertical
  double tau = 10.0;          // comparability ratio for O_tau
  double k_dilate = 2.0;
  double eta_budget = 0.01;   // target mass fraction of F1 + F2 + F3
  int besicovitch_n = 19;
  std::array<double, 7> c_slots{1, 1, 1, 1, 1, 1, 1};
  double c_lipschitz = 2.0;   // graphs are accepted when their slope is <= c_lipschitz * alpha

  /// delta = 0.05, eps = 0.1, theta0 = pi/12, alpha_small = pi/3, alpha_big = 10 theta0.
  static ParamsLedger desk();
  /// theta0 = pi/1e6, delta = 1e-10/N, alpha_small = theta0/10, alpha_big = 10 theta0,
  /// eps = smallest positive double.
  static ParamsLedger paper_faithful();
  /// "desk" or "paper-faithful"; throws std::invalid_argument otherwise.
  static ParamsLedger from_name(const std::string& name);

  /// Two-branch rule: alpha_small if the line is more than theta0 away from vertical.
  [[nodiscard]] double alpha_for(const Line& reference) const;

  /// Throws std::invalid_argument on non-positive or non-finite values.
  void validate() const;

  /// Theoretical relations among the parameters that this profile violates
  /// (only checked for the paper-faithful profile). Empty when all hold.
  [[nodiscard]] std::vector<std::string> violated_relations() const;

  [[nodiscard]] nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Cube lattice

struct Cube {
  int generation = 0;
  std::int64_t gx = 0;
  std::int64_t gy = 0;
  double side = 1.0;
  std::vector<std::size_t> members;  // point indices, ascending
  double mass = 0.0;
  int parent = -1;
  std::vector<int> children;
  double beta1 = 0.0;
  Line line;  // L_Q, fitted over 3Q
};

struct CubeLattice {
  std::shared_ptr<const DiscreteMeasure> measure;
  int j_min = 0;
  int j_max = 0;
  Point2 offset;
  std::vector<Cube> cubes;
  std::vector<std::vector<int>> by_generation;  // cube ids in grid order (gx, then gy)

  [[nodiscard]] const std::vector<int>& generation(int j) const { return by_generation.at(j - j_min); }
  [[nodiscard]] std::vector<double> scales() const;  // 2^-j for j in [j_min, j_max]
};

constexpr int kMaxGenerationSpan = 40;

/// Dyadic squares of side 2^-j translated by a seed-derived offset in
/// [0, 2^-j_min)^2 (no offset for seed 0), intersected with the support.
/// Computes beta_1 and L_Q for every cube.
[[nodiscard]] CubeLattice build_cubes(const DiscreteMeasure& mu, int j_min, int j_max, std::uint64_t offset_seed,
                                      double k_3q = 3.0);

/// Points of aQ: within distance (a - 1) l(Q) of the square.
[[nodiscard]] std::vector<std::size_t> dilated_cube_members(const CubeLattice& lattice, const Cube& q,
                                                            double a = 3.0);

struct CubeBeta {
  double beta1 = 0.0;
  Line line;
};

/// beta_1 over 3Q against the total least squares line of 3Q.
[[nodiscard]] CubeBeta cube_beta1(const CubeLattice& lattice, const Cube& q);

/// sum of mu(Q) over descendants Q of R (R included) with beta_1(Q) >= eps, over mu(R).
[[nodiscard]] double weak_geometric_packing(const CubeLattice& lattice, double eps, int root);

// ---------------------------------------------------------------------------
// Stopping-time region

enum class Region { Z, F1, F2, F3 };

/// A ball B(center, radius) centred at support point `point`.
struct ScaleBall {
  std::size_t point = 0;
  Point2 center;
  double radius = 0.0;
};

struct StoppingTime {
  Line d0;
  double alpha = 0.0;
  std::vector<double> scales;             // descending
  std::vector<ScaleBall> s;               // S = {(x,t) in S_total : t >= h(x)}
  std::vector<double> h;                  // per point
  std::vector<Region> region;             // per point
  std::array<double, 4> region_mass{};    // Z, F1, F2, F3

  // Per (point, scale) evaluations, row-major by point.
  std::vector<double> density;
  std::vector<double> beta1;
  std::vector<double> angle;  // between the best line of B(x, t) and d0

  [[nodiscard]] std::size_t n_scales() const { return scales.size(); }
  [[nodiscard]] bool in_s_total(std::size_t point, std::size_t scale, const ParamsLedger& p) const;
};

/// Evaluates S_total on support points times lattice scales below 5, h on the
/// same scales, S, and the first-match partition Z/F1/F2/F3. Throws
/// std::invalid_argument if the top ball B(x0, 1) has density below delta/2.
[[nodiscard]] StoppingTime stopping_time_region(const DiscreteMeasure& mu, Point2 x0, const Line& d0,
                                                const ParamsLedger& params, const CubeLattice& lattice);

/// inf over (X, t) in S of |x - X| + t.
[[nodiscard]] double d_function(Point2 x, std::span<const ScaleBall> s);

/// inf over (X, t) in S of |pi(X) - p| + t, with pi the abscissa along d0.
[[nodiscard]] double D_function(double p, std::span<const ScaleBall> s, const Line& d0);

// ---------------------------------------------------------------------------
// Graphs

struct GraphFunction {
  Line base;
  std::vector<double> abscissae;  // strictly increasing
  std::vector<double> ordinates;
  double lipschitz_estimate = 0.0;  // max slope between consecutive samples
  double slope_bound = 0.0;
  bool accepted = false;

  /// Piecewise-linear interpolation; constant beyond the end samples.
  [[nodiscard]] double value(double u) const;
};

/// Graph of the points `indices` of mu over `base`. Throws std::domain_error
/// when two points share an abscissa with different ordinates, and
/// std::invalid_argument when `indices` is empty.
[[nodiscard]] GraphFunction build_graph_function(const DiscreteMeasure& mu, std::span<const std::size_t> indices,
                                                 const Line& base, double slope_bound);

/// Graph through the Z points of a stopping-time region, bound c_lipschitz * alpha.
[[nodiscard]] GraphFunction build_graph_function(const DiscreteMeasure& mu, const StoppingTime& st,
                                                 const ParamsLedger& params);

/// (1/t^2) * integral over [p - t, p + t] of |A - a| for the least squares
/// affine a (or its L1 refinement when refine_iterations > 0), by a
/// 512-cell midpoint rule. Throws std::invalid_argument if t <= 0.
[[nodiscard]] double gamma_affine(const GraphFunction& graph, double p, double t, int refine_iterations = 0);

struct JoinedGraph {
  std::vector<Ball> balls;  // (100,200)-doubling balls with disjoint 20x dilates
  std::vector<GraphFunction> pieces;
  GraphFunction joined;     // over the original d0
};

/// Near-vertical case: doubling balls around F3 points, one pipeline per
/// selected ball with its own reference line, then one graph over d0 through
/// the Z points of every piece and of `st`.
[[nodiscard]] JoinedGraph vertical_case_graph(const DiscreteMeasure& mu, const StoppingTime& st,
                                              const ParamsLedger& params, const CubeLattice& lattice);

// ---------------------------------------------------------------------------
// Corona decomposition

enum class TreeType { I, II, III, IV };

[[nodiscard]] std::string to_string(TreeType t);

struct Tree {
  int root = -1;
  std::vector<int> members;     // cube ids, root first, then breadth-first
  double alpha = 0.0;
  std::vector<int> stop_beta;   // some child is bad
  std::vector<int> stop_alpha;  // angle to the root line >= alpha/2
  std::vector<int> stop_jump;   // a child would exceed alpha while the cube itself is below alpha/2
  TreeType type = TreeType::I;
  std::optional<GraphFunction> graph;
};

struct Corona {
  std::vector<char> bad;      // per cube: beta_1 > eps
  std::vector<int> tree_of;   // per cube; -1 for bad cubes
  std::vector<Tree> trees;
};

[[nodiscard]] Corona corona_decompose(const CubeLattice& lattice, const ParamsLedger& params);

struct TreeSummary {
  std::array<int, 4> count{};
  std::array<double, 4> packing{};  // sum of mu(Q_S) over trees of the type, over total mass
};

/// Assigns types I-IV by first match and fits a graph over each root line
/// through the centroids of the tree's minimal cubes.
TreeSummary classify_trees(Corona& corona, const CubeLattice& lattice, const ParamsLedger& params);

/// Ordered sum over x in 3Q, y with l(Q)/c <= |x - y| <= c l(Q), and z in
/// the support, of p(x, y, z) w_x w_y w_z.
[[nodiscard]] double tree_p_sum(const KernelId& k, const CubeLattice& lattice, int cube, double c_band);

/// Fraction of finest-generation mass in trees whose root lies in the top
/// `top_generations` generations.
[[nodiscard]] double corona_coverage(const CubeLattice& lattice, const Corona& corona, int top_generations = 3);

// ---------------------------------------------------------------------------
// Report

enum class Verdict { GraphLike, Mixed, DustLike };

[[nodiscard]] std::string to_string(Verdict v);

/// Packing is compared per generation: packing_ratio / (j_max - j_min + 1).
struct VerdictThresholds {
  double graph_coverage = 0.9;  // graph-like needs corona coverage at least this
  double graph_packing = 0.4;   // and per-generation packing at most this
  double dust_packing = 0.85;   // dust-like at or above this
};

struct ReportOptions {
  std::vector<int> kernels{1};
  int j_min = 0;
  std::optional<int> j_max;        // default floor(log2(N / 16)), clamped to [j_min + 2, j_min + 12]
  std::uint64_t offset_seed = 0;
  std::size_t exact_cap = 5000;    // Monte Carlo above this many points
  std::uint64_t mc_samples = 200000;
  std::uint64_t seed = 0;
  bool triple_sums = true;
  VerdictThresholds thresholds;
};

struct GenerationRow {
  int generation = 0;
  std::size_t cubes = 0;
  double mean_beta1 = 0.0;
  double packing = 0.0;  // mass fraction of cubes with beta_1 >= eps
  std::size_t roots = 0;
};

struct RectifiabilityReport {
  std::size_t n_points = 0;
  int j_min = 0;
  int j_max = 0;
  std::vector<std::pair<int, SumEstimate>> p_normalized;
  std::optional<SumEstimate> c2_normalized;
  double packing_ratio = 0.0;      // sum of mu(Q) over cubes with beta_1 >= eps
  double packing_max_top = 0.0;    // max over top-generation R of the weak geometric packing
  double packing_per_generation = 0.0;
  double corona_coverage = 0.0;
  double graph_coverage = 0.0;     // mass fraction of Z
  std::array<double, 4> region_mass{};
  TreeSummary trees;
  std::size_t n_trees = 0;
  std::size_t n_bad = 0;
  std::vector<GenerationRow> generations;
  Verdict verdict = Verdict::Mixed;
  VerdictThresholds thresholds;
};

/// Normalizes mu to unit bounding-box diagonal and unit mass, then runs the
/// lattice, corona and stopping-time pipelines (and the triple sums when
/// requested). Normalized sums are scale and mass invariant: p diam^2 / mass^3.
[[nodiscard]] RectifiabilityReport rectifiability_report(const DiscreteMeasure& mu, const ParamsLedger& params,
                                                         const ReportOptions& options = {});

/// Unit bounding-box diagonal, unit mass, bounding-box corner at the origin.
[[nodiscard]] DiscreteMeasure normalize_measure(const DiscreteMeasure& mu);

[[nodiscard]] nlohmann::json to_json(const RectifiabilityReport& r);
[[nodiscard]] nlohmann::json lattice_to_json(const CubeLattice& lattice);
[[nodiscard]] nlohmann::json trees_to_json(const Corona& corona);
/// Columns generation,cubes,mean_beta1,packing,roots.
[[nodiscard]] std::string generations_to_csv(std::span<const GenerationRow> rows);

}  // namespace rectikernel
