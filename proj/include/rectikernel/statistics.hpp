#pragma once

// Integral quantities over discrete measures: truncated transforms, triple
// sums of the permutation kernel and of squared curvature (exact and Monte
// Carlo), pointwise permutation integrals, beta numbers and the residual of
// the curvature identity for the Cauchy transform.
//
// Triple sums run over unordered index triples i < j < k, each weighted by
// w_i w_j w_k. The iterated integral over ordered triples is 6 times this.
// Triples with two coincident points are skipped; exact sums merge coincident
// atoms into one location first. Integrands are evaluated
// in plain double precision, so collinear triples contribute rounding noise
// at the 1e-16 level relative to their individual kernel products.

#include "rectikernel/geometry.hpp"
#include "rectikernel/kernels.hpp"
#include "rectikernel/measure.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rectikernel {

/// Triples inside B(center, scale) whose sides are within factor lambda.
struct LocalWindow {
  Point2 center;
  double scale = 1.0;
  double lambda = 1.0;
};

struct TripleSumOptions {
  std::optional<double> tau_restrict;  // >= 1
  std::optional<double> eps_truncate;  // > 0; all three sides >= eps
  std::optional<Ball> region;
  std::optional<LocalWindow> local_window;

  /// Throws std::invalid_argument on out-of-range values or when both
  /// region and local_window are set.
  void validate() const;
};

enum class SumMethod { Exact, MonteCarlo };

struct SumEstimate {
  double value = 0.0;
  std::optional<double> std_error;  // Monte Carlo only
  std::uint64_t n_terms = 0;        // admissible triples of distinct locations (exact) or samples (Monte Carlo)
  SumMethod method = SumMethod::Exact;
};

/// sum over support points w with |z - w| > eps of K(z - w) f(w) mu({w}).
[[nodiscard]] double truncated_transform(const KernelId& k, const DiscreteMeasure& mu, std::span<const double> f,
                                         Point2 z, double eps);

/// Exact permutation triple sum. Deterministic for any worker count.
[[nodiscard]] SumEstimate triple_sum(const KernelId& k, const DiscreteMeasure& mu,
                                     const TripleSumOptions& opts = {});

/// Exact triple sum of squared Menger curvature.
[[nodiscard]] SumEstimate curvature_triple_sum(const DiscreteMeasure& mu, const TripleSumOptions& opts = {});

/// Uniform sampling of index triples; value = C(m,3) * mean of the weighted
/// integrand, std_error from the sample variance. Triples rejected by the
/// filters count as zero.
[[nodiscard]] SumEstimate triple_sum_montecarlo(const KernelId& k, const DiscreteMeasure& mu,
                                                const TripleSumOptions& opts, std::uint64_t n_samples,
                                                std::uint64_t seed);

[[nodiscard]] SumEstimate curvature_triple_sum_montecarlo(const DiscreteMeasure& mu, const TripleSumOptions& opts,
                                                          std::uint64_t n_samples, std::uint64_t seed);

/// sum over ordered pairs (a, b) of support points of p(z1, a, b) w_a w_b.
/// Weighted over mu, this gives 6 times the unordered triple sum.
[[nodiscard]] double pointwise_permutation(const KernelId& k, const DiscreteMeasure& mu, Point2 z1);

/// sum over support points a of p(z1, z2, a) w_a.
[[nodiscard]] double pair_permutation(const KernelId& k, const DiscreteMeasure& mu, Point2 z1, Point2 z2);

/// Beta number of mu in B(x, t) against line D, over the dilated ball B(x, k t).
///   order 1: (1/t) sum (dist/t) w
///   order 2: sqrt((1/t) sum (dist/t)^2 w)
[[nodiscard]] double beta_wrt_line(const DiscreteMeasure& mu, const Ball& b, const Line& d, double k_dilate,
                                   int order);

struct BestLine {
  Line line;
  double beta2 = 0.0;  // attained by `line`; exact minimum
  double beta1 = 0.0;  // against the same line; an upper bound for the infimum
};

/// Weighted total least squares line of the given points. Throws
/// std::invalid_argument when `indices` is empty.
[[nodiscard]] Line total_least_squares_line(const DiscreteMeasure& mu, std::span<const std::size_t> indices);

/// Total least squares line through the weighted centroid of the points in
/// B(x, k t). Ties in the covariance resolve to direction angle 0. Throws
/// std::invalid_argument when the dilated ball is empty.
[[nodiscard]] BestLine best_line(const DiscreteMeasure& mu, const Ball& b, double k_dilate = 2.0);

/// Optional slow refinement of the beta_1 line by iteratively reweighted
/// least squares, started from the best beta_2 line. Never returns a worse
/// beta_1 than the starting line.
[[nodiscard]] BestLine refine_beta1_line(const DiscreteMeasure& mu, const Ball& b, double k_dilate = 2.0,
                                         int iterations = 50);

struct MvResidual {
  double lhs = 0.0;  // sum_z |C_eps 1 (z)|^2 w_z
  double rhs = 0.0;  // unordered-convention truncated c^2 sum (= the ordered c^2_eps / 6)
  double residual = 0.0;
};

[[nodiscard]] MvResidual mv_identity_residual(const DiscreteMeasure& mu, double eps);

/// Spearman rank correlation with average ranks for ties.
[[nodiscard]] double spearman(std::span<const double> a, std::span<const double> b);

[[nodiscard]] nlohmann::json to_json(const SumEstimate& e);
[[nodiscard]] nlohmann::json to_json(const TripleSumOptions& o);

struct SweepRow {
  double parameter = 0.0;
  double value = 0.0;
  std::optional<double> std_error;
};

/// Columns parameter,value,stderr; stderr is empty for exact rows.
[[nodiscard]] std::string sweep_to_csv(std::span<const SweepRow> rows);

}  // namespace rectikernel
