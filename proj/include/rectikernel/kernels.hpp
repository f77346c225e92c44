#pragma once

// Pointwise kernels, three-point permutation sums and Menger curvature.
//
// Every function here is pure; errors are reported as std::domain_error.

#include "rectikernel/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace rectikernel {

/// Identifies an odd (-1)-homogeneous kernel on the plane.
///   CoordinatePower(n):  x^(2n-1) / |z|^(2n)
///   Huovinen:            x y^2 / |z|^4
struct KernelId {
  enum class Kind { CoordinatePower, Huovinen };

  Kind kind = Kind::CoordinatePower;
  int n = 1;

  static KernelId coordinate_power(int n);
  static KernelId huovinen() { return {Kind::Huovinen, 0}; }

  /// "1", "2", ... or "huovinen".
  static KernelId parse(const std::string& text);
  [[nodiscard]] std::string name() const;

  friend bool operator==(const KernelId&, const KernelId&) = default;
};

/// Normalized triangle area 2*area / (longest side)^2, in [0, sqrt(3)/2].
[[nodiscard]] double normalized_area(const Triple& t);

/// True when normalized_area < 1e-12.
[[nodiscard]] bool numerically_collinear(const Triple& t);

[[nodiscard]] bool pairwise_distinct(const Triple& t);

[[nodiscard]] double kernel_eval(const KernelId& k, Point2 z);

/// K(z1-z2)K(z1-z3) + K(z2-z1)K(z2-z3) + K(z3-z1)K(z3-z2), evaluated in
/// double-double so thin triangles keep full double relative accuracy.
[[nodiscard]] double permutation_direct(const KernelId& k, const Triple& t);

/// Same sum in plain double precision; faster, loses relative accuracy on
/// thin triangles.
[[nodiscard]] double permutation_direct_fast(const KernelId& k, const Triple& t);

/// Largest magnitude among the three products in permutation_direct; the
/// scale against which rounding in the sum is judged.
[[nodiscard]] double permutation_term_scale(const KernelId& k, const Triple& t);

/// p(0, z, w) for K_n through the polynomial expansion
///   A(z,w) = sum_k C(n,k) x^{2(n-k)} a^{2(n-k)} (x-a)^{2(n-k)} F_k(z,w)
/// divided by |z|^{2n} |w|^{2n} |z-w|^{2n}.
[[nodiscard]] double permutation_factored(int n, Point2 z, Point2 w);

/// The numerator A(z,w) of permutation_factored.
[[nodiscard]] double permutation_numerator(int n, Point2 z, Point2 w);

/// F_k(z,w) = x^{2k-1} a^{2k-1} (y-b)^{2k} + x^{2k-1} (x-a)^{2k-1} b^{2k} - a^{2k-1} (x-a)^{2k-1} y^{2k}.
[[nodiscard]] double f_term(int k, Point2 z, Point2 w);

/// t^{2k-1}(s-1)^{2k} + (t-1)^{2k-1} t^{2k-1} - (t-1)^{2k-1} s^{2k}.
[[nodiscard]] double f_poly(int k, double t, double s);

/// Reciprocal circumradius, 4 area / (product of sides).
[[nodiscard]] double menger_curvature(const Triple& t);

/// Squared curvature without square roots: 4 cross^2 / (|a|^2 |b|^2 |c|^2).
[[nodiscard]] double menger_curvature_squared(const Triple& t);

struct CauchySum {
  double real = 0.0;
  double imag = 0.0;
};

/// Sum over the six orderings of 1 / ((z_{s2}-z_{s1}) conj(z_{s3}-z_{s1})).
/// The real part equals c^2 and the imaginary part vanishes.
[[nodiscard]] CauchySum cauchy_permutation_sum(const Triple& t);

/// Angle in [0, pi/2] between L and a vertical line.
[[nodiscard]] double angle_to_vertical(const Line& l);

/// Smallest angle in [0, pi/2] between two lines.
[[nodiscard]] double angle_between(const Line& a, const Line& b);

/// Sum of angle_to_vertical over the three lines joining the vertices.
[[nodiscard]] double vertical_angle_sum(const Triple& t);

/// Membership in O_tau: every side within factor tau of every other.
[[nodiscard]] bool in_comparable_family(double tau, const Triple& t);

/// permutation_direct / menger_curvature^2 for K_n. Ill-conditioned for
/// nearly collinear triples; throws on numerically collinear ones.
[[nodiscard]] double comparability_ratio(int n, const Triple& t);

struct NegativeWitness {
  Triple triple;
  double normalized_value = 0.0;  // p * (longest side)^2, scale invariant
  std::uint64_t samples_used = 0;
};

/// Uniform random triples in [-1,1]^2 until the normalized permutation sum of
/// `k` is <= threshold. nullopt when none of max_samples qualifies.
[[nodiscard]] std::optional<NegativeWitness> find_negative_permutation(const KernelId& k, std::uint64_t max_samples,
                                                                       std::uint64_t seed, double threshold = -1e-6);

}  // namespace rectikernel
