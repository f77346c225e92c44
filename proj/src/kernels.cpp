#include "rectikernel/kernels.hpp"

#include "rectikernel/detail/double_double.hpp"
#include "rectikernel/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rectikernel {

namespace {

using detail::DD;

constexpr double kMinKernelRadius = 1e-300;
constexpr double kCollinearTolerance = 1e-12;

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

void require_distinct(const Triple& t, const char* what) {
  if (!pairwise_distinct(t)) throw std::domain_error(std::string(what) + ": coincident points");
}

// Kahan's fma-based a*d - b*c, accurate to about one ulp.
double diff_of_products(double a, double d, double b, double c) {
  const double bc = b * c;
  const double err = std::fma(-b, c, bc);
  const double r = std::fma(a, d, -bc);
  return r + err;
}

double twice_area(const Triple& t) {
  const Point2 u = t.z2 - t.z1;
  const Point2 v = t.z3 - t.z1;
  return std::abs(diff_of_products(u.x, v.y, u.y, v.x));
}

struct DDPoint {
  DD x;
  DD y;
};

DDPoint exact_diff(Point2 a, Point2 b) {
  return {detail::two_sum(a.x, -b.x), detail::two_sum(a.y, -b.y)};
}

DD dd_norm2(const DDPoint& p) { return p.x * p.x + p.y * p.y; }

DD dd_kernel(const KernelId& k, const DDPoint& z) {
  const DD r = detail::sqrt(dd_norm2(z));
  const DD u = z.x / r;
  if (k.kind == KernelId::Kind::Huovinen) {
    const DD v = z.y / r;
    return u * v * v / r;
  }
  return detail::ipow(u, 2 * k.n - 1) / r;
}

DD dd_cross(const DDPoint& u, const DDPoint& v) { return u.x * v.y - u.y * v.x; }

void require_kernel_argument(Point2 z) {
  if (!z.finite()) throw std::domain_error("kernel_eval: non-finite argument");
  if (!(norm(z) >= kMinKernelRadius)) throw std::domain_error("kernel_eval: |z| below 1e-300");
}

}  // namespace

KernelId KernelId::coordinate_power(int n) {
  if (n < 1) throw std::invalid_argument("KernelId: n must be >= 1");
  return {Kind::CoordinatePower, n};
}

KernelId KernelId::parse(const std::string& text) {
  if (text == "huovinen") return huovinen();
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("unknown kernel '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("unknown kernel '" + text + "'");
  return coordinate_power(n);
}

std::string KernelId::name() const {
  return kind == Kind::Huovinen ? std::string("huovinen") : std::to_string(n);
}

bool pairwise_distinct(const Triple& t) {
  return !(t.z1 == t.z2) && !(t.z1 == t.z3) && !(t.z2 == t.z3);
}

double normalized_area(const Triple& t) {
  const double longest =
      std::max({norm2(t.z2 - t.z1), norm2(t.z3 - t.z1), norm2(t.z3 - t.z2)});
  if (longest == 0.0) return 0.0;
  return twice_area(t) / longest;
}

bool numerically_collinear(const Triple& t) { return normalized_area(t) < kCollinearTolerance; }

double kernel_eval(const KernelId& k, Point2 z) {
  if (!z.finite()) throw std::domain_error("kernel_eval: non-finite argument");
  const double r = norm(z);
  if (!(r >= kMinKernelRadius)) throw std::domain_error("kernel_eval: |z| below 1e-300");
  const double u = z.x / r;
  if (k.kind == KernelId::Kind::Huovinen) {
    const double v = z.y / r;
    return u * v * v / r;
  }
  return ipow(u, 2 * k.n - 1) / r;
}

double permutation_direct(const KernelId& k, const Triple& t) {
  require_distinct(t, "permutation_direct");
  require_kernel_argument(t.z1 - t.z2);
  require_kernel_argument(t.z1 - t.z3);
  require_kernel_argument(t.z2 - t.z3);
  // K is odd: K(z2-z1) = -K(z1-z2), so the six products collapse to three.
  const DD k12 = dd_kernel(k, exact_diff(t.z1, t.z2));
  const DD k13 = dd_kernel(k, exact_diff(t.z1, t.z3));
  const DD k23 = dd_kernel(k, exact_diff(t.z2, t.z3));
  return (k12 * k13 - k12 * k23 + k13 * k23).value();
}

double permutation_direct_fast(const KernelId& k, const Triple& t) {
  const double k12 = kernel_eval(k, t.z1 - t.z2);
  const double k13 = kernel_eval(k, t.z1 - t.z3);
  const double k23 = kernel_eval(k, t.z2 - t.z3);
  return k12 * k13 - k12 * k23 + k13 * k23;
}

double permutation_term_scale(const KernelId& k, const Triple& t) {
  require_distinct(t, "permutation_term_scale");
  const double k12 = kernel_eval(k, t.z1 - t.z2);
  const double k13 = kernel_eval(k, t.z1 - t.z3);
  const double k23 = kernel_eval(k, t.z2 - t.z3);
  return std::max({std::abs(k12 * k13), std::abs(k12 * k23), std::abs(k13 * k23)});
}

namespace {

DD dd_f_term(int k, Point2 z, Point2 w) {
  const DD x(z.x), y(z.y), a(w.x), b(w.y);
  const DD xa = detail::two_sum(z.x, -w.x);
  const DD yb = detail::two_sum(z.y, -w.y);
  const int odd = 2 * k - 1;
  const int even = 2 * k;
  using detail::ipow;
  return ipow(x, odd) * ipow(a, odd) * ipow(yb, even) + ipow(x, odd) * ipow(xa, odd) * ipow(b, even) -
         ipow(a, odd) * ipow(xa, odd) * ipow(y, even);
}

DD dd_numerator(int n, Point2 z, Point2 w) {
  const DD x(z.x), a(w.x);
  const DD xa = detail::two_sum(z.x, -w.x);
  DD total;
  for (int k = 1; k <= n; ++k) {
    const int e = 2 * (n - k);
    using detail::ipow;
    total = total + DD(binomial(n, k)) * ipow(x, e) * ipow(a, e) * ipow(xa, e) * dd_f_term(k, z, w);
  }
  return total;
}

}  // namespace

double f_term(int k, Point2 z, Point2 w) {
  if (k < 1) throw std::invalid_argument("f_term: k must be >= 1");
  return dd_f_term(k, z, w).value();
}

double permutation_numerator(int n, Point2 z, Point2 w) {
  if (n < 1) throw std::invalid_argument("permutation_numerator: n must be >= 1");
  return dd_numerator(n, z, w).value();
}

double permutation_factored(int n, Point2 z, Point2 w) {
  if (n < 1) throw std::invalid_argument("permutation_factored: n must be >= 1");
  if (z == Point2{} || w == Point2{} || z == w)
    throw std::domain_error("permutation_factored: coincident points");
  const DDPoint zd{DD(z.x), DD(z.y)};
  const DDPoint wd{DD(w.x), DD(w.y)};
  const DDPoint zw = exact_diff(z, w);
  using detail::ipow;
  const DD denom = ipow(dd_norm2(zd), n) * ipow(dd_norm2(wd), n) * ipow(dd_norm2(zw), n);
  return (dd_numerator(n, z, w) / denom).value();
}

double f_poly(int k, double t, double s) {
  if (k < 1) throw std::invalid_argument("f_poly: k must be >= 1");
  const int odd = 2 * k - 1;
  const int even = 2 * k;
  return ipow(t, odd) * ipow(s - 1.0, even) + ipow(t - 1.0, odd) * ipow(t, odd) -
         ipow(t - 1.0, odd) * ipow(s, even);
}

namespace {

DD dd_curvature_squared(const Triple& t) {
  const DDPoint u = exact_diff(t.z2, t.z1);
  const DDPoint v = exact_diff(t.z3, t.z1);
  const DDPoint w = exact_diff(t.z3, t.z2);
  const DD c = dd_cross(u, v);
  return DD(4.0) * c * c / (dd_norm2(u) * dd_norm2(v) * dd_norm2(w));
}

}  // namespace

double menger_curvature(const Triple& t) {
  require_distinct(t, "menger_curvature");
  return detail::sqrt(dd_curvature_squared(t)).value();
}

double menger_curvature_squared(const Triple& t) {
  require_distinct(t, "menger_curvature_squared");
  return dd_curvature_squared(t).value();
}

CauchySum cauchy_permutation_sum(const Triple& t) {
  require_distinct(t, "cauchy_permutation_sum");
  // 1/(u conj v) = conj(u) v / (|u|^2 |v|^2) with conj(u) v = u.v + i (u x v).
  const std::array<Point2, 3> z{t.z1, t.z2, t.z3};
  constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  DD re;
  DD im;
  for (const auto& s : perms) {
    const DDPoint u = exact_diff(z[s[1]], z[s[0]]);
    const DDPoint v = exact_diff(z[s[2]], z[s[0]]);
    const DD scale = dd_norm2(u) * dd_norm2(v);
    re = re + (u.x * v.x + u.y * v.y) / scale;
    im = im + dd_cross(u, v) / scale;
  }
  return {re.value(), im.value()};
}

double angle_to_vertical(const Line& l) {
  return std::abs(l.theta - std::numbers::pi / 2.0);
}

double angle_between(const Line& a, const Line& b) {
  const double d = std::fmod(std::abs(a.theta - b.theta), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

double vertical_angle_sum(const Triple& t) {
  return angle_to_vertical(Line::through(t.z1, t.z2)) +
         angle_to_vertical(Line::through(t.z1, t.z3)) +
         angle_to_vertical(Line::through(t.z2, t.z3));
}

bool in_comparable_family(double tau, const Triple& t) {
  require_distinct(t, "in_comparable_family");
  const double a = distance(t.z1, t.z2);
  const double b = distance(t.z1, t.z3);
  const double c = distance(t.z2, t.z3);
  return std::max({a, b, c}) <= tau * std::min({a, b, c});
}

double comparability_ratio(int n, const Triple& t) {
  require_distinct(t, "comparability_ratio");
  if (numerically_collinear(t)) throw std::domain_error("comparability_ratio: collinear triple");
  return permutation_direct(KernelId::coordinate_power(n), t) / menger_curvature_squared(t);
}

std::optional<NegativeWitness> find_negative_permutation(const KernelId& k, std::uint64_t max_samples,
                                                        std::uint64_t seed, double threshold) {
  Rng rng(seed);
  for (std::uint64_t s = 1; s <= max_samples; ++s) {
    Triple t;
    t.z1 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    t.z2 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    t.z3 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (!pairwise_distinct(t)) continue;
    const double side = std::max({distance(t.z1, t.z2), distance(t.z1, t.z3), distance(t.z2, t.z3)});
    const double v = permutation_direct(k, t) * side * side;
    if (v <= threshold) return NegativeWitness{t, v, s};
  }
  return std::nullopt;
}

}  // namespace rectikernel
