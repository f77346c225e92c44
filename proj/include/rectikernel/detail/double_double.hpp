#pragma once

// Minimal double-double arithmetic (about 106 significant bits) built on
// error-free transformations. Used where three-point formulas cancel badly
// for thin triangles.

#include <cmath>

namespace rectikernel::detail {

struct DD {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DD() = default;
  constexpr DD(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr DD(double h, double l) : hi(h), lo(l) {}

  [[nodiscard]] double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD operator+(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b) {
  const double q1 = a.hi / b.hi;
  DD r = a - b * DD(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * DD(q2);
  const double q3 = r.hi / b.hi;
  return DD(q1) + DD(q2) + DD(q3);
}

inline DD sqrt(DD a) {
  if (a.hi <= 0.0) return {};
  const double x = std::sqrt(a.hi);
  // One Newton step: x + (a - x^2) / (2x).
  const DD x2 = two_prod(x, x);
  const double corr = (a - x2).hi / (2.0 * x);
  return two_sum(x, corr);
}

inline DD abs(DD a) { return a.hi < 0.0 ? -a : a; }

inline DD ipow(DD base, int e) {
  DD r(1.0);
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

}  // namespace rectikernel::detail
