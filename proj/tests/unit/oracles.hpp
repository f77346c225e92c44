#pragma once

// Reference formulas written independently of the library, used to freeze
// expected values in the unit tests.

#include "rectikernel/geometry.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using rectikernel::Point2;

// K_n(z) = x^(2n-1) / |z|^(2n), evaluated in long double.
inline long double kernel_n(int n, long double x, long double y) {
  const long double r2 = x * x + y * y;
  return std::pow(x, 2 * n - 1) / std::pow(r2, n);
}

inline long double permutation(int n, Point2 a, Point2 b, Point2 c) {
  const auto k = [n](Point2 p, Point2 q) { return kernel_n(n, p.x - q.x, p.y - q.y); };
  return k(a, b) * k(a, c) + k(b, a) * k(b, c) + k(c, a) * k(c, b);
}

// c = 2 |cross| / (|ab| |bc| |ca|), squared.
inline long double curvature_squared(Point2 a, Point2 b, Point2 c) {
  const long double cross = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                            (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
  const auto d2 = [](Point2 p, Point2 q) {
    const long double dx = static_cast<long double>(p.x) - q.x;
    const long double dy = static_cast<long double>(p.y) - q.y;
    return dx * dx + dy * dy;
  };
  return 4.0L * cross * cross / (d2(a, b) * d2(b, c) * d2(c, a));
}

// Brute-force unordered sum over index triples i < j < k with distinct
// locations; no merging of coincident atoms.
template <class F>
long double brute_triple_sum(const std::vector<Point2>& p, const std::vector<double>& w, F term) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      for (std::size_t k = j + 1; k < p.size(); ++k) {
        if (p[i] == p[j] || p[j] == p[k] || p[i] == p[k]) continue;
        s += static_cast<long double>(w[i]) * w[j] * w[k] * term(p[i], p[j], p[k]);
      }
  return s;
}

}  // namespace oracle
