#include "oracles.hpp"
#include "rectikernel/kernels.hpp"
#include "rectikernel/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace rectikernel;

namespace {
Triple random_triple(Rng& rng) {
  return {{rng.uniform(-1, 1), rng.uniform(-1, 1)},
          {rng.uniform(-1, 1), rng.uniform(-1, 1)},
          {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
}
}  // namespace

TEST_CASE("right triangle values") {
  const Triple t{{0, 0}, {1, 0}, {0, 1}};
  CHECK(permutation_direct(KernelId::coordinate_power(1), t) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(menger_curvature_squared(t) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(static_cast<double>(oracle::permutation(1, t.z1, t.z2, t.z3)) == doctest::Approx(0.5));
}

TEST_CASE("p1 is a quarter of the squared curvature") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Triple t = random_triple(rng);
    if (normalized_area(t) < 1e-3) continue;
    const double p = permutation_direct(KernelId::coordinate_power(1), t);
    CHECK(p == doctest::Approx(menger_curvature_squared(t) / 4).epsilon(1e-12));
  }
}

TEST_CASE("direct sum matches long double oracle") {
  Rng rng(12);
  for (int n = 1; n <= 4; ++n) {
    for (int i = 0; i < 500; ++i) {
      const Triple t = random_triple(rng);
      if (normalized_area(t) < 1e-2) continue;
      const double expect = static_cast<double>(oracle::permutation(n, t.z1, t.z2, t.z3));
      CHECK(permutation_direct(KernelId::coordinate_power(n), t) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(permutation_factored(n, t.z2 - t.z1, t.z3 - t.z1) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("collinear triples vanish and scaling is -2 homogeneous") {
  const Triple line{{0, 0}, {0.3, 0.6}, {1, 2}};
  CHECK(std::abs(permutation_direct(KernelId::coordinate_power(2), line)) <= 1e-14);
  CHECK(menger_curvature(line) == 0.0);

  const Triple t{{0.1, -0.2}, {0.7, 0.4}, {-0.3, 0.9}};
  const Triple s{3.0 * t.z1, 3.0 * t.z2, 3.0 * t.z3};
  const Point2 v{5.0, -2.0};
  const Triple shifted{t.z1 + v, t.z2 + v, t.z3 + v};
  for (int n = 1; n <= 3; ++n) {
    const KernelId k = KernelId::coordinate_power(n);
    CHECK(permutation_direct(k, s) == doctest::Approx(permutation_direct(k, t) / 9).epsilon(1e-13));
    CHECK(permutation_direct(k, shifted) == doctest::Approx(permutation_direct(k, t)).epsilon(1e-12));
  }
}

TEST_CASE("cauchy permutation sum is real and equals c^2") {
  const Triple t{{0, 0}, {2, 0}, {0.5, 1.5}};
  const CauchySum c = cauchy_permutation_sum(t);
  CHECK(c.real == doctest::Approx(menger_curvature_squared(t)).epsilon(1e-13));
  CHECK(std::abs(c.imag) <= 1e-13);
}

TEST_CASE("kernel names") {
  CHECK(KernelId::parse("3") == KernelId::coordinate_power(3));
  CHECK(KernelId::parse("huovinen") == KernelId::huovinen());
  CHECK(KernelId::parse("2").name() == "2");
  CHECK_THROWS_AS((void)KernelId::parse("0"), std::invalid_argument);
  CHECK_THROWS_AS((void)KernelId::parse("cauchy"), std::invalid_argument);
}

TEST_CASE("angles") {
  CHECK(angle_to_vertical(Line({0, 0}, std::numbers::pi / 2)) == doctest::Approx(0.0));
  CHECK(angle_to_vertical(Line({1, 1}, 0.0)) == doctest::Approx(std::numbers::pi / 2));
  CHECK(angle_between(Line({0, 0}, 0.1), Line({3, 3}, std::numbers::pi - 0.1)) == doctest::Approx(0.2));
}

TEST_CASE("comparable family") {
  const Triple equilateral{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  CHECK(in_comparable_family(1.0, equilateral));
  const Triple thin{{0, 0}, {1, 0}, {0.01, 0.01}};
  CHECK_FALSE(in_comparable_family(10.0, thin));
  CHECK(in_comparable_family(200.0, thin));
}

TEST_CASE("huovinen search finds a negative triple") {
  const auto w = find_negative_permutation(KernelId::huovinen(), 200000, 3);
  REQUIRE(w.has_value());
  CHECK(w->normalized_value <= -1e-6);
  const Triple& t = w->triple;
  const double d = std::max({distance(t.z1, t.z2), distance(t.z2, t.z3), distance(t.z1, t.z3)});
  CHECK(permutation_direct(KernelId::huovinen(), t) * d * d == doctest::Approx(w->normalized_value));
}
