#include "rectikernel/measure.hpp"
#include "rectikernel/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace rectikernel;

namespace {
DiscreteMeasure cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> p(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = {rng.uniform(0, 2), rng.uniform(-1, 1)};
    w[i] = rng.uniform(0.1, 1.0);
  }
  return build_measure(p, w);
}
}  // namespace

TEST_CASE("grid queries agree with linear scans") {
  const DiscreteMeasure mu = cloud(2000, 1);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Ball b{{rng.uniform(-0.5, 2.5), rng.uniform(-1.5, 1.5)}, rng.uniform(0.001, 1.5)};
    CHECK(mass_in_ball(mu, b) == doctest::Approx(mass_in_ball_linear(mu, b)).epsilon(1e-12));
    std::vector<std::size_t> expect;
    for (std::size_t k = 0; k < mu.size(); ++k)
      if (b.contains(mu.point(k))) expect.push_back(k);
    std::vector<std::size_t> got = mu.indices_in_ball(b);
    std::sort(got.begin(), got.end());
    CHECK(got == expect);
  }
}

TEST_CASE("density and renormalization") {
  const DiscreteMeasure mu = cloud(300, 3);
  const Ball b{{1, 0}, 0.5};
  CHECK(density(mu, b) == doctest::Approx(mass_in_ball(mu, b) / 0.5));

  const Point2 anchor{0.5, 0.5};
  const DiscreteMeasure nu = renormalize(mu, 4.0, anchor);
  CHECK(nu.total_mass() == doctest::Approx(mu.total_mass() / 4.0));
  CHECK(nu.point(7).x == doctest::Approx((mu.point(7).x - anchor.x) / 4.0));
  const Ball scaled{{(1 - anchor.x) / 4, (0 - anchor.y) / 4}, 0.5 / 4};
  CHECK(density(nu, scaled) == doctest::Approx(density(mu, b)));
}

TEST_CASE("subset and restriction keep weights") {
  const DiscreteMeasure mu = cloud(50, 4);
  const std::vector<std::size_t> idx{3, 9, 10};
  const DiscreteMeasure s = mu.subset(idx);
  REQUIRE(s.size() == 3);
  CHECK(s.weight(1) == mu.weight(9));
  CHECK(s.total_mass() == doctest::Approx(mu.weight(3) + mu.weight(9) + mu.weight(10)));
  CHECK_FALSE(mu.restrict_to(Ball{{50, 50}, 1}).has_value());
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS((void)build_measure({}, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)build_measure({{0, 0}}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)build_measure({{0, 0}, {1, 1}}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)build_measure({{NAN, 0}}, {1.0}), std::invalid_argument);
}

TEST_CASE("segment linear growth is about one") {
  std::vector<Point2> p;
  std::vector<double> w;
  for (int i = 0; i < 1000; ++i) {
    p.push_back({(i + 0.5) / 1000.0, 0.0});
    w.push_back(1e-3);
  }
  const DiscreteMeasure mu = build_measure(p, w);
  const std::vector<double> scales{0.01, 0.05, 0.2};
  const double c = linear_growth_constant(mu, scales);
  CHECK(c >= 0.9);
  CHECK(c <= 1.1);
}
