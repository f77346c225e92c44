#include "rectikernel/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

using namespace rectikernel;

TEST_CASE("segment: evenly spaced atoms of total mass equal to length") {
  GeneratorSpec spec;
  spec.variant = SegmentParams{{0, 0}, {3, 4}};
  spec.n_points = 100;
  const DiscreteMeasure mu = generate(spec);
  REQUIRE(mu.size() == 100);
  CHECK(mu.total_mass() == doctest::Approx(5.0));
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(4 * mu.point(i).x == doctest::Approx(3 * mu.point(i).y));
}

TEST_CASE("cantor: 4^d distinct centres, replicated to reach N") {
  GeneratorSpec spec;
  spec.variant = CantorParams{3};
  spec.n_points = 64;
  const DiscreteMeasure mu = generate(spec);
  CHECK(mu.size() == 64);
  CHECK(mu.total_mass() == doctest::Approx(1.0));

  spec.n_points = 640;
  const DiscreteMeasure big = generate(spec);
  CHECK(big.size() == 640);
  std::set<std::pair<double, double>> distinct;
  for (Point2 p : big.points()) distinct.insert({p.x, p.y});
  CHECK(distinct.size() == 64);

  // depth-1 centres sit at 1/8 and 7/8
  spec.variant = CantorParams{1};
  spec.n_points = 4;
  const DiscreteMeasure d1 = generate(spec);
  for (Point2 p : d1.points()) {
    CHECK((p.x == 0.125 || p.x == 0.875));
    CHECK((p.y == 0.125 || p.y == 0.875));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  GeneratorSpec spec;
  spec.variant = LipschitzGraphParams{};
  spec.n_points = 200;
  spec.seed = 5;
  spec.noise_sigma = 0.01;
  const DiscreteMeasure a = generate(spec);
  const DiscreteMeasure b = generate(spec);
  spec.seed = 6;
  const DiscreteMeasure c = generate(spec);
  bool same = true;
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a.point(i) == b.point(i);
    differs = differs || !(a.point(i) == c.point(i));
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("lipschitz graph respects its slope bound") {
  LipschitzGraphParams p;
  p.slope = 0.4;
  const double h = 1e-4;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = i / 10000.0;
    worst = std::max(worst, std::abs(lipschitz_graph_value(p, 3, u + h) - lipschitz_graph_value(p, 3, u)) / h);
  }
  CHECK(worst <= 0.4 + 1e-6);
}

TEST_CASE("arc atoms lie on the circle") {
  GeneratorSpec spec;
  spec.variant = CircleArcParams{{1, 1}, 2.0, 0.0, 1.0};
  spec.n_points = 50;
  const DiscreteMeasure mu = generate(spec);
  for (Point2 p : mu.points()) CHECK(distance(p, {1, 1}) == doctest::Approx(2.0));
  CHECK(mu.total_mass() == doctest::Approx(2.0));
}

TEST_CASE("invalid specs throw") {
  GeneratorSpec spec;
  spec.variant = CantorParams{kMaxCantorDepth + 1};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.variant = SegmentParams{{0, 0}, {0, 0}};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.variant = SegmentParams{};
  spec.n_points = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.n_points = 10;
  spec.noise_sigma = -1;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}
