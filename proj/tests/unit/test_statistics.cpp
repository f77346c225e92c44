#include "oracles.hpp"
#include "rectikernel/generators.hpp"
#include "rectikernel/kernels.hpp"
#include "rectikernel/rng.hpp"
#include "rectikernel/statistics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace rectikernel;

namespace {

struct Cloud {
  std::vector<Point2> points;
  std::vector<double> weights;
  [[nodiscard]] DiscreteMeasure measure() const { return build_measure(points, weights); }
};

Cloud random_cloud(std::size_t n, std::uint64_t seed, bool with_duplicates = false) {
  Rng rng(seed);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    if (with_duplicates && i % 4 == 3) {
      c.points.push_back(c.points[i - 2]);
    } else {
      c.points.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
    }
    c.weights.push_back(rng.uniform(0.2, 1.0));
  }
  return c;
}

DiscreteMeasure segment(std::size_t n, double sigma = 0.0, std::uint64_t seed = 0) {
  GeneratorSpec spec;
  spec.variant = SegmentParams{};
  spec.n_points = n;
  spec.noise_sigma = sigma;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST_CASE("exact triple sums match the brute-force oracle") {
  for (bool dup : {false, true}) {
    const Cloud c = random_cloud(40, dup ? 2 : 1, dup);
    const DiscreteMeasure mu = c.measure();
    for (int n = 1; n <= 3; ++n) {
      const double expect = static_cast<double>(oracle::brute_triple_sum(
          c.points, c.weights, [n](Point2 a, Point2 b, Point2 d) { return oracle::permutation(n, a, b, d); }));
      CHECK(triple_sum(KernelId::coordinate_power(n), mu).value == doctest::Approx(expect).epsilon(1e-11));
    }
    const double c2 = static_cast<double>(oracle::brute_triple_sum(c.points, c.weights, oracle::curvature_squared));
    CHECK(curvature_triple_sum(mu).value == doctest::Approx(c2).epsilon(1e-11));
  }
}

TEST_CASE("triangle of unit atoms") {
  const DiscreteMeasure mu = build_measure({{0, 0}, {1, 0}, {0, 1}}, {1, 1, 1});
  const SumEstimate p = triple_sum(KernelId::coordinate_power(1), mu);
  CHECK(p.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.n_terms == 1);
  CHECK_FALSE(p.std_error.has_value());
  CHECK(curvature_triple_sum(mu).value == doctest::Approx(2.0));
}

TEST_CASE("filters match the oracle with the same filters") {
  const Cloud c = random_cloud(35, 4);
  const DiscreteMeasure mu = c.measure();
  const auto sides = [](Point2 a, Point2 b, Point2 d) {
    const double s[3] = {distance(a, b), distance(b, d), distance(a, d)};
    return std::pair{std::min({s[0], s[1], s[2]}), std::max({s[0], s[1], s[2]})};
  };
  TripleSumOptions tau;
  tau.tau_restrict = 3.0;
  const double expect_tau = static_cast<double>(oracle::brute_triple_sum(c.points, c.weights, [&](Point2 a, Point2 b, Point2 d) {
    const auto [lo, hi] = sides(a, b, d);
    return hi <= 3.0 * lo ? oracle::permutation(1, a, b, d) : 0.0L;
  }));
  CHECK(triple_sum(KernelId::coordinate_power(1), mu, tau).value == doctest::Approx(expect_tau).epsilon(1e-11));

  TripleSumOptions eps;
  eps.eps_truncate = 0.2;
  const double expect_eps = static_cast<double>(oracle::brute_triple_sum(c.points, c.weights, [&](Point2 a, Point2 b, Point2 d) {
    return sides(a, b, d).first >= 0.2 ? oracle::curvature_squared(a, b, d) : 0.0L;
  }));
  CHECK(curvature_triple_sum(mu, eps).value == doctest::Approx(expect_eps).epsilon(1e-11));

  TripleSumOptions bad;
  bad.tau_restrict = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pointwise sums give six times the triple sum") {
  const DiscreteMeasure mu = random_cloud(25, 5).measure();
  const KernelId k = KernelId::coordinate_power(2);
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) total += mu.weight(i) * pointwise_permutation(k, mu, mu.point(i));
  CHECK(total == doctest::Approx(6 * triple_sum(k, mu).value).epsilon(1e-11));
}

TEST_CASE("monte carlo is seeded and roughly unbiased") {
  const DiscreteMeasure mu = random_cloud(30, 6).measure();
  const KernelId k = KernelId::coordinate_power(1);
  const SumEstimate a = triple_sum_montecarlo(k, mu, {}, 50000, 7);
  const SumEstimate b = triple_sum_montecarlo(k, mu, {}, 50000, 7);
  CHECK(a.value == b.value);
  REQUIRE(a.std_error.has_value());
  CHECK(std::abs(a.value - triple_sum(k, mu).value) <= 5 * *a.std_error);
  CHECK(a.method == SumMethod::MonteCarlo);
}

TEST_CASE("best line and beta numbers") {
  const DiscreteMeasure flat = segment(100);
  const BestLine bl = best_line(flat, Ball{{0.5, 0}, 0.25});
  CHECK(bl.beta2 == 0.0);
  CHECK(bl.beta1 == 0.0);
  CHECK(std::sin(bl.line.theta) == doctest::Approx(0.0));

  // doubling the weights doubles beta_1 and multiplies beta_2 by sqrt(2)
  const DiscreteMeasure noisy = segment(200, 0.05, 3);
  std::vector<double> w2(noisy.weights().begin(), noisy.weights().end());
  for (double& w : w2) w *= 2;
  const DiscreteMeasure doubled =
      build_measure(std::vector<Point2>(noisy.points().begin(), noisy.points().end()), w2);
  const Ball b{{0.5, 0}, 0.2};
  const Line l = best_line(noisy, b).line;
  CHECK(beta_wrt_line(doubled, b, l, 2.0, 1) == doctest::Approx(2 * beta_wrt_line(noisy, b, l, 2.0, 1)));
  CHECK(beta_wrt_line(doubled, b, l, 2.0, 2) ==
        doctest::Approx(std::sqrt(2.0) * beta_wrt_line(noisy, b, l, 2.0, 2)));

  // no line from a fine angular sweep through the centroid beats the best beta_2
  const DiscreteMeasure cloud = random_cloud(80, 9).measure();
  const Ball cb{{0.5, 0.5}, 0.3};
  const BestLine best = best_line(cloud, cb);
  for (int i = 0; i < 1024; ++i) {
    const Line cand(best.line.anchor, std::numbers::pi * i / 1024);
    CHECK(beta_wrt_line(cloud, cb, cand, 2.0, 2) >= best.beta2 - 1e-9);
  }

  const BestLine refined = refine_beta1_line(cloud, cb);
  CHECK(refined.beta1 <= best.beta1 + 1e-15);
}

TEST_CASE("truncated cauchy residual on a segment tends to pi^2/3 of the mass") {
  // the continuum limit of the left-hand side is the integral of log^2((1-x)/x) over [0,1]
  double previous = 0.0;
  for (std::size_t n : {100, 400, 1600}) {
    const MvResidual r = mv_identity_residual(segment(n), 4.0 / n);
    CHECK(r.rhs == doctest::Approx(0.0));
    CHECK(r.lhs > previous);
    CHECK(r.lhs < std::numbers::pi * std::numbers::pi / 3);
    previous = r.lhs;
  }
  CHECK(previous == doctest::Approx(std::numbers::pi * std::numbers::pi / 3).epsilon(0.1));
}

TEST_CASE("spearman") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 8, 16, 32};
  const std::vector<double> down{5, 4, 3, 2, 1};
  const std::vector<double> tie{1, 1, 2, 2, 3};
  CHECK(spearman(a, up) == doctest::Approx(1.0));
  CHECK(spearman(a, down) == doctest::Approx(-1.0));
  CHECK(spearman(a, tie) == doctest::Approx(0.9486832980505138));
}

TEST_CASE("sweep csv") {
  const std::vector<SweepRow> rows{{0.5, 1.25, std::nullopt}, {1.0, 2.0, 0.125}};
  CHECK(sweep_to_csv(rows) == "parameter,value,stderr\n0.5,1.25,\n1,2,0.125\n");
}
