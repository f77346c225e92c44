#include "rectikernel/io.hpp"
#include "rectikernel/rng.hpp"

#include <doctest.h>

#include <filesystem>
#include <stdexcept>

using namespace rectikernel;

TEST_CASE("csv round trip is exact") {
  Rng rng(8);
  std::vector<Point2> p;
  std::vector<double> w;
  for (int i = 0; i < 100; ++i) {
    p.push_back({rng.uniform(-1, 1) * 1e-7, rng.uniform(-1, 1) * 1e9});
    w.push_back(rng.uniform(0, 1) / 3);
  }
  const DiscreteMeasure mu = build_measure(p, w);
  const DiscreteMeasure back = measure_from_csv(measure_to_csv(mu));
  REQUIRE(back.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(back.point(i) == mu.point(i));
    CHECK(back.weight(i) == mu.weight(i));
  }
  CHECK(measure_to_csv(back) == measure_to_csv(mu));
}

TEST_CASE("malformed csv") {
  CHECK_THROWS_AS((void)measure_from_csv(""), IoError);
  CHECK_THROWS_AS((void)measure_from_csv("a,b,c\n1,2,3\n"), IoError);
  CHECK_THROWS_AS((void)measure_from_csv("x,y,w\n1,2\n"), IoError);
  CHECK_THROWS_AS((void)measure_from_csv("x,y,w\n1,two,3\n"), IoError);
  CHECK_THROWS_AS((void)measure_from_csv("x,y,w\n1,2,-3\n"), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
  GeneratorSpec spec;
  LipschitzGraphParams g;
  g.slope = 0.3;
  g.frequencies = {1, 3};
  spec.variant = g;
  spec.n_points = 77;
  spec.seed = 12;
  spec.noise_sigma = 0.02;
  const GeneratorSpec back = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(back) == spec_to_json(spec));
  CHECK(back.variant_name() == "lipschitz_graph");

  CHECK_THROWS_AS((void)spec_from_json({{"variant", "nope"}}), std::invalid_argument);
  CHECK_THROWS_AS((void)spec_from_json({{"variant", "segment"}, {"n_points", "many"}}), std::invalid_argument);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "rectikernel_io_test";
  std::filesystem::create_directories(dir);
  const DiscreteMeasure mu = build_measure({{0, 0}, {1, 2}}, {0.5, 0.25});
  save_measure(mu, dir / "m.csv");
  CHECK(load_measure(dir / "m.csv").weight(1) == 0.25);
  CHECK_THROWS_AS((void)load_measure(dir / "missing.csv"), IoError);
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
  std::filesystem::remove_all(dir);
}
