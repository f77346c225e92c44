#include "rectikernel/generators.hpp"
#include "rectikernel/multiscale.hpp"
#include "rectikernel/statistics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

using namespace rectikernel;

namespace {

DiscreteMeasure make(const GeneratorSpec& spec) { return generate(spec); }

DiscreteMeasure segment(std::size_t n) {
  GeneratorSpec spec;
  spec.variant = SegmentParams{};
  spec.n_points = n;
  return make(spec);
}

DiscreteMeasure cantor(int depth, std::size_t n) {
  GeneratorSpec spec;
  spec.variant = CantorParams{depth};
  spec.n_points = n;
  return make(spec);
}

}  // namespace

TEST_CASE("parameter profiles") {
  const ParamsLedger desk = ParamsLedger::desk();
  CHECK_NOTHROW(desk.validate());
  CHECK(desk.violated_relations().empty());
  CHECK(ParamsLedger::from_name("desk").to_json() == desk.to_json());
  const ParamsLedger paper = ParamsLedger::paper_faithful();
  CHECK_FALSE(paper.violated_relations().empty());
  CHECK_THROWS_AS((void)ParamsLedger::from_name("fast"), std::invalid_argument);

  // lines near vertical get the large aperture
  CHECK(desk.alpha_for(Line({0, 0}, std::numbers::pi / 2)) == desk.alpha_big);
  CHECK(desk.alpha_for(Line({0, 0}, 0.0)) == desk.alpha_small);
}

TEST_CASE("segment lattice doubles per generation") {
  const DiscreteMeasure mu = segment(256);
  const CubeLattice lat = build_cubes(mu, 0, 3, 0);
  for (int j = 0; j <= 3; ++j) CHECK(lat.generation(j).size() == (std::size_t{1} << j));
  for (const Cube& q : lat.cubes) {
    CHECK(q.beta1 == doctest::Approx(0.0).scale(1.0));
    CHECK(q.mass == doctest::Approx(256.0 / (std::size_t{1} << q.generation) / 256.0));
    if (q.generation > 0) CHECK(lat.cubes[q.parent].generation == q.generation - 1);
  }
  CHECK_THROWS_AS((void)build_cubes(mu, 0, kMaxGenerationSpan + 1, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)build_cubes(mu, 3, 2, 0), std::invalid_argument);
}

TEST_CASE("dilated cube reaches two side lengths") {
  const DiscreteMeasure mu = segment(64);
  const CubeLattice lat = build_cubes(mu, 2, 2, 0);
  // generation 2 cube [0.25, 0.5): 3Q covers [-0.25, 1.0] on the segment
  for (int id : lat.generation(2)) {
    const Cube& q = lat.cubes[id];
    if (q.gx != 1) continue;
    CHECK(dilated_cube_members(lat, q).size() == 64 - 0);
    CHECK(dilated_cube_members(lat, q, 2.0).size() == 48);
  }
}

TEST_CASE("tree band sum over everything is six times the triple sum") {
  const DiscreteMeasure mu = cantor(2, 16);
  const CubeLattice lat = build_cubes(mu, 0, 2, 0);
  const int root = lat.generation(0).front();
  const KernelId k = KernelId::coordinate_power(1);
  CHECK(tree_p_sum(k, lat, root, 1e6) == doctest::Approx(6 * triple_sum(k, mu).value).epsilon(1e-11));
}

TEST_CASE("gamma of a kink") {
  for (double s : {0.1, 0.5, 2.0}) {
    GraphFunction g;
    g.base = Line({0, 0}, 0.0);
    g.abscissae = {-1, 0, 1};
    g.ordinates = {s, 0, s};
    CHECK(g.value(-0.5) == doctest::Approx(s / 2));
    CHECK(g.value(3.0) == doctest::Approx(s));
    CHECK(gamma_affine(g, 0.0, 0.5) == doctest::Approx(s / 2).epsilon(1e-9));
    CHECK(gamma_affine(g, 0.5, 0.25) == doctest::Approx(0.0).scale(1.0));
  }
  GraphFunction g;
  g.abscissae = {0, 1};
  g.ordinates = {0, 1};
  CHECK_THROWS_AS((void)gamma_affine(g, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("graph function from a graph-like point set") {
  const DiscreteMeasure mu = segment(50);
  std::vector<std::size_t> all(mu.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const GraphFunction g = build_graph_function(mu, all, Line({0, 0}, 0.0), 1.0);
  CHECK(g.accepted);
  CHECK(g.lipschitz_estimate == doctest::Approx(0.0).scale(1.0));
  for (std::size_t k = 0; k < g.abscissae.size(); ++k) CHECK(g.value(g.abscissae[k]) == g.ordinates[k]);

  const DiscreteMeasure vertical = build_measure({{0, 0}, {0, 1}}, {1, 1});
  const std::vector<std::size_t> both{0, 1};
  CHECK_THROWS_AS((void)build_graph_function(vertical, both, Line({0, 0}, 0.0), 1.0), std::domain_error);
}

TEST_CASE("d and D are 1-Lipschitz and vanish only on the stopped set") {
  const std::vector<ScaleBall> s{{0, {0, 0}, 0.5}, {1, {2, 0}, 0.1}};
  CHECK(d_function({0, 0}, s) == doctest::Approx(0.5));
  CHECK(d_function({2, 1}, s) == doctest::Approx(1.1));
  CHECK(D_function(2.0, s, Line({0, 0}, 0.0)) == doctest::Approx(0.1));
  for (double x = -1; x <= 3; x += 0.01) {
    CHECK(std::abs(d_function({x, 0.3}, s) - d_function({x + 0.01, 0.3}, s)) <= 0.01 + 1e-12);
  }
}

TEST_CASE("segment stopping time keeps everything in Z") {
  const DiscreteMeasure mu = normalize_measure(segment(400));
  const ParamsLedger params = ParamsLedger::desk();
  const CubeLattice lat = build_cubes(mu, 0, 4, 0);
  const StoppingTime st = stopping_time_region(mu, mu.point(200), Line({0, 0}, 0.0), params, lat);
  CHECK(st.region_mass[0] == doctest::Approx(mu.total_mass()));
  CHECK(st.region.size() == mu.size());
}

TEST_CASE("corona of a segment is a single unstopped tree") {
  // midpoint atoms stay inside [0, 1), so the top cube holds everything
  const DiscreteMeasure mu = segment(512);
  const ParamsLedger params = ParamsLedger::desk();
  const CubeLattice lat = build_cubes(mu, 0, 5, 0);
  Corona corona = corona_decompose(lat, params);
  REQUIRE(corona.trees.size() == 1);
  CHECK(corona.trees[0].members.size() == lat.cubes.size());
  CHECK(corona_coverage(lat, corona) == doctest::Approx(1.0));
  const TreeSummary summary = classify_trees(corona, lat, params);
  CHECK(summary.count[0] == 1);
  CHECK(weak_geometric_packing(lat, params.eps, lat.generation(0).front()) == 0.0);
}

TEST_CASE("verdicts") {
  const ParamsLedger params = ParamsLedger::desk();
  ReportOptions opts;
  opts.triple_sums = false;
  CHECK(rectifiability_report(segment(1024), params, opts).verdict == Verdict::GraphLike);
  CHECK(rectifiability_report(cantor(5, 1024), params, opts).verdict == Verdict::DustLike);

  // half the mass on a segment, half on dust
  const DiscreteMeasure seg = segment(1024);
  const DiscreteMeasure dust = cantor(5, 1024);
  std::vector<Point2> p;
  std::vector<double> w;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    p.push_back({seg.point(i).x * 0.5, seg.point(i).y});
    w.push_back(seg.weight(i) / seg.total_mass() / 2);
  }
  for (std::size_t i = 0; i < dust.size(); ++i) {
    p.push_back({dust.point(i).x * 0.5 + 0.5, dust.point(i).y * 0.5 + 0.25});
    w.push_back(dust.weight(i) / dust.total_mass() / 2);
  }
  CHECK(rectifiability_report(build_measure(p, w), params, opts).verdict == Verdict::Mixed);
}

TEST_CASE("report serialization") {
  const ParamsLedger params = ParamsLedger::desk();
  ReportOptions opts;
  opts.j_max = 4;
  const RectifiabilityReport r = rectifiability_report(segment(200), params, opts);
  const nlohmann::json j = to_json(r);
  CHECK(j.at("verdict") == "graph-like");
  CHECK(j.at("j_max") == 4);
  CHECK(j.contains("p_normalized"));
  CHECK(j.contains("c2_normalized"));

  const std::string csv = generations_to_csv(r.generations);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "generation,cubes,mean_beta1,packing,roots");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 5);
  CHECK(r.generations.size() == 5);
}
