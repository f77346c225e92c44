#include "rectikernel/verify.hpp"

#include "rectikernel/generators.hpp"
#include "rectikernel/kernels.hpp"
#include "rectikernel/measure.hpp"
#include "rectikernel/multiscale.hpp"
#include "rectikernel/parallel.hpp"
#include "rectikernel/rng.hpp"
#include "rectikernel/statistics.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rectikernel::verify {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Point2 uniform_point(Rng& rng) { return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}; }

Triple uniform_triple(Rng& rng) { return {uniform_point(rng), uniform_point(rng), uniform_point(rng)}; }

// Draws until `accept` holds; throws if the rejection rate is absurd.
Triple sample_triple(Rng& rng, const std::function<bool(const Triple&)>& accept) {
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const Triple t = uniform_triple(rng);
    if (pairwise_distinct(t) && accept(t)) return t;
  }
  throw std::runtime_error("sample_triple: acceptance region too small");
}

void check(SuiteResult& r, std::string name, bool ok, std::string detail, json data = json::object()) {
  r.assertions.push_back({std::move(name), ok, std::move(detail), std::move(data)});
}

// Restores the worker override on scope exit.
class WorkerScope {
 public:
  explicit WorkerScope(int n) { set_worker_count(n); }
  ~WorkerScope() { set_worker_count(0); }
  WorkerScope(const WorkerScope&) = delete;
  WorkerScope& operator=(const WorkerScope&) = delete;
};

// ---------------------------------------------------------------------------

void positivity(SuiteResult& r) {
  const auto t0 = Clock::now();
  Rng rng(101);
  for (int n = 1; n <= 3; ++n) {
    const KernelId k = KernelId::coordinate_power(n);
    double worst = 0.0;  // most negative p / term scale
    for (int s = 0; s < 100'000; ++s) {
      const Triple t = sample_triple(rng, [](const Triple&) { return true; });
      worst = std::min(worst, permutation_direct(k, t) / permutation_term_scale(k, t));
    }
    check(r, "nonnegative_n" + std::to_string(n), worst >= -1e-12,
          "min p/max|term| = " + fmt(worst) + " over 1e5 triples (bound -1e-12)", {{"min_relative", worst}});
  }
  for (int n = 1; n <= 3; ++n) {
    const KernelId k = KernelId::coordinate_power(n);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const Point2 a = uniform_point(rng);
      const double theta = rng.uniform(0.0, kPi);
      const Point2 d{std::cos(theta), std::sin(theta)};
      Triple t{a + rng.uniform(-1.0, 1.0) * d, a + rng.uniform(-1.0, 1.0) * d, a + rng.uniform(-1.0, 1.0) * d};
      if (!pairwise_distinct(t)) continue;
      worst = std::max(worst, std::abs(permutation_direct(k, t)) / permutation_term_scale(k, t));
    }
    check(r, "collinear_vanishing_n" + std::to_string(n), worst <= 1e-10,
          "max |p|/scale = " + fmt(worst) + " over 1e3 collinear triples (bound 1e-10)", {{"max_relative", worst}});
  }
  const double secs = seconds_since(t0);
  check(r, "runtime", secs < 10.0, fmt(secs) + " s (limit 10 s)", {{"seconds", secs}});
}

void factored(SuiteResult& r) {
  Rng rng(202);
  for (int n = 1; n <= 3; ++n) {
    const KernelId k = KernelId::coordinate_power(n);
    double worst = 0.0;
    for (int s = 0; s < 10'000; ++s) {
      const Triple t = sample_triple(rng, [](const Triple& q) { return normalized_area(q) >= 1e-6; });
      const double direct = permutation_direct(k, t);
      const double fact = permutation_factored(n, t.z2 - t.z1, t.z3 - t.z1);
      worst = std::max(worst, std::abs(fact - direct) / std::abs(direct));
    }
    check(r, "factored_equals_direct_n" + std::to_string(n), worst <= 1e-9,
          "max relative difference " + fmt(worst) + " over 1e4 triples (bound 1e-9)", {{"max_relative", worst}});
  }
}

void melnikov(SuiteResult& r) {
  Rng rng(303);
  double worst = 0.0;
  double worst_imag = 0.0;
  for (int s = 0; s < 10'000; ++s) {
    const Triple t = sample_triple(rng, [](const Triple& q) { return normalized_area(q) >= 1e-6; });
    const CauchySum cs = cauchy_permutation_sum(t);
    const double c2 = menger_curvature(t) * menger_curvature(t);
    worst = std::max(worst, std::abs(cs.real - c2) / c2);
    worst_imag = std::max(worst_imag, std::abs(cs.imag) / c2);
  }
  check(r, "cauchy_sum_equals_curvature_squared", worst <= 1e-9,
        "max relative difference " + fmt(worst) + " over 1e4 triples (bound 1e-9)", {{"max_relative", worst}});
  check(r, "imaginary_part_vanishes", worst_imag <= 1e-9, "max |imag|/c^2 = " + fmt(worst_imag),
        {{"max_relative", worst_imag}});
}

void huovinen(SuiteResult& r) {
  const auto w = find_negative_permutation(KernelId::huovinen(), 1'000'000, 404, -1e-6);
  if (!w) {
    check(r, "negative_witness", false, "no triple with normalized value <= -1e-6 in 1e6 samples");
    return;
  }
  const Triple& t = w->triple;
  check(r, "negative_witness", w->normalized_value <= -1e-6,
        "normalized value " + fmt(w->normalized_value) + " after " + std::to_string(w->samples_used) + " samples",
        {{"normalized_value", w->normalized_value},
         {"samples", w->samples_used},
         {"triple", {{t.z1.x, t.z1.y}, {t.z2.x, t.z2.y}, {t.z3.x, t.z3.y}}}});
}

void comparability(SuiteResult& r) {
  constexpr double kTau = 10.0;
  const auto admissible = [](const Triple& t) {
    return in_comparable_family(kTau, t) && vertical_angle_sum(t) >= kPi / 8.0 && normalized_area(t) >= 1e-4;
  };
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> minima;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(500 + seed);
      double lo = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 100'000; ++s) lo = std::min(lo, comparability_ratio(n, sample_triple(rng, admissible)));
      minima.push_back(lo);
    }
    const double lo = *std::min_element(minima.begin(), minima.end());
    const double hi = *std::max_element(minima.begin(), minima.end());
    const json data = {{"minima", minima}};
    check(r, "positive_min_n" + std::to_string(n), lo > 0.0, "min p/c^2 = " + fmt(lo), data);
    if (n == 1) {
      const double spread = (hi - lo) / hi;
      check(r, "stable_across_seeds_n1", spread <= 0.2, "spread of 5 seed minima " + fmt(spread) + " (bound 0.2)",
            data);
    }
  }
}

DiscreteMeasure random_cloud(std::size_t n, std::uint64_t seed, double width, double height) {
  Rng rng(seed);
  std::vector<Point2> pts(n);
  std::vector<double> ws(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {rng.uniform(0.0, width), rng.uniform(0.0, height)};
    ws[i] = rng.uniform(0.5, 1.5);
  }
  return build_measure(std::move(pts), std::move(ws));
}

void scaling(SuiteResult& r) {
  const DiscreteMeasure mu = random_cloud(50, 606, 3.0, 2.0);
  const double d = mu.bbox().diagonal();
  const DiscreteMeasure nu = renormalize(mu, d, {mu.bbox().min_x, mu.bbox().min_y});
  for (const KernelId& k : {KernelId::coordinate_power(1), KernelId::coordinate_power(2),
                            KernelId::coordinate_power(3), KernelId::huovinen()}) {
    const double a = triple_sum(k, mu).value;
    const double b = triple_sum(k, nu).value * d;
    const double rel = std::abs(a - b) / std::abs(a);
    check(r, "p_covariance_" + k.name(), rel <= 1e-9, "relative difference " + fmt(rel), {{"relative", rel}});
  }
  {
    const double a = curvature_triple_sum(mu).value;
    const double b = curvature_triple_sum(nu).value * d;
    const double rel = std::abs(a - b) / a;
    check(r, "c2_covariance", rel <= 1e-9, "relative difference " + fmt(rel), {{"relative", rel}});
  }
  std::vector<std::uint64_t> p_bits;
  std::vector<std::uint64_t> c_bits;
  for (int workers : {1, 2, 8}) {
    WorkerScope scope(workers);
    p_bits.push_back(std::bit_cast<std::uint64_t>(triple_sum(KernelId::coordinate_power(1), mu).value));
    c_bits.push_back(std::bit_cast<std::uint64_t>(curvature_triple_sum(mu).value));
  }
  const auto same = [](const std::vector<std::uint64_t>& v) {
    return std::all_of(v.begin(), v.end(), [&](std::uint64_t b) { return b == v.front(); });
  };
  check(r, "bit_identical_workers", same(p_bits) && same(c_bits), "p and c^2 bits across 1, 2, 8 workers");
}

void montecarlo(SuiteResult& r) {
  const KernelId k = KernelId::coordinate_power(1);
  for (std::uint64_t cloud = 1; cloud <= 3; ++cloud) {
    const DiscreteMeasure mu = random_cloud(12, 700 + cloud, 1.0, 1.0);
    const double exact = triple_sum(k, mu).value;
    constexpr int kSeeds = 10'000;
    constexpr std::uint64_t kSamples = 100;
    CompensatedSum mean;
    CompensatedSum var;
    for (int s = 0; s < kSeeds; ++s) {
      const SumEstimate e = triple_sum_montecarlo(k, mu, {}, kSamples, 1000 * cloud + s);
      mean.add(e.value / kSeeds);
      var.add(*e.std_error * *e.std_error / kSeeds);
    }
    const double combined = std::sqrt(var.value() / kSeeds);
    const double z = std::abs(mean.value() - exact) / combined;
    check(r, "unbiased_cloud" + std::to_string(cloud), z <= 3.0,
          "|mean - exact| = " + fmt(z) + " combined standard errors (bound 3)",
          {{"exact", exact}, {"mean", mean.value()}, {"combined_stderr", combined}});

    std::vector<double> se;
    for (std::uint64_t m : {1'000ULL, 10'000ULL, 100'000ULL})
      se.push_back(*triple_sum_montecarlo(k, mu, {}, m, 77 + cloud).std_error);
    const double r1 = se[1] * std::sqrt(10.0) / se[0];
    const double r2 = se[2] * std::sqrt(10.0) / se[1];
    check(r, "stderr_rate_cloud" + std::to_string(cloud), std::abs(r1 - 1.0) <= 0.15 && std::abs(r2 - 1.0) <= 0.15,
          "se ratios times sqrt(10): " + fmt(r1) + ", " + fmt(r2) + " (bound 1 +- 0.15)", {{"stderr", se}});
  }
}

void mv_residual(SuiteResult& r) {
  const auto t0 = Clock::now();
  json rows = json::array();
  double worst = 0.0;
  for (std::size_t n : {200, 500, 1000}) {
    GeneratorSpec spec;
    spec.variant = SegmentParams{};
    spec.n_points = n;
    const DiscreteMeasure mu = generate(spec);
    for (int k : {2, 4, 8, 16}) {
      const MvResidual m = mv_identity_residual(mu, k / static_cast<double>(n));
      const double ratio = std::abs(m.residual) / mu.total_mass();
      worst = std::max(worst, ratio);
      rows.push_back({{"n", n}, {"eps_times_n", k}, {"lhs", m.lhs}, {"rhs", m.rhs}, {"residual", m.residual}});
    }
  }
  check(r, "residual_bounded", worst <= kMvConstant,
        "max |lhs - rhs| / mu(C) = " + fmt(worst) + " (frozen C = " + fmt(kMvConstant) + ")", {{"grid", rows}});
  const double secs = seconds_since(t0);
  check(r, "runtime", secs < 120.0, fmt(secs) + " s (limit 120 s)", {{"seconds", secs}});
}

void beta_noise(SuiteResult& r) {
  const ParamsLedger params = ParamsLedger::desk();
  const Ball ball{{0.5, 0.0}, 0.25};
  std::vector<double> beta2;
  std::vector<double> p_tau;
  json rows = json::array();
  for (double sigma : {0.0, 0.01, 0.02, 0.05, 0.1}) {
    GeneratorSpec spec;
    spec.variant = SegmentParams{};
    spec.n_points = 400;
    spec.seed = 9;
    spec.noise_sigma = sigma;
    const DiscreteMeasure mu = generate(spec);
    const BestLine bl = best_line(mu, ball, params.k_dilate);
    TripleSumOptions opts;
    opts.region = ball.dilate(params.k_dilate);
    opts.tau_restrict = params.tau;
    const double p = triple_sum(KernelId::coordinate_power(1), mu, opts).value / mass_in_ball(mu, ball);
    beta2.push_back(bl.beta2);
    p_tau.push_back(p);
    rows.push_back({{"sigma", sigma}, {"beta2", bl.beta2}, {"p_tau_over_mass", p}});
  }
  check(r, "beta2_zero_without_noise", beta2.front() == 0.0, "beta2 at sigma 0 = " + fmt(beta2.front()),
        {{"sweep", rows}});
  check(r, "beta2_nondecreasing", std::is_sorted(beta2.begin(), beta2.end()), "beta2 along the sigma sweep",
        {{"beta2", beta2}});
  std::vector<double> beta2_sq(beta2.size());
  std::transform(beta2.begin(), beta2.end(), beta2_sq.begin(), [](double b) { return b * b; });
  const double rho = spearman(p_tau, beta2_sq);
  check(r, "spearman", rho >= 0.9, "Spearman(p_tau/mu(B), beta2^2) = " + fmt(rho) + " (bound 0.9)",
        {{"rho", rho}});
}

void discrimination(SuiteResult& r) {
  const auto t0 = Clock::now();
  const ParamsLedger params = ParamsLedger::desk();
  const VerdictThresholds thresholds;

  json graph_rows = json::array();
  double min_cov = 1.0;
  double max_pack = 0.0;
  for (double slope : {0.2, 0.3, 0.4, 0.5}) {
    for (std::uint64_t seed : {1, 2}) {
      GeneratorSpec spec;
      LipschitzGraphParams g;
      g.slope = slope;
      spec.variant = g;
      spec.n_points = 4096;
      spec.seed = seed;
      ReportOptions opts;
      opts.triple_sums = false;
      const RectifiabilityReport rep = rectifiability_report(generate(spec), params, opts);
      min_cov = std::min(min_cov, rep.corona_coverage);
      max_pack = std::max(max_pack, rep.packing_per_generation);
      graph_rows.push_back({{"slope", slope},
                            {"seed", seed},
                            {"corona_coverage", rep.corona_coverage},
                            {"packing_per_generation", rep.packing_per_generation},
                            {"verdict", to_string(rep.verdict)}});
    }
  }
  check(r, "graph_coverage", min_cov >= thresholds.graph_coverage,
        "min corona coverage over slopes 0.2-0.5 = " + fmt(min_cov) + " (bound 0.9)", {{"graphs", graph_rows}});
  check(r, "graph_packing", max_pack <= thresholds.graph_packing,
        "max per-generation packing = " + fmt(max_pack) + " (frozen bound " + fmt(thresholds.graph_packing) + ")",
        {{"graphs", graph_rows}});

  std::vector<double> c2;
  std::vector<double> p1;
  std::vector<double> cov;
  json cantor_rows = json::array();
  bool dust = true;
  for (int depth = 2; depth <= 6; ++depth) {
    GeneratorSpec spec;
    spec.variant = CantorParams{depth};
    spec.n_points = 4096;
    ReportOptions opts;
    opts.kernels = {1};
    const RectifiabilityReport rep = rectifiability_report(generate(spec), params, opts);
    c2.push_back(rep.c2_normalized->value);
    p1.push_back(rep.p_normalized.front().second.value);
    cov.push_back(rep.corona_coverage);
    if (depth >= 5) dust = dust && rep.verdict == Verdict::DustLike;
    cantor_rows.push_back({{"depth", depth},
                           {"c2", c2.back()},
                           {"p1", p1.back()},
                           {"corona_coverage", rep.corona_coverage},
                           {"packing_per_generation", rep.packing_per_generation},
                           {"verdict", to_string(rep.verdict)}});
  }
  const auto strictly_increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  const auto strictly_decreasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
  };
  const json cantor = {{"cantor", cantor_rows}};
  check(r, "cantor_c2_increasing", strictly_increasing(c2), "normalized c^2 over depths 2-6", cantor);
  check(r, "cantor_p1_increasing", strictly_increasing(p1), "normalized p_1 over depths 2-6", cantor);
  check(r, "cantor_coverage_decreasing", strictly_decreasing(cov), "corona coverage over depths 2-6", cantor);
  check(r, "cantor_dust_verdict", dust, "verdict dust-like at depths 5 and 6", cantor);
  const double secs = seconds_since(t0);
  check(r, "runtime", secs < 300.0, fmt(secs) + " s (limit 300 s)", {{"seconds", secs}});
}

// One randomized instance for the structural suite.
DiscreteMeasure structure_instance(int i) {
  GeneratorSpec spec;
  spec.seed = static_cast<std::uint64_t>(i) + 1;
  spec.n_points = 300 + 20 * static_cast<std::size_t>(i);
  switch (i % 5) {
    case 0:
      spec.variant = SegmentParams{};
      spec.noise_sigma = 0.01;
      break;
    case 1: {
      LipschitzGraphParams g;
      g.slope = 0.2 + 0.05 * (i % 4);
      spec.variant = g;
      break;
    }
    case 2:
      spec.variant = CircleArcParams{};
      break;
    case 3:
      spec.variant = CantorParams{3};
      break;
    default:
      spec.variant = PolylineParams{{{0.0, 0.0}, {0.3, 0.2}, {0.6, 0.1}, {1.0, 0.4}}};
      break;
  }
  return normalize_measure(generate(spec));
}

void structure(SuiteResult& r) {
  const ParamsLedger params = ParamsLedger::desk();
  int cube_partition = 0;
  int region_partition = 0;
  int coherent = 0;
  int assigned = 0;
  int angles = 0;
  int lipschitz_d = 0;
  int fidelity = 0;
  int stopping_runs = 0;
  std::string failures;
  constexpr int kInstances = 20;
  for (int i = 0; i < kInstances; ++i) {
    const DiscreteMeasure mu = structure_instance(i);
    const std::size_t n = mu.size();
    const CubeLattice lat = build_cubes(mu, 0, 5, static_cast<std::uint64_t>(i) + 11);

    bool ok = true;
    for (int j = lat.j_min; j <= lat.j_max; ++j) {
      std::vector<std::size_t> all;
      CompensatedSum m;
      for (int id : lat.generation(j)) {
        all.insert(all.end(), lat.cubes[id].members.begin(), lat.cubes[id].members.end());
        m.add(lat.cubes[id].mass);
      }
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expect(n);
      std::iota(expect.begin(), expect.end(), std::size_t{0});
      ok = ok && all == expect && std::abs(m.value() - mu.total_mass()) <= 1e-12 * mu.total_mass();
    }
    cube_partition += ok;

    Corona corona = corona_decompose(lat, params);
    (void)classify_trees(corona, lat, params);
    ok = true;
    bool every = true;
    bool angle_ok = true;
    for (std::size_t c = 0; c < lat.cubes.size(); ++c) every = every && ((corona.tree_of[c] >= 0) == !corona.bad[c]);
    for (std::size_t t = 0; t < corona.trees.size(); ++t) {
      const Tree& tree = corona.trees[t];
      const Line& root_line = lat.cubes[tree.root].line;
      for (int q : tree.members) {
        for (int a = q; a != tree.root; a = lat.cubes[a].parent)
          ok = ok && a >= 0 && corona.tree_of[a] == static_cast<int>(t);
        angle_ok = angle_ok && angle_between(lat.cubes[q].line, root_line) <= tree.alpha;
      }
      for (int q : tree.stop_alpha) angle_ok = angle_ok && angle_between(lat.cubes[q].line, root_line) >= tree.alpha / 2;
    }
    coherent += ok;
    assigned += every;
    angles += angle_ok;

    const BoundingBox& bb = mu.bbox();
    const Point2 mid{0.5 * (bb.min_x + bb.max_x), 0.5 * (bb.min_y + bb.max_y)};
    std::size_t x0 = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (norm2(mu.point(k) - mid) < norm2(mu.point(x0) - mid)) x0 = k;
    const Line d0 = total_least_squares_line(mu, mu.indices_in_ball(Ball{mu.point(x0), 1.0}));
    StoppingTime st;
    try {
      st = stopping_time_region(mu, mu.point(x0), d0, params, lat);
    } catch (const std::invalid_argument&) {
      failures += " instance " + std::to_string(i) + ": top ball too sparse;";
      continue;
    }
    ++stopping_runs;
    CompensatedSum m;
    for (double v : st.region_mass) m.add(v);
    region_partition += st.region.size() == n && std::abs(m.value() - mu.total_mass()) <= 1e-12;

    Rng rng(900 + static_cast<std::uint64_t>(i));
    bool lip = true;
    if (!st.s.empty()) {
      for (int s = 0; s < 200; ++s) {
        const Point2 a{rng.uniform(bb.min_x, bb.max_x), rng.uniform(bb.min_y, bb.max_y)};
        const Point2 b{rng.uniform(bb.min_x, bb.max_x), rng.uniform(bb.min_y, bb.max_y)};
        lip = lip && std::abs(d_function(a, st.s) - d_function(b, st.s)) <= distance(a, b) * (1 + 1e-12) + 1e-15;
        const double pa = rng.uniform(-1.0, 1.0);
        const double pb = rng.uniform(-1.0, 1.0);
        lip = lip &&
              std::abs(D_function(pa, st.s, st.d0) - D_function(pb, st.s, st.d0)) <= std::abs(pa - pb) * (1 + 1e-12) + 1e-15;
      }
    }
    lipschitz_d += lip;

    bool faithful = true;
    if (st.region_mass[0] > 0.0) {
      try {
        const GraphFunction g = build_graph_function(mu, st, params);
        for (std::size_t k = 0; k < g.abscissae.size(); ++k) faithful = faithful && g.value(g.abscissae[k]) == g.ordinates[k];
        faithful = faithful && g.lipschitz_estimate <= g.slope_bound;
        if (!faithful)
          failures += " instance " + std::to_string(i) + ": graph slope " + fmt(g.lipschitz_estimate) + " > bound " +
                      fmt(g.slope_bound) + ";";
      } catch (const std::domain_error& e) {
        faithful = false;
        failures += " instance " + std::to_string(i) + ": " + e.what() + ";";
      }
    }
    fidelity += faithful;
  }
  const json data = {{"instances", kInstances}, {"stopping_time_runs", stopping_runs}, {"notes", failures}};
  const auto all = [&](int count, int of) { return count == of; };
  check(r, "cube_partition", all(cube_partition, kInstances), std::to_string(cube_partition) + "/20 instances", data);
  check(r, "region_partition", stopping_runs == kInstances && all(region_partition, stopping_runs),
        std::to_string(region_partition) + "/" + std::to_string(stopping_runs) + " stopping-time runs", data);
  check(r, "tree_coherence", all(coherent, kInstances), std::to_string(coherent) + "/20 instances", data);
  check(r, "good_cubes_in_one_tree", all(assigned, kInstances), std::to_string(assigned) + "/20 instances", data);
  check(r, "angle_control", all(angles, kInstances), std::to_string(angles) + "/20 instances", data);
  check(r, "d_and_D_lipschitz", all(lipschitz_d, stopping_runs), std::to_string(lipschitz_d) + " runs", data);
  check(r, "graph_fidelity", all(fidelity, stopping_runs), std::to_string(fidelity) + " runs" + failures, data);
}

struct Entry {
  const char* name;
  const char* title;
  void (*run)(SuiteResult&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"positivity", "Positivity of the permutation sums", positivity},
      {"factored", "Factored form equals direct sum", factored},
      {"melnikov", "Cauchy permutation identity", melnikov},
      {"huovinen", "Negative Huovinen permutation", huovinen},
      {"comparability", "Comparability with curvature", comparability},
      {"scaling", "Scaling covariance and thread determinism", scaling},
      {"montecarlo", "Monte Carlo soundness", montecarlo},
      {"mv-residual", "Truncated Cauchy transform residual", mv_residual},
      {"beta-noise", "Flatness versus local permutation mass", beta_noise},
      {"discrimination", "Graphs versus Cantor dust", discrimination},
      {"structure", "Structural invariants", structure},
  };
  return entries;
}

}  // namespace

bool SuiteResult::passed() const {
  return !assertions.empty() && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) {
    return a.passed;
  });
}

const Assertion* SuiteResult::first_failure() const {
  for (const Assertion& a : assertions)
    if (!a.passed) return &a;
  return nullptr;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Entry& e : registry()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

bool has_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SuiteResult run_suite(const std::string& name) {
  for (const Entry& e : registry()) {
    if (name != e.name) continue;
    SuiteResult r;
    r.suite = e.name;
    r.title = e.title;
    const auto t0 = Clock::now();
    try {
      e.run(r);
    } catch (const std::exception& ex) {
      check(r, "no_exception", false, ex.what());
    }
    r.seconds = seconds_since(t0);
    return r;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

std::vector<std::string> json_lines(const SuiteResult& r) {
  std::vector<std::string> out;
  for (const Assertion& a : r.assertions)
    out.push_back(json{{"suite", r.suite}, {"assertion", a.name}, {"passed", a.passed}, {"detail", a.detail},
                       {"data", a.data}}
                      .dump());
  return out;
}

}  // namespace rectikernel::verify
