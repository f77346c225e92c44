#include "rectikernel/statistics.hpp"

#include "rectikernel/io.hpp"
#include "rectikernel/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

namespace rectikernel {

namespace {

enum class Integrand { Permutation, CurvatureSquared };

// Filters reduced to squared-distance thresholds.
struct Filters {
  std::optional<double> tau2;
  std::optional<double> eps2;
};

// The measure after region restriction, as flat arrays.
struct Cloud {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  Filters filters;

  [[nodiscard]] std::size_t size() const { return x.size(); }
};

Cloud prepare(const DiscreteMeasure& mu, const TripleSumOptions& opts) {
  opts.validate();
  std::optional<Ball> region = opts.region;
  std::optional<double> tau = opts.tau_restrict;
  if (opts.local_window) {
    region = Ball{opts.local_window->center, opts.local_window->scale};
    tau = tau ? std::min(*tau, opts.local_window->lambda) : opts.local_window->lambda;
  }
  std::vector<std::size_t> idx;
  if (region) {
    idx = mu.indices_in_ball(*region);
  } else {
    idx.resize(mu.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  }
  Cloud c;
  c.x.reserve(idx.size());
  c.y.reserve(idx.size());
  c.w.reserve(idx.size());
  for (std::size_t i : idx) {
    c.x.push_back(mu.point(i).x);
    c.y.push_back(mu.point(i).y);
    c.w.push_back(mu.weight(i));
  }
  if (tau) c.filters.tau2 = *tau * *tau;
  if (opts.eps_truncate) c.filters.eps2 = *opts.eps_truncate * *opts.eps_truncate;
  return c;
}

// Coincident atoms only ever enter through their summed weight, so the exact
// sums run on one atom per location (first occurrence order).
Cloud merge_coincident(Cloud c) {
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(c.x[a], c.y[a], a) < std::tie(c.x[b], c.y[b], b);
  });
  std::vector<std::size_t> owner(c.size());
  bool any = false;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const bool same = r > 0 && c.x[order[r]] == c.x[order[r - 1]] && c.y[order[r]] == c.y[order[r - 1]];
    owner[order[r]] = same ? owner[order[r - 1]] : order[r];
    any = any || same;
  }
  if (!any) return c;
  Cloud out;
  out.filters = c.filters;
  std::vector<CompensatedSum> mass;
  std::vector<std::size_t> slot(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (owner[i] == i) {
      slot[i] = out.x.size();
      out.x.push_back(c.x[i]);
      out.y.push_back(c.y[i]);
      mass.emplace_back();
    }
    mass[slot[owner[i]]].add(c.w[i]);
  }
  for (const CompensatedSum& m : mass) out.w.push_back(m.value());
  return out;
}

// Weighted integrand of one triple under the filters; nullopt when the
// triple is not admissible (coincident points or filtered out).
std::optional<double> triple_term(Integrand what, const KernelId& k, Point2 a, Point2 b, Point2 c,
                                  const Filters& f) {
  const Point2 ab = b - a;
  const Point2 ac = c - a;
  const Point2 bc = c - b;
  const double d_ab = norm2(ab);
  const double d_ac = norm2(ac);
  const double d_bc = norm2(bc);
  if (d_ab == 0.0 || d_ac == 0.0 || d_bc == 0.0) return std::nullopt;
  const double hi = std::max({d_ab, d_ac, d_bc});
  if (f.tau2 && hi > *f.tau2 * std::min({d_ab, d_ac, d_bc})) return std::nullopt;
  if (f.eps2 && (d_ab < *f.eps2 || d_ac < *f.eps2 || d_bc < *f.eps2)) return std::nullopt;
  if (what == Integrand::CurvatureSquared) {
    const double cr = cross(ab, ac);
    return 4.0 * cr * cr / (d_ab * d_ac * d_bc);
  }
  const double kab = kernel_eval(k, a - b);
  const double kac = kernel_eval(k, a - c);
  const double kbc = kernel_eval(k, b - c);
  return kab * (kac - kbc) + kac * kbc;
}

// ---------------------------------------------------------------------------
// Exact engine. Rows of the pairwise kernel and squared-distance matrices are
// streamed for each leading pair (i, j). The innermost loop over k is an
// explicit SIMD reduction; its lane order is fixed at compile time, so results
// do not depend on the worker count.

struct Matrices {
  std::size_t m = 0;
  bool coincident = false;   // some pair of points coincides
  std::vector<double> kern;  // kern[i*m+k] = K(z_i - z_k); 0 on coincident pairs
  std::vector<double> inv;   // 1 / |z_i - z_k|^2; 0 on coincident pairs
  std::vector<double> d2;    // squared distances; only built when filters need them
};

Matrices build_matrices(const Cloud& c, const KernelId* k) {
  Matrices mx;
  mx.m = c.size();
  const std::size_t m = mx.m;
  const bool need_d2 = c.filters.tau2 || c.filters.eps2;
  mx.inv.assign(m * m, 0.0);
  if (need_d2) mx.d2.assign(m * m, 0.0);
  if (k) mx.kern.assign(m * m, 0.0);
  std::vector<char> dup(m, 0);
  parallel_for_blocks(m, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = c.x[i] - c.x[j];
      const double dy = c.y[i] - c.y[j];
      const double r2 = dx * dx + dy * dy;
      if (need_d2) mx.d2[i * m + j] = r2;
      if (r2 > 0.0) {
        mx.inv[i * m + j] = 1.0 / r2;
        if (k) mx.kern[i * m + j] = kernel_eval(*k, {dx, dy});
      } else if (i != j) {
        dup[i] = 1;
      }
    }
  });
  mx.coincident = std::any_of(dup.begin(), dup.end(), [](char d) { return d != 0; });
  return mx;
}

// Sum over k in [k0, k1) for the leading pair (i, j), without the w_i w_j
// factor (and, for curvature, without 4 / |z_i - z_j|^2). Masks are applied
// as selects so the loop stays branch free; `count` gathers admissible
// triples only when some mask is active.
template <Integrand What, bool Tau, bool Eps, bool Dup>
double segment_sum(const Cloud& c, const Matrices& mx, std::size_t i, std::size_t j, std::size_t k0,
                   std::size_t k1, double& count) {
  constexpr bool kMasked = Tau || Eps || Dup;
  const std::size_t m = mx.m;
  const double* vi = &mx.inv[i * m];
  const double* vj = &mx.inv[j * m];
  const double* di = (Tau || Eps) ? &mx.d2[i * m] : nullptr;
  const double* dj = (Tau || Eps) ? &mx.d2[j * m] : nullptr;
  const double* ki = What == Integrand::Permutation ? &mx.kern[i * m] : nullptr;
  const double* kj = What == Integrand::Permutation ? &mx.kern[j * m] : nullptr;
  const double kij = What == Integrand::Permutation ? mx.kern[i * m + j] : 0.0;
  const double dij = (Tau || Eps) ? di[j] : 0.0;
  const double xi = c.x[i];
  const double yi = c.y[i];
  const double ux = c.x[j] - xi;
  const double uy = c.y[j] - yi;
  const double tau2 = Tau ? *c.filters.tau2 : 0.0;
  const double eps2 = Eps ? *c.filters.eps2 : 0.0;
  const double* xs = c.x.data();
  const double* ys = c.y.data();
  const double* ws = c.w.data();

  double row = 0.0;
  double n = 0.0;
#pragma omp simd reduction(+ : row, n)
  for (std::size_t k = k0; k < k1; ++k) {
    double v;
    if constexpr (What == Integrand::Permutation) {
      const double a = ki[k];
      const double b = kj[k];
      v = kij * (a - b) + a * b;
    } else {
      const double cr = ux * (ys[k] - yi) - uy * (xs[k] - xi);
      v = cr * cr * vi[k] * vj[k];
    }
    v *= ws[k];
    if constexpr (kMasked) {
      double one = 1.0;
      if constexpr (Dup) {
        one = vi[k] > 0.0 ? one : 0.0;
        one = vj[k] > 0.0 ? one : 0.0;
      }
      if constexpr (Tau) {
        const double dik = di[k];
        const double djk = dj[k];
        one = std::max(dij, std::max(dik, djk)) <= tau2 * std::min(dij, std::min(dik, djk)) ? one : 0.0;
      }
      if constexpr (Eps) {
        one = di[k] >= eps2 ? one : 0.0;
        one = dj[k] >= eps2 ? one : 0.0;
      }
      v = one > 0.0 ? v : 0.0;
      n += one;
    }
    row += v;
  }
  if constexpr (kMasked) count += n;
  return row;
}

// Tiles of kRowTile leading indices times kColTile trailing indices keep the
// streamed matrix rows in cache. Tile shapes are fixed, so the summation
// order depends only on the point count.
constexpr std::size_t kRowTile = 32;
constexpr std::size_t kColTile = 256;

template <Integrand What, bool Tau, bool Eps, bool Dup>
SumEstimate exact_engine(const Cloud& c, const Matrices& mx) {
  const std::size_t m = mx.m;
  const std::size_t n_tiles = (m + kRowTile - 1) / kRowTile;
  std::vector<double> partial(n_tiles, 0.0);
  std::vector<std::uint64_t> counts(n_tiles, 0);
  parallel_for_blocks(n_tiles, [&](std::size_t t) {
    const std::size_t i0 = t * kRowTile;
    const std::size_t i1 = std::min(m, i0 + kRowTile);
    std::array<CompensatedSum, kRowTile> sums{};
    double count = 0.0;
    for (std::size_t k0 = ((i0 + 2) / kColTile) * kColTile; k0 < m; k0 += kColTile) {
      const std::size_t k1 = std::min(m, k0 + kColTile);
      for (std::size_t j = i0 + 1; j + 1 < k1; ++j) {
        const std::size_t lo = std::max(k0, j + 1);
        for (std::size_t i = i0; i < std::min(i1, j); ++i) {
          if constexpr (Dup) {
            if (mx.inv[i * m + j] == 0.0) continue;
          }
          if constexpr (Eps) {
            if (mx.d2[i * m + j] < *c.filters.eps2) continue;
          }
          double scale = c.w[i] * c.w[j];
          if constexpr (What == Integrand::CurvatureSquared) scale *= 4.0 * mx.inv[i * m + j];
          sums[i - i0].add(scale * segment_sum<What, Tau, Eps, Dup>(c, mx, i, j, lo, k1, count));
        }
      }
    }
    CompensatedSum tile;
    for (std::size_t i = i0; i < i1; ++i) tile.add(sums[i - i0].value());
    partial[t] = tile.value();
    counts[t] = static_cast<std::uint64_t>(count);
  });
  SumEstimate out;
  out.value = compensated_sum(partial);
  if constexpr (Tau || Eps || Dup) {
    out.n_terms = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  } else {
    out.n_terms = static_cast<std::uint64_t>(m) * (m - 1) * (m - 2) / 6;
  }
  out.method = SumMethod::Exact;
  return out;
}

template <Integrand What, bool Tau, bool Eps>
SumEstimate dispatch_dup(const Cloud& c, const Matrices& mx) {
  return mx.coincident ? exact_engine<What, Tau, Eps, true>(c, mx) : exact_engine<What, Tau, Eps, false>(c, mx);
}

template <Integrand What>
SumEstimate dispatch_exact(const Cloud& c, const Matrices& mx) {
  const bool tau = c.filters.tau2.has_value();
  const bool eps = c.filters.eps2.has_value();
  if (tau && eps) return dispatch_dup<What, true, true>(c, mx);
  if (tau) return dispatch_dup<What, true, false>(c, mx);
  if (eps) return dispatch_dup<What, false, true>(c, mx);
  return dispatch_dup<What, false, false>(c, mx);
}

// ---------------------------------------------------------------------------
// Monte Carlo.

constexpr std::uint64_t kChunk = 4096;

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }
  std::size_t below(std::size_t m) {
    return static_cast<std::size_t>(next() % m);  // bias below m / 2^64
  }

 private:
  std::uint64_t state_;
};

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    n += 1.0;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
};

SumEstimate montecarlo(Integrand what, const KernelId& k, const DiscreteMeasure& mu, const TripleSumOptions& opts,
                       std::uint64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("montecarlo: n_samples must be >= 1");
  const Cloud c = prepare(mu, opts);
  const std::size_t m = c.size();
  SumEstimate out;
  out.method = SumMethod::MonteCarlo;
  out.n_terms = n_samples;
  out.std_error = 0.0;
  if (m < 3) return out;

  const std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(n_chunks);
  parallel_for_blocks(n_chunks, [&](std::size_t chunk) {
    Stream rng(splitmix64(seed) ^ splitmix64(chunk + 1));
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(n_samples, begin + kChunk);
    Moments mom;
    for (std::uint64_t s = begin; s < end; ++s) {
      std::size_t idx[3];
      do {
        idx[0] = rng.below(m);
        idx[1] = rng.below(m);
        idx[2] = rng.below(m);
      } while (idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2]);
      std::sort(idx, idx + 3);
      const Point2 a{c.x[idx[0]], c.y[idx[0]]};
      const Point2 b{c.x[idx[1]], c.y[idx[1]]};
      const Point2 d{c.x[idx[2]], c.y[idx[2]]};
      const auto v = triple_term(what, k, a, b, d, c.filters);
      mom.add(v ? *v * c.w[idx[0]] * c.w[idx[1]] * c.w[idx[2]] : 0.0);
    }
    parts[chunk] = mom;
  });
  Moments all;
  for (const Moments& p : parts) all.merge(p);

  const double md = static_cast<double>(m);
  const double triples = md * (md - 1.0) * (md - 2.0) / 6.0;
  out.value = triples * all.mean;
  const double var = all.n > 1.0 ? all.m2 / (all.n - 1.0) : 0.0;
  out.std_error = triples * std::sqrt(var / all.n);
  return out;
}

// Pointwise sums share the exact-engine conventions through triple_term.
const Filters kNoFilters{};

}  // namespace

void TripleSumOptions::validate() const {
  if (tau_restrict && !(*tau_restrict >= 1.0)) throw std::invalid_argument("tau_restrict must be >= 1");
  if (eps_truncate && !(*eps_truncate > 0.0)) throw std::invalid_argument("eps_truncate must be > 0");
  if (region && !(region->radius > 0.0)) throw std::invalid_argument("region radius must be > 0");
  if (region && local_window) throw std::invalid_argument("region and local_window are exclusive");
  if (local_window) {
    if (!(local_window->scale > 0.0)) throw std::invalid_argument("local_window scale must be > 0");
    if (!(local_window->lambda >= 1.0)) throw std::invalid_argument("local_window lambda must be >= 1");
  }
}

double truncated_transform(const KernelId& k, const DiscreteMeasure& mu, std::span<const double> f, Point2 z,
                           double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("truncated_transform: eps must be > 0");
  if (f.size() != mu.size()) throw std::invalid_argument("truncated_transform: f has wrong length");
  const double eps2 = eps * eps;
  CompensatedSum acc;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point2 d = z - mu.point(i);
    if (norm2(d) > eps2 && f[i] != 0.0) acc.add(kernel_eval(k, d) * f[i] * mu.weight(i));
  }
  return acc.value();
}

SumEstimate triple_sum(const KernelId& k, const DiscreteMeasure& mu, const TripleSumOptions& opts) {
  const Cloud c = merge_coincident(prepare(mu, opts));
  if (c.size() < 3) return {};
  const Matrices mx = build_matrices(c, &k);
  return dispatch_exact<Integrand::Permutation>(c, mx);
}

SumEstimate curvature_triple_sum(const DiscreteMeasure& mu, const TripleSumOptions& opts) {
  const Cloud c = merge_coincident(prepare(mu, opts));
  if (c.size() < 3) return {};
  const Matrices mx = build_matrices(c, nullptr);
  return dispatch_exact<Integrand::CurvatureSquared>(c, mx);
}

SumEstimate triple_sum_montecarlo(const KernelId& k, const DiscreteMeasure& mu, const TripleSumOptions& opts,
                                  std::uint64_t n_samples, std::uint64_t seed) {
  return montecarlo(Integrand::Permutation, k, mu, opts, n_samples, seed);
}

SumEstimate curvature_triple_sum_montecarlo(const DiscreteMeasure& mu, const TripleSumOptions& opts,
                                            std::uint64_t n_samples, std::uint64_t seed) {
  return montecarlo(Integrand::CurvatureSquared, KernelId{}, mu, opts, n_samples, seed);
}

double pointwise_permutation(const KernelId& k, const DiscreteMeasure& mu, Point2 z1) {
  CompensatedSum acc;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    for (std::size_t b = a + 1; b < mu.size(); ++b) {
      const auto v = triple_term(Integrand::Permutation, k, z1, mu.point(a), mu.point(b), kNoFilters);
      if (v) acc.add(2.0 * *v * mu.weight(a) * mu.weight(b));
    }
  }
  return acc.value();
}

double pair_permutation(const KernelId& k, const DiscreteMeasure& mu, Point2 z1, Point2 z2) {
  CompensatedSum acc;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const auto v = triple_term(Integrand::Permutation, k, z1, z2, mu.point(a), kNoFilters);
    if (v) acc.add(*v * mu.weight(a));
  }
  return acc.value();
}

double beta_wrt_line(const DiscreteMeasure& mu, const Ball& b, const Line& d, double k_dilate, int order) {
  if (!(k_dilate > 1.0)) throw std::invalid_argument("beta: k_dilate must be > 1");
  if (!(b.radius > 0.0)) throw std::invalid_argument("beta: radius must be > 0");
  if (order != 1 && order != 2) throw std::invalid_argument("beta: order must be 1 or 2");
  const double t = b.radius;
  CompensatedSum acc;
  for (std::size_t i : mu.indices_in_ball(b.dilate(k_dilate))) {
    const double r = d.distance(mu.point(i)) / t;
    acc.add((order == 1 ? r : r * r) * mu.weight(i));
  }
  const double s = acc.value() / t;
  return order == 1 ? s : std::sqrt(s);
}

namespace {

// Weighted total least squares line; `extra` rescales each point's weight.
Line fit_line(const DiscreteMeasure& mu, std::span<const std::size_t> idx, std::span<const double> extra) {
  CompensatedSum sw;
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const double w = mu.weight(idx[n]) * (extra.empty() ? 1.0 : extra[n]);
    sw.add(w);
    sx.add(w * mu.point(idx[n]).x);
    sy.add(w * mu.point(idx[n]).y);
  }
  const Point2 c{sx.value() / sw.value(), sy.value() / sw.value()};
  CompensatedSum sxx;
  CompensatedSum syy;
  CompensatedSum sxy;
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const double w = mu.weight(idx[n]) * (extra.empty() ? 1.0 : extra[n]);
    const Point2 d = mu.point(idx[n]) - c;
    sxx.add(w * d.x * d.x);
    syy.add(w * d.y * d.y);
    sxy.add(w * d.x * d.y);
  }
  return {c, 0.5 * std::atan2(2.0 * sxy.value(), sxx.value() - syy.value())};
}

}  // namespace

Line total_least_squares_line(const DiscreteMeasure& mu, std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("total_least_squares_line: no points");
  return fit_line(mu, indices, {});
}

BestLine best_line(const DiscreteMeasure& mu, const Ball& b, double k_dilate) {
  const auto idx = mu.indices_in_ball(b.dilate(k_dilate));
  if (idx.empty()) throw std::invalid_argument("best_line: dilated ball holds no point");
  BestLine out;
  out.line = fit_line(mu, idx, {});
  out.beta2 = beta_wrt_line(mu, b, out.line, k_dilate, 2);
  out.beta1 = beta_wrt_line(mu, b, out.line, k_dilate, 1);
  return out;
}

BestLine refine_beta1_line(const DiscreteMeasure& mu, const Ball& b, double k_dilate, int iterations) {
  BestLine best = best_line(mu, b, k_dilate);
  const auto idx = mu.indices_in_ball(b.dilate(k_dilate));
  const double floor = 1e-9 * b.radius;
  Line current = best.line;
  std::vector<double> extra(idx.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t n = 0; n < idx.size(); ++n)
      extra[n] = 1.0 / std::max(current.distance(mu.point(idx[n])), floor);
    current = fit_line(mu, idx, extra);
    const double b1 = beta_wrt_line(mu, b, current, k_dilate, 1);
    if (b1 < best.beta1) {
      best.line = current;
      best.beta1 = b1;
      best.beta2 = beta_wrt_line(mu, b, current, k_dilate, 2);
    }
  }
  return best;
}

MvResidual mv_identity_residual(const DiscreteMeasure& mu, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("mv_identity_residual: eps must be > 0");
  const double eps2 = eps * eps;
  const std::size_t n = mu.size();
  std::vector<double> per_point(n, 0.0);
  parallel_for_blocks(n, [&](std::size_t i) {
    CompensatedSum re;
    CompensatedSum im;
    const Point2 z = mu.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      const Point2 d = z - mu.point(j);
      const double r2 = norm2(d);
      if (r2 <= eps2) continue;
      // 1/(z - w) = conj(z - w) / |z - w|^2
      re.add(mu.weight(j) * d.x / r2);
      im.add(-mu.weight(j) * d.y / r2);
    }
    const double a = re.value();
    const double b = im.value();
    per_point[i] = (a * a + b * b) * mu.weight(i);
  });
  MvResidual out;
  out.lhs = compensated_sum(per_point);
  TripleSumOptions opts;
  opts.eps_truncate = eps;
  out.rhs = curvature_triple_sum(mu, opts).value;
  out.residual = out.lhs - out.rhs;
  return out;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t s = 0; s < order.size();) {
      std::size_t e = s;
      while (e + 1 < order.size() && v[order[e + 1]] == v[order[s]]) ++e;
      const double avg = 0.5 * static_cast<double>(s + e) + 1.0;
      for (std::size_t q = s; q <= e; ++q) r[order[q]] = avg;
      s = e + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

nlohmann::json to_json(const SumEstimate& e) {
  nlohmann::json j = {{"value", e.value},
                      {"n_terms", e.n_terms},
                      {"method", e.method == SumMethod::Exact ? "exact" : "montecarlo"}};
  j["stderr"] = e.std_error ? nlohmann::json(*e.std_error) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const TripleSumOptions& o) {
  nlohmann::json j = nlohmann::json::object();
  j["tau_restrict"] = o.tau_restrict ? nlohmann::json(*o.tau_restrict) : nlohmann::json(nullptr);
  j["eps_truncate"] = o.eps_truncate ? nlohmann::json(*o.eps_truncate) : nlohmann::json(nullptr);
  if (o.region) {
    j["region"] = {{"center", {o.region->center.x, o.region->center.y}}, {"radius", o.region->radius}};
  } else {
    j["region"] = nullptr;
  }
  if (o.local_window) {
    j["local_window"] = {{"center", {o.local_window->center.x, o.local_window->center.y}},
                         {"scale", o.local_window->scale},
                         {"lambda", o.local_window->lambda}};
  } else {
    j["local_window"] = nullptr;
  }
  return j;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  const auto fmt = [](double v) { return format_double(v); };
  std::string out = "parameter,value,stderr\n";
  for (const SweepRow& r : rows) {
    out += fmt(r.parameter) + "," + fmt(r.value) + "," + (r.std_error ? fmt(*r.std_error) : std::string()) + "\n";
  }
  return out;
}

}  // namespace rectikernel
