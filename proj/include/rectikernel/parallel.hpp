#pragma once

// Deterministic parallel reductions.
//
// Work is cut into blocks whose boundaries depend only on the problem size,
// never on the worker count. Each block produces one partial; partials are
// combined in block order with compensated summation. The result is
// therefore bit-identical for any number of workers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rectikernel {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated sum of a span, in index order.
[[nodiscard]] double compensated_sum(std::span<const double> values);

/// Number of workers: RECTIKERNEL_THREADS if set, else hardware concurrency.
/// An explicit override (set_worker_count) takes precedence.
[[nodiscard]] int worker_count();

/// 0 clears the override.
void set_worker_count(int n);

/// Runs task(b) for b in [0, n_blocks) on up to worker_count() threads.
/// Blocks are handed out dynamically; task must write only to its own slot.
void parallel_for_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& task);

/// Evaluates partial(b) for every block and returns the compensated sum of the
/// partials in block order.
[[nodiscard]] double parallel_block_sum(std::size_t n_blocks,
                                        const std::function<double(std::size_t)>& partial);

/// SplitMix64 step; used to derive independent per-block seeds.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rectikernel
