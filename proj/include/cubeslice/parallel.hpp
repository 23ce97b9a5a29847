#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace cubeslice {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Work is handed
/// out in fixed-size chunks; callers write results by index, so the outcome
/// never depends on scheduling. The first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (nthreads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= count) return;
          const std::size_t end = std::min(count, begin + kChunk);
          try {
            for (std::size_t i = begin; i < end; ++i) fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree-shaped) summation; the reduction order is a function of
/// the length only.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double std_error = 0.0;
  double second_moment = 0.0;
  std::size_t count = 0;
};

inline SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments m;
  m.count = values.size();
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  m.mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size()), dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = values[i] * values[i];
    dev[i] = (values[i] - m.mean) * (values[i] - m.mean);
  }
  m.second_moment = pairwise_sum(sq) / n;
  if (values.size() > 1) {
    m.variance = pairwise_sum(dev) / (n - 1.0);
    m.std_error = std::sqrt(m.variance / n);
  }
  return m;
}

/// Result of a Monte Carlo estimator.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

}  // namespace cubeslice
