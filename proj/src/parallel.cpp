#include "mvb/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mvb::parallel {
namespace {

std::atomic<bool> g_enabled{true};

constexpr std::int64_t kLeafBlock = 128;

double pairwise_sum_fn(std::int64_t lo, std::int64_t hi,
                       const std::function<double(std::int64_t)>& term) {
  if (hi - lo <= kLeafBlock) {
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
    return acc;
  }
  const std::int64_t mid = lo + (hi - lo) / 2;
  return pairwise_sum_fn(lo, mid, term) + pairwise_sum_fn(mid, hi, term);
}

double pairwise_sum_ptr(const double* data, std::int64_t n,
                        std::int64_t stride) {
  if (n <= kLeafBlock) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) acc += data[i * stride];
    return acc;
  }
  const std::int64_t half = n / 2;
  return pairwise_sum_ptr(data, half, stride) +
         pairwise_sum_ptr(data + half * stride, n - half, stride);
}

}  // namespace

void set_enabled(bool enabled) { g_enabled.store(enabled); }

bool enabled() { return g_enabled.load(); }

int worker_count() {
#ifdef _OPENMP
  return enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t)>& body) {
  // Exceptions must not unwind across an OpenMP region; capture the first
  // one and rethrow after the loop (same contract on the serial path).
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto guarded = [&](std::int64_t i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
#ifdef _OPENMP
  if (enabled() && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      guarded(i);
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) guarded(i);
  }
#else
  for (std::int64_t i = 0; i < n; ++i) guarded(i);
#endif
  if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(std::int64_t n,
                    const std::function<double(std::int64_t)>& term) {
  return pairwise_sum_fn(0, n, term);
}

double pairwise_sum(const double* data, std::int64_t n, std::int64_t stride) {
  return pairwise_sum_ptr(data, n, stride);
}

}  // namespace mvb::parallel
