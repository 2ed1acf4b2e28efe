#pragma once

// skglass: replica-parallel map and mergeable running statistics.
//
// Replicas are independent work items; every result slot is written exactly
// once, and reductions always run sequentially in replica-index order, so
// outputs are identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace skglass {

// Chan-mergeable running mean / second central moment.
struct WelfordAccumulator {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const WelfordAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / total;
    mean += delta * static_cast<double>(other.count) / total;
    count += other.count;
  }

  double sample_variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }

  // stderr of the mean: sample std / sqrt(count)
  double stderr_of_mean() const {
    return count > 1 ? std::sqrt(sample_variance() /
                                 static_cast<double>(count))
                     : 0.0;
  }
};

// Runs fn(i) for i in [0, count) on `jobs` threads (serial when jobs <= 1).
// The first exception, if any, is rethrown on the calling thread.
template <class Fn>
void parallel_for(int jobs, std::int64_t count, Fn&& fn) {
  if (count <= 0) return;
  if (jobs > count) jobs = static_cast<int>(count);
  if (jobs <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace skglass
