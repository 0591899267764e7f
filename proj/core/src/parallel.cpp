#include "lbmcf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace lbmcf {

namespace {

std::atomic<int> g_override{0};

int env_workers() {
  if (const char* raw = std::getenv(kWorkerEnvVar)) {
    try {
      const int parsed = std::stoi(raw);
      if (parsed > 0) return parsed;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int worker_count() {
  const int forced = g_override.load(std::memory_order_relaxed);
  return forced > 0 ? forced : env_workers();
}

void set_worker_count(int workers) { g_override.store(std::max(0, workers)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
  if (n == 0) return;
  const std::size_t max_workers = std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk));
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), max_workers);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(n, chunk));
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<CompensatedSum> partial(blocks);
  parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t begin = b * kReductionBlock;
      const std::size_t end = std::min(n, begin + kReductionBlock);
      CompensatedSum acc;
      for (std::size_t i = begin; i < end; ++i) acc.add(term(i));
      partial[b] = acc;
    }
  }, 4);
  CompensatedSum total;
  for (const CompensatedSum& p : partial) {
    total.add(p.sum);
    total.add(p.comp);
  }
  return total.value();
}

double deterministic_max(std::size_t n, const std::function<double(std::size_t)>& term) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, term(i));
  return best;
}

}  // namespace lbmcf
