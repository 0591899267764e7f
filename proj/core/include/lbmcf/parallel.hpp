#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lbmcf {

/// Name of the environment variable that selects the worker count.
inline constexpr const char* kWorkerEnvVar = "LBMCF_THREADS";

/// Number of workers used by parallel_for. Resolution order: the value set by
/// set_worker_count (if positive), then LBMCF_THREADS, then all hardware cores.
int worker_count();

/// Overrides the worker count for the whole process. Pass 0 to fall back to the
/// environment/default resolution.
void set_worker_count(int workers);

/// Calls body(begin, end) over a partition of [0, n). Partitions are disjoint;
/// the body must only write to indices inside its own range. No worker is
/// given fewer than min_chunk indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 4096);

/// Block size used by the deterministic reductions. Independent of the worker
/// count, so sums are bit-identical however many workers run them.
inline constexpr std::size_t kReductionBlock = 1024;

/// Sum of term(i) for i in [0, n). Each fixed block is summed sequentially with
/// compensated (Neumaier) summation, then the block partials are combined the
/// same way in index order.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Maximum of term(i) over [0, n); returns -inf for n == 0.
double deterministic_max(std::size_t n, const std::function<double(std::size_t)>& term);

/// Pairwise (cascade) summation of a span in index order.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace lbmcf
