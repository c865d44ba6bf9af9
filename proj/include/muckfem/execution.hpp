#pragma once

#include <exception>
#include <mutex>
#include <numeric>
#include <vector>

namespace muckfem {

/// Serial is the reference path; Parallel runs the same per-index work under
/// OpenMP. Results are written per index and reduced in index order, so both
/// paths give bit-identical answers.
enum class Execution { Serial, Parallel };

Execution defaultExecution();
void setDefaultExecution(Execution exec);
/// Thread count for Parallel; <= 0 keeps the OpenMP default.
void setThreadCount(int n);
int threadCount();

template <class F>
void forEachIndex(int n, Execution exec, F&& body) {
  if (exec == Execution::Serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

inline double orderedSum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace muckfem
