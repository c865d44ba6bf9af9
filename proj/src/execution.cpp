#include "muckfem/execution.hpp"

#include <atomic>

#include <omp.h>

namespace muckfem {

namespace {
std::atomic<Execution> g_default{Execution::Parallel};
}

Execution defaultExecution() { return g_default.load(); }
void setDefaultExecution(Execution exec) { g_default.store(exec); }

void setThreadCount(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int threadCount() { return omp_get_max_threads(); }

}  // namespace muckfem
