// Copyright 2026 The zrplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace zrp {

/// Number of worker threads to use when the caller passes workers <= 0.
inline int default_workers() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Serial reference: results[i] = task(i) in index order.
template <class Result, class Task>
std::vector<Result> run_replicas_serial(std::size_t count, Task&& task) {
  std::vector<Result> results;
  results.reserve(count);
  for (std::size_t i = 0; i < count; ++i) results.push_back(task(i));
  return results;
}

/// OpenMP replica pool. Each task must depend only on its index (seed it
/// with derive_seed(root, i)); results land in index order, so the output
/// is identical to run_replicas_serial for any worker count. The first
/// exception thrown by a task is rethrown after the loop.
template <class Result, class Task>
std::vector<Result> run_replicas(std::size_t count, Task&& task, int workers = 0) {
  if (workers <= 0) workers = default_workers();
  if (workers == 1 || count < 2) return run_replicas_serial<Result>(count, task);
  std::vector<Result> results(count);
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = task(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace zrp
