// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vicert {

// Runs f(i) for i in [0, count) across worker threads with a static block
// partition.  Results must be written to per-index slots so the outcome is
// independent of the schedule; the first worker exception is rethrown.
template <class F>
void parallel_for(int count, F&& f, unsigned num_threads = 0) {
  if (count <= 0) return;
  unsigned hw = num_threads ? num_threads : std::thread::hardware_concurrency();
  if (hw < 1) hw = 1;
  const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      const int begin = static_cast<int>(static_cast<long long>(count) * w / workers);
      const int end = static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
      try {
        for (int i = begin; i < end; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vicert
