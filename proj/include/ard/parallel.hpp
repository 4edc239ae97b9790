// Copyright 2026 The ARD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARD__PARALLEL_HPP_
#define ARD__PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ard
{

/// Number of worker threads used by parallel_for. ARD_THREADS overrides the hardware count.
std::size_t worker_count();

namespace detail
{
inline thread_local bool in_parallel_region = false;
}

/// Calls fn(i) for every i in [0, n). Work is spread over worker threads; callers write
/// results into per-index slots so output never depends on scheduling. The exception of
/// the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn && fn)
{
  const std::size_t workers = detail::in_parallel_region ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto body = [&]() {
    const bool outer = detail::in_parallel_region;
    detail::in_parallel_region = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        detail::in_parallel_region = outer;
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) threads.emplace_back(body);
  body();
  for (auto & t : threads) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace ard

#endif  // ARD__PARALLEL_HPP_
