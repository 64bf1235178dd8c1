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

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace narrowcap {

/// Worker count for a request; 0 means hardware concurrency.
inline int thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

/// Runs fn(i) for 0 <= i < n on up to `threads` workers pulling chunks from a
/// shared counter. fn must write its result by index. The exception thrown
/// at the lowest index is rethrown after all workers finish.
template <typename F>
void parallel_for(int n, int threads, int chunk, F&& fn) {
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(std::max(n, 0)));
  auto worker = [&]() {
    for (;;) {
      const int begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const int end = std::min(n, begin + chunk);
      for (int i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }
  };
  const int t = std::clamp((n + chunk - 1) / chunk, 1, thread_count(threads));
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace narrowcap
