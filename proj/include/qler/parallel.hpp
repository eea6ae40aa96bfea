// Copyright 2026 The qler Authors
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

#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qler {

/// Splits [first, last) into contiguous chunks, one per worker, and runs
/// fn(chunk_first, chunk_last, worker_index) concurrently. With threads <= 1
/// (or a tiny range) it runs inline. The first exception thrown by any worker
/// is rethrown after all workers join.
template <typename Fn>
void parallel_for_range(std::uint64_t first, std::uint64_t last, int threads, Fn&& fn) {
    std::uint64_t count = last > first ? last - first : 0;
    if (count == 0) {
        return;
    }
    std::uint64_t workers = threads > 1 ? static_cast<std::uint64_t>(threads) : 1;
    if (workers > count) {
        workers = count;
    }
    if (workers == 1) {
        fn(first, last, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::uint64_t chunk = count / workers;
    std::uint64_t extra = count % workers;
    std::uint64_t begin = first;
    for (std::uint64_t t = 0; t < workers; ++t) {
        std::uint64_t end = begin + chunk + (t < extra ? 1 : 0);
        pool.emplace_back([&fn, &errors, begin, end, t]() {
            try {
                fn(begin, end, static_cast<int>(t));
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
        begin = end;
    }
    for (std::thread& th : pool) {
        th.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace qler
