// parallel.hpp — ordered chunk execution.
//
// Work is split into fixed chunks that workers pick up dynamically; each
// chunk's result is merged exactly once, in ascending chunk order, so the
// combined output is bit-identical for any worker count.

#pragma once

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace bhc::detail {

template <class Result, class Compute, class Merge>
void ordered_chunk_run(long n_chunks, int workers, Compute compute, Merge merge) {
    if (n_chunks <= 0) return;
    if (workers <= 1) {
        for (long c = 0; c < n_chunks; ++c) merge(c, compute(c));
        return;
    }

    std::atomic<long> next_chunk{0};
    std::mutex mu;
    std::map<long, Result> pending;
    long next_to_merge = 0;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            const long c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            Result r;
            try {
                r = compute(c);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first_error) first_error = std::current_exception();
                next_chunk.store(n_chunks);  // stop handing out work
                return;
            }
            std::lock_guard lock(mu);
            if (first_error) return;
            pending.emplace(c, std::move(r));
            while (!pending.empty() && pending.begin()->first == next_to_merge) {
                merge(next_to_merge, std::move(pending.begin()->second));
                pending.erase(pending.begin());
                ++next_to_merge;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bhc::detail
