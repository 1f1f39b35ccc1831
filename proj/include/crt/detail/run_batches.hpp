#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crt {

template <class Result, class Work>
std::vector<Result> run_batches(std::size_t samples, const RunOptions& options, Work work) {
    const std::vector<std::size_t> sizes = batch_sizes(samples, options.batch_size);
    std::vector<Result> results(sizes.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t b = next++; b < sizes.size(); b = next++) {
            try {
                Rng rng(options.seed, b);
                results[b] = work(b, sizes[b], rng);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = sizes.size();
            }
        }
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(sizes.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace crt
