#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace smca {

/// Runs sampler(0), sampler(1), ... and hands the results to consume in
/// ascending index order until consume returns false. With threads > 1 the
/// samples are produced concurrently but consumed in exactly the same
/// order, and each sample depends only on its own index, so the outcome is
/// identical to the single-threaded run. Workers race at most `window`
/// indices ahead of the consumer; samples computed past the stopping point
/// are discarded.
template <typename Sampler, typename Consumer>
void sample_ordered(unsigned threads, Sampler&& sampler, Consumer&& consume) {
    using Sample = decltype(sampler(std::uint64_t{0}));

    if (threads <= 1) {
        for (std::uint64_t idx = 0;; ++idx)
            if (!consume(idx, sampler(idx))) return;
    }

    const std::uint64_t window = std::uint64_t{threads} * 8;
    std::mutex mu;
    std::condition_variable produced, may_claim;
    std::map<std::uint64_t, Sample> buffer;
    std::uint64_t next_claim = 0;
    std::uint64_t consumed = 0;
    bool stop = false;
    std::exception_ptr failure;

    auto worker = [&] {
        while (true) {
            std::uint64_t idx;
            {
                std::unique_lock lock(mu);
                may_claim.wait(lock, [&] { return stop || next_claim < consumed + window; });
                if (stop) return;
                idx = next_claim++;
            }
            try {
                Sample s = sampler(idx);
                std::lock_guard lock(mu);
                buffer.emplace(idx, std::move(s));
                produced.notify_one();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                stop = true;
                produced.notify_one();
                may_claim.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);

    {
        std::unique_lock lock(mu);
        while (true) {
            produced.wait(lock, [&] { return stop || buffer.count(consumed) != 0; });
            if (stop) break;
            auto node = buffer.extract(consumed);
            lock.unlock();
            const bool more = consume(consumed, std::move(node.mapped()));
            lock.lock();
            ++consumed;
            may_claim.notify_all();
            if (!more) {
                stop = true;
                may_claim.notify_all();
                break;
            }
        }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace smca
