// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sphera::detail {

// Worker count: hardware concurrency capped by SPHERA_THREADS.
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPHERA_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Runs f(i) for i in [0, n). Each index must write only its own output slot;
// callers reduce the slots in index order so results do not depend on the thread count.
template <class F>
void parallel_for(std::size_t n, F&& f, std::size_t min_per_thread = 1) {
    unsigned nt = thread_count();
    if (nt <= 1 || n < 2 * min_per_thread) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n / min_per_thread));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Fixed-size blocks used by reductions over samples.
inline constexpr std::size_t reduction_block = 1024;

// Neumaier compensated sum.
class CompensatedSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace sphera::detail
