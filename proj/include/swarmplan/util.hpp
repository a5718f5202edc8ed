#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace swarmplan {

// Wall-clock stopwatch for per-stage timing.
class Timer {
public:
    Timer() : start_(Clock::now()) {}
    void reset() { start_ = Clock::now(); }
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }

private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_;
};

// Uniform double in [lo, hi) built from two engine draws.
// std::uniform_real_distribution is implementation-defined, so seeds would not
// reproduce across standard libraries; this construction is exact everywhere.
inline double uniformReal(std::mt19937& rng, double lo, double hi) {
    const std::uint64_t a = rng();
    const std::uint64_t b = rng();
    const std::uint64_t mantissa = ((a << 32) | b) >> 11;  // 53 bits
    return lo + (hi - lo) * (static_cast<double>(mantissa) * 0x1.0p-53);
}

// Uniform integer in [lo, hi], inclusive.
inline int uniformInt(std::mt19937& rng, int lo, int hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t a = rng();
    const std::uint64_t b = rng();
    return lo + static_cast<int>(((a << 32) | b) % range);
}

inline int resolveWorkerCount(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 4 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
// written to per-index slots; iteration order across threads is unspecified.
inline void parallelFor(int n, int workers, const std::function<void(int)>& fn) {
    workers = resolveWorkerCount(workers);
    if (n <= 0) return;
    if (workers <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min(workers, n);
    pool.reserve(k);
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace swarmplan
