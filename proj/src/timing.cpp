#include "sortscale/timing.hpp"

namespace sortscale {

double measure_timer_overhead_ns() {
    constexpr int kCalls = 4096;
    const std::uint64_t begin = monotonic_ns();
    std::uint64_t sink = 0;
    for (int i = 0; i < kCalls; ++i) sink ^= monotonic_ns();
    const std::uint64_t end = monotonic_ns();
    (void)sink;
    return static_cast<double>(end - begin) / kCalls;
}

}  // namespace sortscale
