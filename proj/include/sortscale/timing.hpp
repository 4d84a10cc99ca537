#pragma once

#include <chrono>
#include <cstdint>

namespace sortscale {

/// Per-phase time accumulated over the frames of a run, in nanoseconds.
/// The phases are exclusive slices of the per-frame update pipeline:
/// predict, associate, update-matched, spawn-new, and output prep plus
/// tracker lifecycle maintenance.
struct PhaseTimings {
    std::uint64_t t_predict = 0;
    std::uint64_t t_assign = 0;
    std::uint64_t t_update = 0;
    std::uint64_t t_spawn = 0;
    std::uint64_t t_output = 0;

    std::uint64_t sum() const { return t_predict + t_assign + t_update + t_spawn + t_output; }

    PhaseTimings& operator+=(const PhaseTimings& o) {
        t_predict += o.t_predict;
        t_assign += o.t_assign;
        t_update += o.t_update;
        t_spawn += o.t_spawn;
        t_output += o.t_output;
        return *this;
    }

    bool operator==(const PhaseTimings&) const = default;
};

inline std::uint64_t monotonic_ns() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

/// One frame's worth of phase samples plus the frame wall time, the raw
/// material of the timing-model fit.
struct FrameSample {
    double wall_ns = 0.0;
    double predict_ns = 0.0;
    double assign_ns = 0.0;
    double update_ns = 0.0;
    double spawn_ns = 0.0;
    double output_ns = 0.0;
};

/// Median cost of one monotonic_ns() call, measured at startup. Frame
/// times here are microseconds, so the report carries this next to them.
double measure_timer_overhead_ns();

}  // namespace sortscale
