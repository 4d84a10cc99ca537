#pragma once

#include <optional>
#include <stdexcept>

#include "sortscale/bbox.hpp"
#include "sortscale/smallmat.hpp"

namespace sortscale {

/// Degenerate bounding box (zero or negative extent).
struct InvalidBoxError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Filter state can no longer be mapped back to a box (s*r <= 0); the
/// owning track should be discarded.
struct InvalidStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Innovation covariance lost positive definiteness; the filter diverged
/// and the owning track should be discarded.
struct FilterDivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// State vector layout: [cx, cy, s, r, vcx, vcy, vs] where s is the box
/// area, r the aspect ratio (constant under the motion model), and the
/// last three entries the center/area velocities.
inline constexpr int kStateDim = 7;
inline constexpr int kObsDim = 4;

/// Constant model matrices of the filter. F and H are fixed by the
/// constant-velocity formulation; Q and R are tunable noise levels.
/// The control pair (B, u) is carried for completeness but absent in the
/// tracking pipeline.
struct KalmanModel {
    Mat F;  // 7x7 state transition
    Mat H;  // 4x7 observation map [I4 | 0]
    Mat Q;  // 7x7 process noise
    Mat R;  // 4x4 observation noise
    std::optional<Mat> B;  // 7x4 control gain
    std::optional<Vec> u;  // 4 control input

    /// The constant-velocity model used by the tracker, with the public
    /// SORT noise convention.
    static KalmanModel constant_velocity();

    /// Initial covariance for a freshly seeded track: moderate position
    /// uncertainty, inflated variance on the unobservable velocities.
    static Mat initial_covariance();
};

struct KalmanState {
    Vec x;  // 7
    Mat P;  // 7x7, kept symmetric
};

/// Measurement in state coordinates: [cx, cy, s, r], s > 0, r > 0.
struct Observation {
    Vec z;  // 4
};

/// Convert a detection box to measurement coordinates.
Observation bbox_to_z(const BBox& b);

/// Map a state vector back to a box (score 0). Throws InvalidStateError
/// when s*r <= 0.
BBox x_to_bbox(const Vec& x);

/// Prediction step: x' = F x (+ B u), P' = F P F^T + Q, symmetrized.
/// If the predicted area would go nonpositive, the area velocity is zeroed
/// before the transition so the state stays convertible to a box.
KalmanState predict(const KalmanState& st, const KalmanModel& m);

/// Update step: fold the observation into the state via the standard gain.
/// Throws FilterDivergenceError when the innovation covariance is not SPD.
KalmanState update(const KalmanState& st, const KalmanModel& m, const Observation& obs);

}  // namespace sortscale
