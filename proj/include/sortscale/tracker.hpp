#pragma once

#include <utility>
#include <vector>

#include "sortscale/bbox.hpp"
#include "sortscale/kalman.hpp"
#include "sortscale/timing.hpp"
#include "sortscale/worker_pool.hpp"

namespace sortscale {

struct TrackerConfig {
    int max_age = 1;
    int min_hits = 3;
    double iou_threshold = 0.3;
};

/// A Kalman state with lifecycle counters and a stable identity. Ids are
/// never reused within a run.
struct Track {
    int id = 0;
    KalmanState state;
    int time_since_update = 0;
    int hits = 0;
    int hit_streak = 0;
    int age = 0;
};

struct FrameDetections {
    int frame_index = 0;  // 1-based, strictly increasing across a sequence
    std::vector<BBox> dets;
};

struct Emission {
    BBox box;
    int id = 0;
};

struct FrameEmissions {
    int frame_index = 0;
    std::vector<Emission> items;
};

/// Output of detection-to-prediction association. matches is sorted by
/// detection index; the three lists partition both index sets exactly.
struct AssociationOutcome {
    std::vector<std::pair<int, int>> matches;  // (det index, pred index)
    std::vector<int> unmatched_dets;
    std::vector<int> unmatched_preds;
};

/// Hungarian matching on cost 1 - IoU, then demotion of any matched pair
/// whose IoU falls below the threshold. Cost rows are built in parallel
/// when a pool is supplied; the solve itself is single-threaded.
AssociationOutcome associate(const std::vector<BBox>& dets, const std::vector<BBox>& preds,
                             double iou_threshold, WorkerPool* pool = nullptr);

/// The per-frame tracking pipeline. Owned by one thread and mutated
/// sequentially; the only intra-frame parallelism is the data-parallel
/// per-track predict and cost-matrix construction.
class TrackerSet {
public:
    explicit TrackerSet(TrackerConfig config = {}) : config_(config) {}

    /// Runs one frame through predict / associate / update / spawn /
    /// lifecycle / reap and returns the boxes to emit. Filter divergence
    /// on a track removes that track, never fails the pipeline.
    std::vector<Emission> step(const FrameDetections& frame, WorkerPool* pool = nullptr,
                               PhaseTimings* phases = nullptr);

    const std::vector<Track>& tracks() const { return tracks_; }
    std::vector<Track>& tracks() { return tracks_; }
    int next_id() const { return next_id_; }
    const TrackerConfig& config() const { return config_; }

private:
    std::vector<Track> tracks_;
    int next_id_ = 1;
    int last_frame_index_ = 0;
    TrackerConfig config_;
    KalmanModel model_ = KalmanModel::constant_velocity();
};

/// Sequential fold of TrackerSet::step over an ordered frame list.
/// Deterministic for a given config. Optionally accumulates phase timings
/// and per-frame samples for the timing-model fit.
std::vector<FrameEmissions> run_sequence(const std::vector<FrameDetections>& frames,
                                         const TrackerConfig& config,
                                         WorkerPool* pool = nullptr,
                                         PhaseTimings* phases = nullptr,
                                         std::vector<FrameSample>* samples = nullptr);

}  // namespace sortscale
