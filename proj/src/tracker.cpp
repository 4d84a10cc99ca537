#include "sortscale/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sortscale/assignment.hpp"

namespace sortscale {

namespace {

bool finite_box(const BBox& b) {
    return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
           std::isfinite(b.y2);
}

}  // namespace

AssociationOutcome associate(const std::vector<BBox>& dets, const std::vector<BBox>& preds,
                             double iou_threshold, WorkerPool* pool) {
    AssociationOutcome out;
    const int n = static_cast<int>(dets.size());
    const int m = static_cast<int>(preds.size());
    if (n == 0 || m == 0) {
        for (int i = 0; i < n; ++i) out.unmatched_dets.push_back(i);
        for (int j = 0; j < m; ++j) out.unmatched_preds.push_back(j);
        return out;
    }

    CostMatrix cost(n, m);
    parallel_for(pool, n, [&](int i) {
        for (int j = 0; j < m; ++j) {
            cost.at(i, j) = 1.0 - iou(dets[i], preds[j]);
        }
    });

    const AssignmentResult res = solve(cost);
    out.unmatched_dets = res.unmatched_rows;
    out.unmatched_preds = res.unmatched_cols;
    for (const auto& [i, j] : res.pairs) {
        // The optimum may pair distant boxes when nothing better exists;
        // those pairs are demoted to both unmatched lists.
        if (1.0 - cost.at(i, j) < iou_threshold) {
            out.unmatched_dets.push_back(i);
            out.unmatched_preds.push_back(j);
        } else {
            out.matches.emplace_back(i, j);
        }
    }
    std::sort(out.unmatched_dets.begin(), out.unmatched_dets.end());
    std::sort(out.unmatched_preds.begin(), out.unmatched_preds.end());
    return out;
}

std::vector<Emission> TrackerSet::step(const FrameDetections& frame, WorkerPool* pool,
                                       PhaseTimings* phases) {
    if (frame.frame_index <= last_frame_index_) {
        throw std::invalid_argument("step: frame_index must be strictly increasing");
    }
    last_frame_index_ = frame.frame_index;

    const bool timed = phases != nullptr;
    std::uint64_t t0 = timed ? monotonic_ns() : 0;

    // 1. Predict every track; drop tracks whose predicted box is invalid.
    const int n_tracks = static_cast<int>(tracks_.size());
    std::vector<BBox> pred_boxes(n_tracks);
    std::vector<char> alive(n_tracks, 1);
    parallel_for(pool, n_tracks, [&](int i) {
        Track& trk = tracks_[i];
        trk.state = predict(trk.state, model_);
        try {
            const BBox b = x_to_bbox(trk.state.x);
            if (finite_box(b)) {
                pred_boxes[i] = b;
            } else {
                alive[i] = 0;
            }
        } catch (const InvalidStateError&) {
            alive[i] = 0;
        }
    });
    for (int i = n_tracks - 1; i >= 0; --i) {
        if (!alive[i]) {
            tracks_.erase(tracks_.begin() + i);
            pred_boxes.erase(pred_boxes.begin() + i);
        }
    }

    if (timed) {
        const std::uint64_t t1 = monotonic_ns();
        phases->t_predict += t1 - t0;
        t0 = t1;
    }

    // 2. Associate detections with predicted boxes.
    const AssociationOutcome assoc =
        associate(frame.dets, pred_boxes, config_.iou_threshold, pool);

    if (timed) {
        const std::uint64_t t1 = monotonic_ns();
        phases->t_assign += t1 - t0;
        t0 = t1;
    }

    // 3. Update matched tracks with their detections.
    std::vector<char> matched(tracks_.size(), 0);
    std::vector<int> diverged;
    for (const auto& [det_idx, trk_idx] : assoc.matches) {
        Track& trk = tracks_[trk_idx];
        try {
            trk.state = update(trk.state, model_, bbox_to_z(frame.dets[det_idx]));
            trk.time_since_update = 0;
            ++trk.hits;
            ++trk.hit_streak;
            matched[trk_idx] = 1;
        } catch (const FilterDivergenceError&) {
            diverged.push_back(trk_idx);
        } catch (const InvalidBoxError&) {
            // Degenerate detection; leave the track to age as unmatched.
        }
    }

    if (timed) {
        const std::uint64_t t1 = monotonic_ns();
        phases->t_update += t1 - t0;
        t0 = t1;
    }

    // 4. Spawn a new track for every unmatched detection.
    const size_t n_existing = tracks_.size();
    for (int det_idx : assoc.unmatched_dets) {
        Observation obs;
        try {
            obs = bbox_to_z(frame.dets[det_idx]);
        } catch (const InvalidBoxError&) {
            continue;
        }
        Track trk;
        trk.id = next_id_++;
        trk.state.x = Vec(kStateDim);
        for (int k = 0; k < kObsDim; ++k) trk.state.x[k] = obs.z[k];
        trk.state.P = KalmanModel::initial_covariance();
        tracks_.push_back(trk);
    }

    if (timed) {
        const std::uint64_t t1 = monotonic_ns();
        phases->t_spawn += t1 - t0;
        t0 = t1;
    }

    // 5. Lifecycle counters, 6. reap stale tracks, 7. emit.
    for (size_t i = 0; i < tracks_.size(); ++i) {
        ++tracks_[i].age;
        if (i < n_existing && !matched[i]) {
            ++tracks_[i].time_since_update;
            tracks_[i].hit_streak = 0;
        }
    }
    // diverged carries indices in match order, not index order.
    std::sort(diverged.begin(), diverged.end());
    for (int i = static_cast<int>(diverged.size()) - 1; i >= 0; --i) {
        tracks_.erase(tracks_.begin() + diverged[i]);
    }

    std::vector<Emission> emitted;
    for (size_t i = 0; i < tracks_.size();) {
        Track& trk = tracks_[i];
        if (trk.time_since_update > config_.max_age) {
            tracks_.erase(tracks_.begin() + i);
            continue;
        }
        if (trk.time_since_update < 1 &&
            (trk.hit_streak >= config_.min_hits || frame.frame_index <= config_.min_hits)) {
            try {
                const BBox b = x_to_bbox(trk.state.x);
                if (!finite_box(b)) throw InvalidStateError("non-finite box");
                emitted.push_back({b, trk.id});
            } catch (const InvalidStateError&) {
                tracks_.erase(tracks_.begin() + i);
                continue;
            }
        }
        ++i;
    }

    if (timed) {
        phases->t_output += monotonic_ns() - t0;
    }
    return emitted;
}

std::vector<FrameEmissions> run_sequence(const std::vector<FrameDetections>& frames,
                                         const TrackerConfig& config, WorkerPool* pool,
                                         PhaseTimings* phases,
                                         std::vector<FrameSample>* samples) {
    TrackerSet tracker(config);
    std::vector<FrameEmissions> out;
    out.reserve(frames.size());
    if (samples) samples->reserve(samples->size() + frames.size());

    const bool per_frame = samples != nullptr;
    for (const FrameDetections& frame : frames) {
        FrameEmissions fe;
        fe.frame_index = frame.frame_index;
        if (per_frame) {
            PhaseTimings ft;
            const std::uint64_t w0 = monotonic_ns();
            fe.items = tracker.step(frame, pool, &ft);
            const std::uint64_t w1 = monotonic_ns();
            samples->push_back({static_cast<double>(w1 - w0),
                                static_cast<double>(ft.t_predict),
                                static_cast<double>(ft.t_assign),
                                static_cast<double>(ft.t_update),
                                static_cast<double>(ft.t_spawn),
                                static_cast<double>(ft.t_output)});
            if (phases) *phases += ft;
        } else {
            fe.items = tracker.step(frame, pool, phases);
        }
        out.push_back(std::move(fe));
    }
    return out;
}

}  // namespace sortscale
