#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortscale/tracker.hpp"

namespace sortscale {

/// Malformed input line; the message carries the 1-based line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One row of a MOT detection file:
/// frame,id,left,top,width,height,conf,x,y,z (id is -1 in det files, the
/// world coordinates are unused and -1).
struct DetRecord {
    int frame = 0;
    int id = -1;
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;
    double conf = 0.0;
    double x = -1.0;
    double y = -1.0;
    double z = -1.0;
};

/// A named detection sequence. frames covers 1..total_frames with empty
/// entries where the file had no detections for a frame.
struct Sequence {
    std::string name;
    std::vector<FrameDetections> frames;
    int total_frames = 0;
    int skipped_records = 0;  // rows dropped for nonpositive width/height
};

/// Parse a MOT det.txt. Rows with nonpositive width or height are skipped
/// and counted; anything non-numeric raises ParseError with the line
/// number. The trailing world coordinates may be omitted.
Sequence parse_det_file(const std::string& path);
Sequence parse_det_stream(std::istream& in, const std::string& name);

/// Canonical MOT result bytes: one line per emitted box,
/// "frame,id,left,top,width,height,1,-1,-1,-1" with 2-decimal fixed
/// geometry, ordered by frame then id, newline-terminated.
std::string format_results(const std::vector<FrameEmissions>& emissions);
void write_results(const std::string& path, const std::vector<FrameEmissions>& emissions);

/// Drop detections below a confidence floor (off by default everywhere;
/// detection files are ingested unfiltered unless a caller opts in).
void filter_confidence(Sequence& seq, double min_conf);

struct SynthOptions {
    double speed = 1.0;       // pixels per frame
    double dropout = 0.0;     // per-record drop probability
    double field_w = 1920.0;
    double field_h = 1080.0;
};

/// Deterministic linear-motion trajectories: one box per object per frame,
/// bouncing off the field borders. Ground truth for the generator below.
std::vector<std::vector<BBox>> synth_trajectories(int n_frames, int n_objects,
                                                  std::uint64_t seed,
                                                  const SynthOptions& opts = {});

/// Deterministic synthetic detection sequence built from
/// synth_trajectories, with optional per-record dropout.
Sequence synth_sequence(int n_frames, int n_objects, std::uint64_t seed,
                        const SynthOptions& opts = {});

}  // namespace sortscale
