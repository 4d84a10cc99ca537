#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sortscale/mot_io.hpp"
#include "sortscale/timing.hpp"
#include "sortscale/tracker.hpp"

namespace sortscale {

/// Coefficients of the per-frame timing model
///   T_frame ~= a*T_predict + b*T_assign + c*T_update + d*T_maintain
/// where T_maintain folds spawn and output-prep together. Fitted by least
/// squares from per-frame samples; the residual is reported alongside.
struct TimingModel {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
    double d = 1.0;
    double residual_rms_ns = 0.0;
    bool degenerate = false;  // rank-deficient samples, coefficients defaulted

    bool operator==(const TimingModel&) const = default;
};

/// Least-squares fit of frame wall time against the four phase times.
/// Needs at least 4 frames of samples; rank-deficient inputs produce a
/// degenerate-fit warning with coefficients defaulted to 1.
TimingModel fit_timing_model(const std::vector<FrameSample>& samples);

/// Where a sequence comes from: either a detection file on disk or the
/// deterministic synthetic generator. Children of the throughput mode
/// receive the same description on their command line.
struct SequenceSource {
    std::string det_path;  // nonempty: parse this file
    std::string name;
    int synth_frames = 0;
    int synth_objects = 0;
    std::uint64_t synth_seed = 0;
};

Sequence load_source(const SequenceSource& src);

/// Compact spec for the synthetic generator: "FRAMESxOBJECTS@SEED".
std::string synth_spec(const SequenceSource& src);
SequenceSource parse_synth_spec(const std::string& spec);

/// Eleven synthetic sequences shaped like the MOT15 benchmark split used
/// for the scaling study: 5500 frames in total, at most 13 objects per
/// frame.
std::vector<SequenceSource> mot_shaped_sources(std::uint64_t seed);

struct BenchOptions {
    int cores = 1;
    int replicate = 1;    // duplicates the file list, not the files on disk
    int k_files = 0;      // throughput: files per child; 0 = balanced split
    TrackerConfig tracker;
    double conf_threshold = 0.0;
    bool apply_conf_threshold = false;
    bool pin_workers = false;
    std::string exe_path;  // throughput children; empty = this executable
    std::string out_dir;   // throughput: children write MOT outputs under here
};

struct ChildReport {
    int index = 0;
    long long frames = 0;
    double fps = 0.0;
    double wall_seconds = 0.0;
    int exit_code = 0;

    bool operator==(const ChildReport&) const = default;
};

/// Machine-readable outcome of one benchmark run. fps always equals
/// frames*replication / wall_seconds; only the update pipeline is timed,
/// parsing and result writing are reported separately.
struct BenchReport {
    int schema_version = 1;
    std::string mode;  // sequential|strong|weak|throughput
    int cores = 1;
    int files = 0;
    long long frames = 0;  // unreplicated frame total across files
    int replication = 1;
    double fps = 0.0;
    double wall_seconds = 0.0;
    PhaseTimings phases;
    TimingModel model;
    double timer_overhead_ns = 0.0;
    double parse_seconds = 0.0;
    double write_seconds = 0.0;
    bool partial = false;  // throughput: some child failed
    std::vector<ChildReport> children;

    bool operator==(const BenchReport&) const = default;
};

struct SequenceOutput {
    std::string name;
    std::vector<FrameEmissions> emissions;
};

struct BenchResult {
    BenchReport report;
    std::vector<SequenceOutput> outputs;  // one per distinct source
};

/// Plain sequential pipeline, no parallel harness. The baseline row of the
/// sweep and the body of every single-core mode.
BenchResult run_sequential(const std::vector<SequenceSource>& sources, const BenchOptions& opts);

/// Intra-frame parallelism: per-track predict and cost-matrix rows are
/// divided across p workers; association and lifecycle stay on one worker.
/// Emissions are identical to the sequential pipeline for every p.
BenchResult run_strong(const std::vector<SequenceSource>& sources, const BenchOptions& opts);

/// One worker per sequence, at most p concurrent, single shared process;
/// work-stealing over the (replicated) file list.
BenchResult run_weak(const std::vector<SequenceSource>& sources, const BenchOptions& opts);

/// p independent single-core child processes of this same binary, each
/// handling its slice of the (replicated) file list. The parent aggregates
/// the child JSON reports; aggregate fps is the sum of child rates.
BenchResult run_throughput(const std::vector<SequenceSource>& sources, const BenchOptions& opts);

enum class ReportFormat { Json, Csv };

/// Serialize a report with stable field names (schema_version 1). CSV is a
/// fixed two-line header+row document.
std::string report_to_string(const BenchReport& br, ReportFormat format);
BenchReport report_from_json(const std::string& text);

/// Fixed CSV header of the single-report format.
extern const char* const kReportCsvHeader;

struct SweepRow {
    int cores = 0;  // 0 = harness-free sequential baseline row
    int files = 0;
    long long frames = 0;
    double strong_fps = 0.0;
    double weak_fps = 0.0;
    double throughput_fps = 0.0;
};

/// Runs all three scaling modes for every core count, preceded by a
/// sequential baseline row (cores = 0, same figure in all three columns).
std::vector<SweepRow> sweep(const std::vector<SequenceSource>& sources,
                            const std::vector<int>& core_counts, const BenchOptions& opts);

/// Scaling-table CSV: rows = core counts, columns = modes.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace sortscale
