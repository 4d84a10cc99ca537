#include "sortscale/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include "sortscale/smallmat.hpp"

namespace sortscale {

namespace fs = std::filesystem;

TimingModel fit_timing_model(const std::vector<FrameSample>& samples) {
    TimingModel model;
    const int n = static_cast<int>(samples.size());
    if (n < 4) {
        model.degenerate = true;
        return model;
    }

    // Regressors: predict, assign, update, spawn+output. Normal equations
    // solved with the pipeline's own SPD kernel.
    Mat xtx(4, 4);
    Vec xty(4);
    for (const FrameSample& s : samples) {
        const double r[4] = {s.predict_ns, s.assign_ns, s.update_ns, s.spawn_ns + s.output_ns};
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) xtx(i, j) += r[i] * r[j];
            xty[i] += r[i] * s.wall_ns;
        }
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);
    }

    Vec beta(4);
    try {
        const Mat inv = inverse_spd(xtx);
        beta = matvec(inv, xty);
    } catch (const DecompositionError&) {
        model.degenerate = true;
        return model;
    }
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(beta[i])) {
            model.degenerate = true;
            return model;
        }
    }
    // Near-singular systems can survive the factorization with garbage
    // coefficients; verify the solve actually holds.
    double err = 0.0, scale_sq = 0.0;
    for (int i = 0; i < 4; ++i) {
        double lhs = 0.0;
        for (int j = 0; j < 4; ++j) lhs += xtx(i, j) * beta[j];
        err += (lhs - xty[i]) * (lhs - xty[i]);
        scale_sq += xty[i] * xty[i];
    }
    if (err > 1e-12 * (scale_sq + 1.0)) {
        model.degenerate = true;
        return model;
    }

    model.a = beta[0];
    model.b = beta[1];
    model.c = beta[2];
    model.d = beta[3];
    double ss = 0.0;
    for (const FrameSample& s : samples) {
        const double fit = model.a * s.predict_ns + model.b * s.assign_ns +
                           model.c * s.update_ns + model.d * (s.spawn_ns + s.output_ns);
        const double e = s.wall_ns - fit;
        ss += e * e;
    }
    model.residual_rms_ns = std::sqrt(ss / n);
    return model;
}

Sequence load_source(const SequenceSource& src) {
    if (!src.det_path.empty()) {
        Sequence seq = parse_det_file(src.det_path);
        if (!src.name.empty()) seq.name = src.name;
        return seq;
    }
    Sequence seq = synth_sequence(src.synth_frames, src.synth_objects, src.synth_seed);
    if (!src.name.empty()) seq.name = src.name;
    return seq;
}

std::string synth_spec(const SequenceSource& src) {
    return std::to_string(src.synth_frames) + "x" + std::to_string(src.synth_objects) + "@" +
           std::to_string(src.synth_seed);
}

SequenceSource parse_synth_spec(const std::string& spec) {
    SequenceSource src;
    const size_t x = spec.find('x');
    const size_t at = spec.find('@');
    if (x == std::string::npos || at == std::string::npos || at < x) {
        throw std::invalid_argument("synth spec must be FRAMESxOBJECTS@SEED: " + spec);
    }
    auto parse_int = [&](size_t from, size_t to, auto& out) {
        const auto [ptr, ec] = std::from_chars(spec.data() + from, spec.data() + to, out);
        if (ec != std::errc() || ptr != spec.data() + to) {
            throw std::invalid_argument("bad synth spec: " + spec);
        }
    };
    parse_int(0, x, src.synth_frames);
    parse_int(x + 1, at, src.synth_objects);
    parse_int(at + 1, spec.size(), src.synth_seed);
    if (src.synth_frames < 1 || src.synth_objects < 1) {
        throw std::invalid_argument("synth spec needs positive sizes: " + spec);
    }
    return src;
}

std::vector<SequenceSource> mot_shaped_sources(std::uint64_t seed) {
    // Shapes of the 11-sequence MOT15 split commonly used for tracker
    // benchmarking: 5500 frames total, 5..13 objects per sequence.
    static constexpr int kFrames[11] = {795, 71, 179, 1000, 354, 837, 340, 145, 525, 654, 600};
    static constexpr int kObjects[11] = {8, 6, 7, 9, 8, 9, 5, 7, 11, 11, 13};
    std::vector<SequenceSource> sources;
    sources.reserve(11);
    for (int i = 0; i < 11; ++i) {
        SequenceSource src;
        src.synth_frames = kFrames[i];
        src.synth_objects = kObjects[i];
        src.synth_seed = seed + static_cast<std::uint64_t>(i);
        char name[16];
        std::snprintf(name, sizeof(name), "synth-%02d", i + 1);
        src.name = name;
        sources.push_back(src);
    }
    return sources;
}

namespace {

struct LoadedSuite {
    std::vector<Sequence> seqs;
    long long base_frames = 0;
    double parse_seconds = 0.0;
};

LoadedSuite load_all(const std::vector<SequenceSource>& sources, const BenchOptions& opts) {
    LoadedSuite suite;
    const auto t0 = std::chrono::steady_clock::now();
    suite.seqs.reserve(sources.size());
    for (const SequenceSource& src : sources) {
        Sequence seq = load_source(src);
        if (opts.apply_conf_threshold) filter_confidence(seq, opts.conf_threshold);
        suite.base_frames += seq.total_frames;
        suite.seqs.push_back(std::move(seq));
    }
    suite.parse_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return suite;
}

void require_cores(const BenchOptions& opts) {
    if (opts.cores < 1) throw std::invalid_argument("bench: cores must be >= 1");
    if (opts.replicate < 1) throw std::invalid_argument("bench: replicate must be >= 1");
}

BenchReport base_report(const char* mode, const BenchOptions& opts, const LoadedSuite& suite) {
    BenchReport br;
    br.mode = mode;
    br.cores = opts.cores;
    br.files = static_cast<int>(suite.seqs.size());
    br.frames = suite.base_frames;
    br.replication = opts.replicate;
    br.timer_overhead_ns = measure_timer_overhead_ns();
    br.parse_seconds = suite.parse_seconds;
    return br;
}

// Shared body of the sequential and strong modes: sequences one at a
// time, frames in order, intra-frame work optionally on a pool.
BenchResult run_frame_parallel(const char* mode, const std::vector<SequenceSource>& sources,
                               const BenchOptions& opts, WorkerPool* pool) {
    const LoadedSuite suite = load_all(sources, opts);
    BenchResult result;
    result.report = base_report(mode, opts, suite);

    std::vector<FrameSample> samples;
    PhaseTimings phases;
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < opts.replicate; ++rep) {
        for (size_t i = 0; i < suite.seqs.size(); ++i) {
            std::vector<FrameEmissions> emissions =
                run_sequence(suite.seqs[i].frames, opts.tracker, pool, &phases, &samples);
            if (rep == 0) {
                result.outputs.push_back({suite.seqs[i].name, std::move(emissions)});
            }
        }
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    result.report.wall_seconds = wall;
    result.report.fps =
        wall > 0.0 ? static_cast<double>(suite.base_frames) * opts.replicate / wall : 0.0;
    result.report.phases = phases;
    result.report.model = fit_timing_model(samples);
    return result;
}

}  // namespace

BenchResult run_sequential(const std::vector<SequenceSource>& sources, const BenchOptions& opts) {
    require_cores(opts);
    return run_frame_parallel("sequential", sources, opts, nullptr);
}

BenchResult run_strong(const std::vector<SequenceSource>& sources, const BenchOptions& opts) {
    require_cores(opts);
    WorkerPool pool(opts.cores, opts.pin_workers);
    return run_frame_parallel("strong", sources, opts, &pool);
}

BenchResult run_weak(const std::vector<SequenceSource>& sources, const BenchOptions& opts) {
    require_cores(opts);
    const LoadedSuite suite = load_all(sources, opts);
    BenchResult result;
    result.report = base_report("weak", opts, suite);

    // Task list is replica-major so the first |sources| tasks carry the
    // distinct outputs.
    const int n_sources = static_cast<int>(suite.seqs.size());
    const int n_tasks = n_sources * opts.replicate;
    struct TaskOut {
        std::vector<FrameEmissions> emissions;
        std::vector<FrameSample> samples;
        PhaseTimings phases;
    };
    std::vector<TaskOut> task_out(n_tasks);

    std::atomic<int> next_task{0};
    auto worker_body = [&] {
        for (;;) {
            const int t = next_task.fetch_add(1, std::memory_order_relaxed);
            if (t >= n_tasks) break;
            const Sequence& seq = suite.seqs[t % n_sources];
            TaskOut& out = task_out[t];
            out.emissions =
                run_sequence(seq.frames, opts.tracker, nullptr, &out.phases, &out.samples);
        }
    };

    const auto t0 = std::chrono::steady_clock::now();
    if (opts.cores == 1) {
        worker_body();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(opts.cores);
        for (int w = 0; w < opts.cores; ++w) {
            workers.emplace_back(worker_body);
            if (opts.pin_workers) pin_thread_to_cpu(workers.back(), w);
        }
        for (auto& w : workers) w.join();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<FrameSample> samples;
    for (TaskOut& out : task_out) {
        result.report.phases += out.phases;
        samples.insert(samples.end(), out.samples.begin(), out.samples.end());
    }
    for (int i = 0; i < n_sources; ++i) {
        result.outputs.push_back({suite.seqs[i].name, std::move(task_out[i].emissions)});
    }

    result.report.wall_seconds = wall;
    result.report.fps =
        wall > 0.0 ? static_cast<double>(suite.base_frames) * opts.replicate / wall : 0.0;
    result.report.model = fit_timing_model(samples);
    return result;
}

namespace {

std::string self_exe_path() {
    std::error_code ec;
    const fs::path p = fs::read_symlink("/proc/self/exe", ec);
    if (ec) throw IoError("cannot resolve /proc/self/exe");
    return p.string();
}

int spawn_child(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw IoError("fork failed");
    if (pid == 0) {
        ::execv(argv[0], argv.data());
        ::_exit(127);
    }
    return pid;
}

}  // namespace

BenchResult run_throughput(const std::vector<SequenceSource>& sources, const BenchOptions& opts) {
    require_cores(opts);
    const int p = opts.cores;

    // Children re-load their own inputs, so only the shape is needed here.
    std::vector<SequenceSource> tasks;
    if (opts.k_files > 0) {
        // Exactly p children with k files each, cycling the list to fill.
        tasks.reserve(static_cast<size_t>(p) * opts.k_files);
        for (int i = 0; i < p * opts.k_files; ++i) {
            tasks.push_back(sources[i % sources.size()]);
        }
    } else {
        tasks.reserve(sources.size() * opts.replicate);
        for (int rep = 0; rep < opts.replicate; ++rep) {
            tasks.insert(tasks.end(), sources.begin(), sources.end());
        }
    }
    const int n_tasks = static_cast<int>(tasks.size());

    BenchReport br;
    br.mode = "throughput";
    br.cores = p;
    br.files = static_cast<int>(sources.size());
    br.replication = opts.k_files > 0 ? 1 : opts.replicate;
    br.timer_overhead_ns = measure_timer_overhead_ns();

    const std::string exe = opts.exe_path.empty() ? self_exe_path() : opts.exe_path;
    fs::path tmp_dir = fs::temp_directory_path() /
                       ("sortscale-" + std::to_string(::getpid()) + "-" +
                        std::to_string(monotonic_ns()));
    fs::create_directories(tmp_dir);

    struct Child {
        int pid = -1;
        fs::path report_path;
        std::vector<SequenceSource> slice;
    };
    std::vector<Child> children;
    auto reap_all = [&children] {
        for (const Child& c : children) {
            if (c.pid > 0) ::waitpid(c.pid, nullptr, 0);
        }
    };
    try {
        for (int i = 0; i < p; ++i) {
            const int begin = static_cast<int>(static_cast<long long>(n_tasks) * i / p);
            const int end = static_cast<int>(static_cast<long long>(n_tasks) * (i + 1) / p);
            if (begin == end) continue;

            Child child;
            child.report_path = tmp_dir / ("child_" + std::to_string(i) + ".json");
            child.slice.assign(tasks.begin() + begin, tasks.begin() + end);

            std::vector<std::string> args = {exe,     "--mode", "weak",  "--cores", "1",
                                             "--report", "json", "--out",
                                             child.report_path.string()};
            std::string files, synths;
            for (const SequenceSource& src : child.slice) {
                if (!src.det_path.empty()) {
                    if (!files.empty()) files += ',';
                    files += src.det_path;
                } else {
                    if (!synths.empty()) synths += ',';
                    synths += synth_spec(src);
                }
            }
            if (!files.empty()) {
                args.push_back("--files");
                args.push_back(files);
            }
            if (!synths.empty()) {
                args.push_back("--synth");
                args.push_back(synths);
            }
            args.push_back("--max-age");
            args.push_back(std::to_string(opts.tracker.max_age));
            args.push_back("--min-hits");
            args.push_back(std::to_string(opts.tracker.min_hits));
            args.push_back("--iou-threshold");
            args.push_back(std::to_string(opts.tracker.iou_threshold));
            if (opts.apply_conf_threshold) {
                args.push_back("--conf-threshold");
                args.push_back(std::to_string(opts.conf_threshold));
            }
            if (!opts.out_dir.empty()) {
                const fs::path child_out =
                    fs::path(opts.out_dir) / ("child_" + std::to_string(i));
                fs::create_directories(child_out);
                args.push_back("--out-dir");
                args.push_back(child_out.string());
            }

            child.pid = spawn_child(args);
            children.push_back(std::move(child));
        }
    } catch (...) {
        reap_all();
        std::error_code cleanup_ec;
        fs::remove_all(tmp_dir, cleanup_ec);
        throw;
    }

    double fps_sum = 0.0;
    long long frames_processed = 0;
    double weighted_a = 0, weighted_b = 0, weighted_c = 0, weighted_d = 0, weighted_res = 0;
    long long model_weight = 0;

    for (size_t i = 0; i < children.size(); ++i) {
        Child& child = children[i];
        int status = 0;
        pid_t waited;
        do {
            waited = ::waitpid(child.pid, &status, 0);
        } while (waited < 0 && errno == EINTR);
        const int exit_code = waited < 0 ? -1
                              : WIFEXITED(status) ? WEXITSTATUS(status)
                                                  : 128 + WTERMSIG(status);

        ChildReport cr;
        cr.index = static_cast<int>(i);
        cr.exit_code = exit_code;
        bool have_report = false;
        if (exit_code == 0) {
            std::ifstream in(child.report_path);
            if (in) {
                std::stringstream ss;
                ss << in.rdbuf();
                try {
                    const BenchReport child_br = report_from_json(ss.str());
                    cr.frames = child_br.frames * child_br.replication;
                    cr.fps = child_br.fps;
                    cr.wall_seconds = child_br.wall_seconds;
                    br.phases += child_br.phases;
                    br.parse_seconds += child_br.parse_seconds;
                    br.write_seconds += child_br.write_seconds;
                    if (!child_br.model.degenerate) {
                        weighted_a += child_br.model.a * cr.frames;
                        weighted_b += child_br.model.b * cr.frames;
                        weighted_c += child_br.model.c * cr.frames;
                        weighted_d += child_br.model.d * cr.frames;
                        weighted_res += child_br.model.residual_rms_ns * cr.frames;
                        model_weight += cr.frames;
                    }
                    have_report = true;
                } catch (const std::exception&) {
                }
            }
        }
        if (have_report) {
            fps_sum += cr.fps;
            frames_processed += cr.frames;
        } else {
            br.partial = true;
        }
        br.children.push_back(cr);
    }
    std::error_code ec;
    fs::remove_all(tmp_dir, ec);

    // Children run unsynchronized, so the aggregate rate is the sum of the
    // child rates; wall_seconds is the effective makespan implied by it.
    br.fps = fps_sum;
    br.frames = br.replication > 0 && opts.k_files == 0
                    ? frames_processed / std::max(1, br.replication)
                    : frames_processed;
    br.wall_seconds = br.fps > 0.0 ? static_cast<double>(frames_processed) / br.fps : 0.0;
    if (model_weight > 0) {
        br.model.a = weighted_a / model_weight;
        br.model.b = weighted_b / model_weight;
        br.model.c = weighted_c / model_weight;
        br.model.d = weighted_d / model_weight;
        br.model.residual_rms_ns = weighted_res / model_weight;
    } else {
        br.model.degenerate = true;
    }

    BenchResult result;
    result.report = std::move(br);
    return result;
}

std::vector<SweepRow> sweep(const std::vector<SequenceSource>& sources,
                            const std::vector<int>& core_counts, const BenchOptions& opts) {
    std::vector<SweepRow> rows;

    BenchOptions base = opts;
    base.cores = 1;

    // Short warm-up so the baseline row is not charged for first-touch
    // costs (page faults, frequency ramp).
    if (!sources.empty()) {
        run_sequential({sources.front()}, base);
    }
    const BenchResult baseline = run_sequential(sources, base);
    rows.push_back({0, baseline.report.files, baseline.report.frames, baseline.report.fps,
                    baseline.report.fps, baseline.report.fps});

    for (int p : core_counts) {
        BenchOptions o = opts;
        o.cores = p;
        const BenchResult s = run_strong(sources, o);
        const BenchResult w = run_weak(sources, o);
        const BenchResult t = run_throughput(sources, o);
        rows.push_back({p, s.report.files, s.report.frames, s.report.fps, w.report.fps,
                        t.report.fps});
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "cores,files,frames,strong_fps,weak_fps,throughput_fps\n";
    char buf[160];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%lld,%.1f,%.1f,%.1f\n", r.cores, r.files,
                      r.frames, r.strong_fps, r.weak_fps, r.throughput_fps);
        out += buf;
    }
    return out;
}

}  // namespace sortscale
