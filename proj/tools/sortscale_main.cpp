#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sortscale/bench.hpp"
#include "sortscale/mot_io.hpp"

namespace fs = std::filesystem;
using namespace sortscale;

namespace {

std::vector<int> parse_core_list(const std::string& text) {
    std::vector<int> cores;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                            : comma - pos);
        int v = 0;
        try {
            v = std::stoi(tok);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--cores", "bad core count '" + tok + "'");
        }
        if (v < 1) throw CLI::ValidationError("--cores", "core counts must be >= 1");
        cores.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (cores.empty()) throw CLI::ValidationError("--cores", "no core counts given");
    return cores;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t comma = text.find(',', pos);
        out.push_back(text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// A det file at <seq_dir>/<name>/det/det.txt is named after its sequence
// directory; a bare file falls back to its stem.
std::string sequence_name_for(const fs::path& det_path) {
    const fs::path parent = det_path.parent_path();
    if (parent.filename() == "det" && parent.has_parent_path()) {
        return parent.parent_path().filename().string();
    }
    return det_path.stem().string();
}

std::vector<SequenceSource> scan_seq_dir(const std::string& dir) {
    std::vector<SequenceSource> sources;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const fs::path det = entry.path() / "det" / "det.txt";
        if (fs::is_regular_file(det)) {
            SequenceSource src;
            src.det_path = det.string();
            src.name = entry.path().filename().string();
            sources.push_back(src);
        }
    }
    std::sort(sources.begin(), sources.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    if (sources.empty()) throw IoError("no <name>/det/det.txt sequences under " + dir);
    return sources;
}

void emit_text(const std::string& out_path, const std::string& body) {
    if (out_path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_path);
    out << body;
    if (!out) throw IoError("write failed for " + out_path);
}

double write_outputs(const std::string& out_dir, const std::vector<SequenceOutput>& outputs) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    for (const SequenceOutput& so : outputs) {
        write_results((fs::path(out_dir) / (so.name + ".txt")).string(), so.emissions);
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sortscale: SORT-style multi-object tracker and scaling benchmark"};

    std::string seq_dir, files_arg, synth_arg, out_dir;
    bool synth_suite = false;
    std::string mode = "track";
    std::string cores_arg = "1";
    std::string report_format;  // resolved per mode below
    std::string out_path = "-";
    int k_files = 0;
    int replicate = 1;
    std::uint64_t seed = 0;
    bool pin = false;
    TrackerConfig tracker;
    double conf_threshold = 0.0;

    app.add_option("--seq-dir", seq_dir, "Directory holding <name>/det/det.txt sequences");
    app.add_option("--files", files_arg, "Comma-separated det file paths");
    app.add_option("--synth", synth_arg,
                   "Comma-separated synthetic specs, each FRAMESxOBJECTS@SEED");
    app.add_flag("--synth-suite", synth_suite,
                 "Use the built-in 11-sequence MOT-shaped synthetic suite");
    app.add_option("--out-dir", out_dir,
                   "Directory for MOT result files (SORTSCALE_OUT_DIR overrides)");
    app.add_option("--mode", mode, "track|strong|weak|throughput|sweep")
        ->check(CLI::IsMember({"track", "strong", "weak", "throughput", "sweep"}));
    app.add_option("--cores", cores_arg,
                   "Worker count; comma-separated list for sweep (e.g. 1,18,36,72)");
    app.add_option("--k-files", k_files, "Throughput: files per child process");
    app.add_option("--replicate", replicate, "Replicate the input file list N times")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-age", tracker.max_age, "Frames a track may miss before reaping");
    app.add_option("--min-hits", tracker.min_hits, "Hit streak required before emitting");
    app.add_option("--iou-threshold", tracker.iou_threshold, "Minimum IoU for a match")
        ->check(CLI::Range(0.0, 1.0));
    auto* conf_opt =
        app.add_option("--conf-threshold", conf_threshold, "Drop detections below this score");
    app.add_option("--report", report_format, "json|csv (default: csv for sweep, else json)")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out_path, "Report destination path, or - for stdout");
    app.add_option("--seed", seed, "Base seed for synthetic inputs");
    app.add_flag("--pin", pin, "Pin workers to cores (thread modes)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // usage on stdout, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        return 2;
    }

    if (const char* env_out = std::getenv("SORTSCALE_OUT_DIR"); env_out && *env_out) {
        out_dir = env_out;
    }
    if (report_format.empty()) report_format = (mode == "sweep") ? "csv" : "json";

    try {
        std::vector<int> core_list = parse_core_list(cores_arg);

        std::vector<SequenceSource> sources;
        if (!files_arg.empty()) {
            for (const std::string& f : split_commas(files_arg)) {
                SequenceSource src;
                src.det_path = f;
                src.name = sequence_name_for(f);
                sources.push_back(src);
            }
        }
        if (!synth_arg.empty()) {
            for (const std::string& s : split_commas(synth_arg)) {
                sources.push_back(parse_synth_spec(s));
            }
        }
        if (synth_suite) {
            const auto suite = mot_shaped_sources(seed);
            sources.insert(sources.end(), suite.begin(), suite.end());
        }
        if (!seq_dir.empty()) {
            const auto scanned = scan_seq_dir(seq_dir);
            sources.insert(sources.end(), scanned.begin(), scanned.end());
        }
        if (sources.empty()) {
            throw IoError("no input sequences: use --seq-dir, --files, --synth or --synth-suite");
        }
        if (mode == "track" && out_dir.empty()) {
            throw IoError("--mode track needs --out-dir (or SORTSCALE_OUT_DIR)");
        }

        BenchOptions opts;
        opts.cores = core_list.front();
        opts.replicate = replicate;
        opts.k_files = k_files;
        opts.tracker = tracker;
        opts.pin_workers = pin;
        opts.out_dir = out_dir;
        if (conf_opt->count() > 0) {
            opts.conf_threshold = conf_threshold;
            opts.apply_conf_threshold = true;
        }

        if (mode == "sweep") {
            const std::vector<SweepRow> rows = sweep(sources, core_list, opts);
            if (report_format == "csv") {
                emit_text(out_path, sweep_to_csv(rows));
            } else {
                nlohmann::json j = nlohmann::json::array();
                for (const SweepRow& r : rows) {
                    j.push_back({{"cores", r.cores},
                                 {"files", r.files},
                                 {"frames", r.frames},
                                 {"strong_fps", r.strong_fps},
                                 {"weak_fps", r.weak_fps},
                                 {"throughput_fps", r.throughput_fps}});
                }
                emit_text(out_path, j.dump(2) + "\n");
            }
            return 0;
        }

        BenchResult result;
        if (mode == "track" || mode == "weak") {
            result = mode == "track" ? run_sequential(sources, opts) : run_weak(sources, opts);
        } else if (mode == "strong") {
            result = run_strong(sources, opts);
        } else {  // throughput
            result = run_throughput(sources, opts);
        }

        if (!out_dir.empty() && !result.outputs.empty()) {
            result.report.write_seconds = write_outputs(out_dir, result.outputs);
        }

        const ReportFormat fmt =
            report_format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
        if (mode != "track" || out_path != "-") {
            emit_text(out_path, report_to_string(result.report, fmt));
        }
        if (result.report.partial) {
            std::cerr << "warning: partial run, some children failed\n";
            return 1;
        }
        return 0;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
