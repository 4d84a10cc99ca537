#include "sortscale/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace sortscale {

namespace {

// Upper bound on frame indices: sequences are minutes of video, and the
// frame table is materialized densely up to the maximum index.
constexpr double kMaxFrameIndex = 1e6;

// Locale-independent double parse of a trimmed field.
bool parse_field(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Sequence parse_det_stream(std::istream& in, const std::string& name) {
    Sequence seq;
    seq.name = name;

    std::vector<DetRecord> records;
    std::string line;
    int line_no = 0;
    int max_frame = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;

        double fields[10] = {0, 0, 0, 0, 0, 0, 0, -1, -1, -1};
        int n_fields = 0;
        size_t pos = 0;
        while (true) {
            const size_t comma = line.find(',', pos);
            const std::string_view field(line.data() + pos,
                                         (comma == std::string::npos ? line.size() : comma) - pos);
            if (n_fields >= 10 || !parse_field(field, fields[n_fields])) {
                throw ParseError(name + ": malformed record at line " + std::to_string(line_no));
            }
            ++n_fields;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (n_fields < 7) {
            throw ParseError(name + ": expected at least 7 fields at line " +
                             std::to_string(line_no));
        }
        if (fields[0] < 1.0 || fields[0] > kMaxFrameIndex || fields[0] != std::floor(fields[0])) {
            throw ParseError(name + ": bad frame number at line " + std::to_string(line_no));
        }
        if (std::fabs(fields[1]) > 2147483647.0) {
            throw ParseError(name + ": bad id at line " + std::to_string(line_no));
        }

        DetRecord rec;
        rec.frame = static_cast<int>(fields[0]);
        rec.id = static_cast<int>(fields[1]);
        rec.left = fields[2];
        rec.top = fields[3];
        rec.width = fields[4];
        rec.height = fields[5];
        rec.conf = fields[6];
        rec.x = fields[7];
        rec.y = fields[8];
        rec.z = fields[9];

        max_frame = std::max(max_frame, rec.frame);
        if (rec.width <= 0.0 || rec.height <= 0.0) {
            ++seq.skipped_records;
            continue;
        }
        records.push_back(rec);
    }

    seq.total_frames = max_frame;
    seq.frames.resize(max_frame);
    for (int f = 0; f < max_frame; ++f) seq.frames[f].frame_index = f + 1;
    for (const DetRecord& rec : records) {
        BBox b;
        b.x1 = rec.left;
        b.y1 = rec.top;
        b.x2 = rec.left + rec.width;
        b.y2 = rec.top + rec.height;
        b.score = rec.conf;
        seq.frames[rec.frame - 1].dets.push_back(b);
    }
    return seq;
}

Sequence parse_det_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_det_stream(in, path);
}

std::string format_results(const std::vector<FrameEmissions>& emissions) {
    std::vector<const FrameEmissions*> ordered;
    ordered.reserve(emissions.size());
    for (const auto& fe : emissions) ordered.push_back(&fe);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->frame_index < b->frame_index; });

    std::string out;
    char buf[160];
    for (const FrameEmissions* fe : ordered) {
        std::vector<const Emission*> items;
        items.reserve(fe->items.size());
        for (const auto& e : fe->items) items.push_back(&e);
        std::stable_sort(items.begin(), items.end(),
                         [](const auto* a, const auto* b) { return a->id < b->id; });
        for (const Emission* e : items) {
            const double w = e->box.width();
            const double h = e->box.height();
            const int len = std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,1,-1,-1,-1\n",
                                          fe->frame_index, e->id, e->box.x1, e->box.y1, w, h);
            out.append(buf, static_cast<size_t>(len));
        }
    }
    return out;
}

void write_results(const std::string& path, const std::vector<FrameEmissions>& emissions) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    const std::string body = format_results(emissions);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("write failed for " + path);
}

void filter_confidence(Sequence& seq, double min_conf) {
    for (FrameDetections& fd : seq.frames) {
        std::erase_if(fd.dets, [&](const BBox& b) { return b.score < min_conf; });
    }
}

std::vector<std::vector<BBox>> synth_trajectories(int n_frames, int n_objects,
                                                  std::uint64_t seed, const SynthOptions& opts) {
    if (n_frames < 1 || n_objects < 1) {
        throw std::invalid_argument("synth: n_frames and n_objects must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    struct Body {
        double cx, cy, vx, vy, w, h;
    };
    // Objects start on a jittered grid so they are separated at frame 1.
    const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_objects))));
    std::vector<Body> bodies(n_objects);
    for (int o = 0; o < n_objects; ++o) {
        Body& b = bodies[o];
        b.w = 40.0 + 50.0 * unit(rng);
        b.h = b.w * (1.8 + 0.8 * unit(rng));
        const double cell_w = opts.field_w / grid;
        const double cell_h = opts.field_h / grid;
        b.cx = (o % grid + 0.25 + 0.5 * unit(rng)) * cell_w;
        b.cy = (o / grid + 0.25 + 0.5 * unit(rng)) * cell_h;
        const double theta = 2.0 * M_PI * unit(rng);
        b.vx = opts.speed * std::cos(theta);
        b.vy = opts.speed * std::sin(theta);
    }

    std::vector<std::vector<BBox>> traj(n_objects, std::vector<BBox>(n_frames));
    for (int f = 0; f < n_frames; ++f) {
        for (int o = 0; o < n_objects; ++o) {
            Body& b = bodies[o];
            if (f > 0) {
                b.cx += b.vx;
                b.cy += b.vy;
                if (b.cx - b.w / 2 < 0.0 || b.cx + b.w / 2 > opts.field_w) b.vx = -b.vx;
                if (b.cy - b.h / 2 < 0.0 || b.cy + b.h / 2 > opts.field_h) b.vy = -b.vy;
            }
            BBox box;
            box.x1 = b.cx - b.w / 2;
            box.y1 = b.cy - b.h / 2;
            box.x2 = b.cx + b.w / 2;
            box.y2 = b.cy + b.h / 2;
            box.score = 1.0;
            traj[o][f] = box;
        }
    }
    return traj;
}

Sequence synth_sequence(int n_frames, int n_objects, std::uint64_t seed,
                        const SynthOptions& opts) {
    const auto traj = synth_trajectories(n_frames, n_objects, seed, opts);

    // Separate stream for the per-record noise so the trajectories stay
    // identical whether or not dropout is enabled.
    std::mt19937_64 noise(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Sequence seq;
    seq.name = "synth-" + std::to_string(n_frames) + "x" + std::to_string(n_objects) + "-" +
               std::to_string(seed);
    seq.total_frames = n_frames;
    seq.frames.resize(n_frames);
    for (int f = 0; f < n_frames; ++f) {
        FrameDetections& fd = seq.frames[f];
        fd.frame_index = f + 1;
        for (int o = 0; o < n_objects; ++o) {
            const double drop = unit(noise);
            const double score = 0.6 + 0.4 * unit(noise);
            if (drop < opts.dropout) continue;
            BBox b = traj[o][f];
            b.score = score;
            fd.dets.push_back(b);
        }
    }
    return seq;
}

}  // namespace sortscale
