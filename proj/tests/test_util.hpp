#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sortscale/mot_io.hpp"
#include "sortscale/smallmat.hpp"
#include "sortscale/tracker.hpp"

namespace testutil {

inline double max_abs_diff(const sortscale::Mat& a, const sortscale::Mat& b) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            m = std::max(m, std::fabs(a(i, j) - b(i, j)));
        }
    }
    return m;
}

inline double max_abs_diff(const sortscale::Vec& a, const sortscale::Vec& b) {
    double m = 0.0;
    for (int i = 0; i < a.len(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline sortscale::Mat rand_mat(std::mt19937_64& rng, int rows, int cols, double lo = -1.0,
                               double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    sortscale::Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

inline sortscale::Vec rand_vec(std::mt19937_64& rng, int len, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    sortscale::Vec v(len);
    for (int i = 0; i < len; ++i) v[i] = dist(rng);
    return v;
}

// G G^T + ridge*I is symmetric positive definite for any G.
inline sortscale::Mat rand_spd(std::mt19937_64& rng, int n, double ridge = 0.5) {
    const sortscale::Mat g = rand_mat(rng, n, n);
    sortscale::Mat spd = sortscale::matmul(g, sortscale::transpose(g));
    for (int i = 0; i < n; ++i) spd(i, i) += ridge;
    sortscale::symmetrize(spd);
    return spd;
}

// Fraction of ground-truth presence frames on which each synthetic object
// was covered (IoU >= 0.5) by its modal tracker id.
inline double identity_consistency(const std::vector<std::vector<sortscale::BBox>>& truth,
                                   const std::vector<sortscale::FrameEmissions>& emissions) {
    const int n_objects = static_cast<int>(truth.size());
    long long consistent = 0;
    long long total = 0;
    for (int o = 0; o < n_objects; ++o) {
        std::vector<int> matched_ids;
        const int n_frames = static_cast<int>(truth[o].size());
        for (int f = 0; f < n_frames; ++f) {
            ++total;
            double best = 0.5;
            int best_id = -1;
            for (const sortscale::Emission& e : emissions[f].items) {
                const double v = sortscale::iou(truth[o][f], e.box);
                if (v > best) {
                    best = v;
                    best_id = e.id;
                }
            }
            if (best_id >= 0) matched_ids.push_back(best_id);
        }
        if (matched_ids.empty()) continue;
        std::sort(matched_ids.begin(), matched_ids.end());
        long long best_run = 0, run = 1;
        for (size_t i = 1; i <= matched_ids.size(); ++i) {
            if (i < matched_ids.size() && matched_ids[i] == matched_ids[i - 1]) {
                ++run;
            } else {
                best_run = std::max(best_run, run);
                run = 1;
            }
        }
        consistent += best_run;
    }
    return total > 0 ? static_cast<double>(consistent) / total : 0.0;
}

}  // namespace testutil
