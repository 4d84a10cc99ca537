#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace sortscale {

/// Cost matrix entry is invalid (NaN, infinite, or negative).
struct InvalidCostError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Rectangular nonnegative cost grid. Rows index measured objects
/// (detections), columns index predictions.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> cost;  // row-major, rows*cols entries

    CostMatrix() = default;
    CostMatrix(int r, int c) : rows(r), cols(c), cost(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return cost[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return cost[static_cast<size_t>(i) * cols + j]; }
};

/// Optimal matching of size min(rows, cols) plus the leftover indices.
/// pairs is sorted by row; together with the unmatched lists it partitions
/// all rows and columns exactly.
struct AssignmentResult {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
    double total_cost = 0.0;
};

/// Minimum-cost assignment. Deterministic: cost ties are broken toward the
/// lowest column index.
AssignmentResult solve(const CostMatrix& c);

/// Same result as solve(); rectangular inputs are squared up with a
/// sentinel cost larger than any real entry, and sentinel pairs are
/// stripped into the unmatched lists afterwards.
AssignmentResult solve_rectangular_padded(const CostMatrix& c);

}  // namespace sortscale
