#include "sortscale/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sortscale {

namespace {

void validate(const CostMatrix& c) {
    if (c.rows < 1 || c.cols < 1) {
        throw InvalidCostError("cost matrix must be at least 1x1");
    }
    if (c.cost.size() != static_cast<size_t>(c.rows) * c.cols) {
        throw InvalidCostError("cost matrix storage does not match its shape");
    }
    for (size_t i = 0; i < c.cost.size(); ++i) {
        const double v = c.cost[i];
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidCostError("cost entry " + std::to_string(i) +
                                   " is not a finite nonnegative number");
        }
    }
}

// Kuhn-Munkres on a square matrix via shortest augmenting paths over the
// reduced costs. The row/column reductions of the classic description are
// subsumed by the dual potentials u, v. Columns are scanned in ascending
// order with strict comparisons, so equal-cost alternatives resolve to the
// lowest column index. Returns col_of_row.
std::vector<int> hungarian_square(const std::vector<double>& a, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);  // 1-based; p[j] = row matched to col j
    std::vector<char> used(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    }
    return col_of_row;
}

AssignmentResult assemble(const CostMatrix& c, const std::vector<int>& col_of_row) {
    AssignmentResult res;
    std::vector<char> col_used(c.cols, 0);
    for (int i = 0; i < c.rows; ++i) {
        const int j = col_of_row[i];
        if (j >= 0 && j < c.cols) {
            res.pairs.emplace_back(i, j);
            col_used[j] = 1;
            res.total_cost += c.at(i, j);
        } else {
            res.unmatched_rows.push_back(i);
        }
    }
    for (int j = 0; j < c.cols; ++j) {
        if (!col_used[j]) res.unmatched_cols.push_back(j);
    }
    return res;
}

}  // namespace

AssignmentResult solve_rectangular_padded(const CostMatrix& c) {
    validate(c);
    const int k = std::max(c.rows, c.cols);
    const double max_entry = *std::max_element(c.cost.begin(), c.cost.end());
    const double sentinel = 1.0 + static_cast<double>(c.rows) * c.cols * max_entry;

    std::vector<double> padded(static_cast<size_t>(k) * k, sentinel);
    for (int i = 0; i < c.rows; ++i) {
        for (int j = 0; j < c.cols; ++j) {
            padded[static_cast<size_t>(i) * k + j] = c.at(i, j);
        }
    }
    std::vector<int> col_of_row = hungarian_square(padded, k);
    col_of_row.resize(c.rows);  // drop padded rows; padded cols filtered in assemble()
    return assemble(c, col_of_row);
}

AssignmentResult solve(const CostMatrix& c) {
    validate(c);
    if (c.rows == c.cols) {
        return assemble(c, hungarian_square(c.cost, c.rows));
    }
    return solve_rectangular_padded(c);
}

}  // namespace sortscale
