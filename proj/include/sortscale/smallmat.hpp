#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace sortscale {

/// Hard cap on matrix/vector dimensions. Everything in the tracking
/// pipeline is tiny (7x7 state covariance, 4x7 observation map, per-frame
/// detection tables), so fixed-capacity storage keeps every kernel off the
/// heap.
inline constexpr int kMaxDim = 16;

/// Shape contract violation (mismatched dimensions, out-of-range sizes).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Factorization failure: the input is not symmetric positive definite.
/// In the tracking pipeline this signals a corrupted covariance.
struct DecompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void check_dim(int n, const char* what) {
    if (n < 1 || n > kMaxDim) {
        throw DimensionError(std::string(what) + " out of range [1," +
                             std::to_string(kMaxDim) + "]: " + std::to_string(n));
    }
}
}  // namespace detail

/// Dense row-major matrix with fixed capacity and value semantics.
class Mat {
public:
    Mat() = default;

    Mat(int rows, int cols) : rows_(rows), cols_(cols) {
        detail::check_dim(rows, "rows");
        detail::check_dim(cols, "cols");
        data_.fill(0.0);
    }

    Mat(std::initializer_list<std::initializer_list<double>> init)
        : Mat(static_cast<int>(init.size()),
              init.size() ? static_cast<int>(init.begin()->size()) : 0) {
        int i = 0;
        for (const auto& row : init) {
            if (static_cast<int>(row.size()) != cols_) {
                throw DimensionError("ragged initializer");
            }
            int j = 0;
            for (double v : row) (*this)(i, j++) = v;
            ++i;
        }
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat diag(std::initializer_list<double> d) {
        Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        int i = 0;
        for (double v : d) {
            m(i, i) = v;
            ++i;
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<size_t>(i) * cols_ + j];
    }

    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::array<double, kMaxDim * kMaxDim> data_{};
};

/// Fixed-capacity column vector.
class Vec {
public:
    Vec() = default;

    explicit Vec(int len) : len_(len) {
        detail::check_dim(len, "len");
        data_.fill(0.0);
    }

    Vec(std::initializer_list<double> init) : Vec(static_cast<int>(init.size())) {
        int i = 0;
        for (double v : init) data_[i++] = v;
    }

    int len() const { return len_; }

    double& operator[](int i) {
        assert(i >= 0 && i < len_);
        return data_[static_cast<size_t>(i)];
    }
    double operator[](int i) const {
        assert(i >= 0 && i < len_);
        return data_[static_cast<size_t>(i)];
    }

private:
    int len_ = 0;
    std::array<double, kMaxDim> data_{};
};

inline Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.cols()) + " cols vs " +
                             std::to_string(b.rows()) + " rows");
    }
    Mat out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

inline Vec matvec(const Mat& a, const Vec& v) {
    if (a.cols() != v.len()) {
        throw DimensionError("matvec: " + std::to_string(a.cols()) + " cols vs len " +
                             std::to_string(v.len()));
    }
    Vec out(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

inline Mat transpose(const Mat& a) {
    Mat out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    }
    return out;
}

/// In-place A <- (A + A^T)/2. Callers apply this before cholesky() rather
/// than the kernel doing it silently.
inline void symmetrize(Mat& a) {
    assert(a.rows() == a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = i + 1; j < a.cols(); ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = m;
            a(j, i) = m;
        }
    }
}

/// Lower-triangular Cholesky factor L with L L^T == a.
/// Requires a square input, symmetric within 1e-9, positive definite.
inline Mat cholesky(const Mat& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("cholesky: matrix not square");
    }
    const int n = a.rows();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!(std::fabs(a(i, j) - a(j, i)) <= 1e-9)) {
                throw DecompositionError("cholesky: input not symmetric");
            }
        }
    }
    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) {  // also rejects NaN
            throw DecompositionError("cholesky: matrix not positive definite");
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

/// Inverse of a symmetric positive definite matrix via Cholesky
/// forward/back substitution. The only inverse the pipeline needs is the
/// innovation covariance S, which is SPD by construction.
inline Mat inverse_spd(const Mat& a) {
    const Mat l = cholesky(a);
    const int n = a.rows();
    Mat inv(n, n);
    // Solve L y = e_c (forward), then L^T x = y (back), column by column.
    for (int c = 0; c < n; ++c) {
        std::array<double, kMaxDim> y{};
        for (int i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * inv(k, c);
            inv(i, c) = s / l(i, i);
        }
    }
    return inv;
}

enum class EwOp { Add, Sub, Mul, Min };

namespace detail {
inline double ew_apply(EwOp op, double x, double y) {
    switch (op) {
        case EwOp::Add: return x + y;
        case EwOp::Sub: return x - y;
        case EwOp::Mul: return x * y;
        case EwOp::Min: return x < y ? x : y;
    }
    return 0.0;  // unreachable
}
}  // namespace detail

inline Mat ew_binary(EwOp op, const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("ew_binary: shape mismatch");
    }
    Mat out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out(i, j) = detail::ew_apply(op, a(i, j), b(i, j));
        }
    }
    return out;
}

inline Vec ew_binary(EwOp op, const Vec& a, const Vec& b) {
    if (a.len() != b.len()) {
        throw DimensionError("ew_binary: length mismatch");
    }
    Vec out(a.len());
    for (int i = 0; i < a.len(); ++i) out[i] = detail::ew_apply(op, a[i], b[i]);
    return out;
}

inline Mat scale(const Mat& a, double k) {
    Mat out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * k;
    }
    return out;
}

inline Vec scale(const Vec& a, double k) {
    Vec out(a.len());
    for (int i = 0; i < a.len(); ++i) out[i] = a[i] * k;
    return out;
}

}  // namespace sortscale
