#pragma once

// Straightforward dense reference for the filter equations: plain nested
// loops over std::vector storage and a Gauss-Jordan inverse, sharing no
// code path with the fixed-capacity kernels it checks.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace testutil {

using DMat = std::vector<std::vector<double>>;
using DVec = std::vector<double>;

inline DMat d_zeros(int r, int c) { return DMat(r, DVec(c, 0.0)); }

inline DMat d_identity(int n) {
    DMat m = d_zeros(n, n);
    for (int i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline DMat d_matmul(const DMat& a, const DMat& b) {
    const int r = static_cast<int>(a.size());
    const int k = static_cast<int>(b.size());
    const int c = static_cast<int>(b[0].size());
    DMat out = d_zeros(r, c);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            double s = 0.0;
            for (int t = 0; t < k; ++t) s += a[i][t] * b[t][j];
            out[i][j] = s;
        }
    }
    return out;
}

inline DVec d_matvec(const DMat& a, const DVec& v) {
    DVec out(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (size_t j = 0; j < v.size(); ++j) s += a[i][j] * v[j];
        out[i] = s;
    }
    return out;
}

inline DMat d_transpose(const DMat& a) {
    DMat out = d_zeros(static_cast<int>(a[0].size()), static_cast<int>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
    }
    return out;
}

inline DMat d_add(const DMat& a, const DMat& b) {
    DMat out = a;
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < a[0].size(); ++j) out[i][j] += b[i][j];
    }
    return out;
}

inline void d_symmetrize(DMat& a) {
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = i + 1; j < a.size(); ++j) {
            const double m = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = m;
            a[j][i] = m;
        }
    }
}

// Gauss-Jordan with partial pivoting.
inline DMat d_inverse(DMat a) {
    const int n = static_cast<int>(a.size());
    DMat inv = d_identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (a[pivot][col] == 0.0) throw std::runtime_error("d_inverse: singular");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (int j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

struct RefState {
    DVec x;
    DMat P;
};

inline RefState ref_predict(const RefState& st, const DMat& f, const DMat& q) {
    RefState out;
    DVec x = st.x;
    if (x.size() >= 7 && x[2] + x[6] <= 0.0) x[6] = 0.0;
    out.x = d_matvec(f, x);
    out.P = d_add(d_matmul(d_matmul(f, st.P), d_transpose(f)), q);
    d_symmetrize(out.P);
    return out;
}

inline RefState ref_update(const RefState& st, const DMat& h, const DMat& r, const DVec& z) {
    const DVec hx = d_matvec(h, st.x);
    DVec y(z.size());
    for (size_t i = 0; i < z.size(); ++i) y[i] = z[i] - hx[i];

    const DMat pht = d_matmul(st.P, d_transpose(h));
    DMat s = d_add(d_matmul(h, pht), r);
    d_symmetrize(s);
    const DMat k = d_matmul(pht, d_inverse(s));

    RefState out;
    const DVec ky = d_matvec(k, y);
    out.x = st.x;
    for (size_t i = 0; i < out.x.size(); ++i) out.x[i] += ky[i];

    const int n = static_cast<int>(st.x.size());
    DMat ikh = d_identity(n);
    const DMat kh = d_matmul(k, h);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) ikh[i][j] -= kh[i][j];
    }
    out.P = d_matmul(ikh, st.P);
    d_symmetrize(out.P);
    return out;
}

}  // namespace testutil
