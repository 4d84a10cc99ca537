#include "sortscale/kalman.hpp"

#include <cmath>

namespace sortscale {

KalmanModel KalmanModel::constant_velocity() {
    KalmanModel m;
    m.F = Mat::identity(kStateDim);
    m.F(0, 4) = 1.0;
    m.F(1, 5) = 1.0;
    m.F(2, 6) = 1.0;
    m.H = Mat(kObsDim, kStateDim);
    for (int i = 0; i < kObsDim; ++i) m.H(i, i) = 1.0;
    m.Q = Mat::diag({1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1e-4});
    m.R = Mat::diag({1.0, 1.0, 10.0, 10.0});
    return m;
}

Mat KalmanModel::initial_covariance() {
    return Mat::diag({10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4});
}

Observation bbox_to_z(const BBox& b) {
    const double w = b.x2 - b.x1;
    const double h = b.y2 - b.y1;
    if (!(w > 0.0) || !(h > 0.0)) {
        throw InvalidBoxError("bbox_to_z: degenerate box");
    }
    Observation obs;
    obs.z = Vec{b.x1 + w / 2.0, b.y1 + h / 2.0, w * h, w / h};
    return obs;
}

BBox x_to_bbox(const Vec& x) {
    const double s = x[2];
    const double r = x[3];
    if (!(s > 0.0) || !(r > 0.0)) {
        throw InvalidStateError("x_to_bbox: nonpositive area or ratio");
    }
    const double w = std::sqrt(s * r);
    const double h = s / w;
    BBox b;
    b.x1 = x[0] - w / 2.0;
    b.y1 = x[1] - h / 2.0;
    b.x2 = x[0] + w / 2.0;
    b.y2 = x[1] + h / 2.0;
    b.score = 0.0;
    return b;
}

KalmanState predict(const KalmanState& st, const KalmanModel& m) {
    KalmanState out;
    Vec x = st.x;
    if (x[2] + x[6] <= 0.0) x[6] = 0.0;  // keep the area positive across the transition
    out.x = matvec(m.F, x);
    if (m.B && m.u) {
        out.x = ew_binary(EwOp::Add, out.x, matvec(*m.B, *m.u));
    }
    out.P = ew_binary(EwOp::Add, matmul(matmul(m.F, st.P), transpose(m.F)), m.Q);
    symmetrize(out.P);
    return out;
}

KalmanState update(const KalmanState& st, const KalmanModel& m, const Observation& obs) {
    const Vec y = ew_binary(EwOp::Sub, obs.z, matvec(m.H, st.x));
    const Mat pht = matmul(st.P, transpose(m.H));
    Mat s = ew_binary(EwOp::Add, matmul(m.H, pht), m.R);
    symmetrize(s);
    Mat s_inv;
    try {
        s_inv = inverse_spd(s);
    } catch (const DecompositionError&) {
        throw FilterDivergenceError("update: innovation covariance not SPD");
    }
    const Mat k = matmul(pht, s_inv);

    KalmanState out;
    out.x = ew_binary(EwOp::Add, st.x, matvec(k, y));
    const Mat ikh = ew_binary(EwOp::Sub, Mat::identity(st.P.rows()), matmul(k, m.H));
    out.P = matmul(ikh, st.P);
    symmetrize(out.P);
    return out;
}

}  // namespace sortscale
