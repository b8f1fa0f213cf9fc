#include "risura/phase1.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace risura {

Phase1Estimate estimate_u_genie(const ChannelRealization& real) {
    Phase1Estimate est;
    est.U_hat = real.U;
    if (real.h.cols() > 0) {
        est.h1_hat = real.h.col(0);
        const double n = est.h1_hat.norm();
        if (n > 0) est.h1_hat /= n;
    }
    est.residual_norm = 0.0;
    est.iterations_used = 0;
    return est;
}

namespace {

Matrix solve_regularized(const Matrix& normal, double lambda, const Matrix& rhs) {
    Matrix a = normal;
    a.diagonal().array() += lambda;
    Eigen::LDLT<Matrix> ldlt(a);
    Matrix x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite())
        throw std::runtime_error(
            "phase1: singular normal equations; supply ridge > 0 to regularize");
    return x;
}

}  // namespace

Phase1Estimate estimate_u_alternating(const Matrix& Y, const Matrix& V_phase1, const Vector& g1,
                                      const Phase1Options& opts) {
    const Index N = V_phase1.rows();
    const Index tp = V_phase1.cols();
    if (g1.size() != tp || Y.cols() != tp)
        throw std::invalid_argument("phase1: shape mismatch between Y, V and g1");

    Phase1Estimate est;

    // init: back-project the dominant right singular direction of Y through
    // the support of V
    Vector h1(N);
    if (opts.h1_init) {
        h1 = *opts.h1_init;
    } else {
        h1.setZero();
        if (Y.norm() > 0) {
            Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinV);
            const Vector z = svd.matrixV().col(0);
            for (Index n = 0; n < N; ++n) {
                cd acc = 0.0;
                for (Index t = 0; t < tp; ++t)
                    acc += std::conj(V_phase1(n, t) * g1[t]) * z[t];
                h1[n] = acc;
            }
        }
    }
    if (h1.norm() > 0) h1 /= h1.norm();
    else h1.setConstant(cd(1.0 / std::sqrt(static_cast<double>(N)), 0.0));

    // W and the h-step normal matrix share the structure
    // A_h = (U^H U) had W with W = V* diag(|g1|^2) V^T, fixed across iterations.
    Matrix W = V_phase1.conjugate() * g1.cwiseAbs2().asDiagonal() * V_phase1.transpose();

    Matrix U = Matrix::Zero(Y.rows(), N);
    // both ridge levels are frozen during the first iteration; the recorded
    // objective trace starts once they are fixed, so every entry measures
    // the same function and exact half-step solves keep it non-increasing
    double lambda_u = -1.0, lambda_h = -1.0;
    double prev_obj = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        // U-step
        const Matrix F = V_phase1.cwiseProduct(h1 * g1.transpose());
        Matrix FFh = (F * F.adjoint());
        const double md_u = FFh.diagonal().real().mean();
        if (lambda_u < 0) lambda_u = opts.ridge * (md_u > 0 ? md_u : 1.0);
        // U = Y F^H (F F^H + lambda I)^{-1}, solved via the adjoint system
        U = solve_regularized(FFh, lambda_u, (Y * F.adjoint()).adjoint()).adjoint();
        if (lambda_h >= 0)
            est.objective_trace.push_back((Y - U * F).squaredNorm() + lambda_u * U.squaredNorm() +
                                          lambda_h * h1.squaredNorm());

        // h-step
        const Matrix UhU = U.adjoint() * U;
        Matrix Ah = UhU.cwiseProduct(W);
        const double md_h = Ah.diagonal().real().mean();
        if (lambda_h < 0) lambda_h = opts.ridge * (md_h > 0 ? md_h : 1.0);
        const Matrix Z = U.adjoint() * Y;
        Vector bh(N);
        for (Index n = 0; n < N; ++n) {
            cd acc = 0.0;
            for (Index t = 0; t < tp; ++t)
                acc += std::conj(g1[t] * V_phase1(n, t)) * Z(n, t);
            bh[n] = acc;
        }
        h1 = solve_regularized(Ah, lambda_h, bh);

        const Matrix F2 = V_phase1.cwiseProduct(h1 * g1.transpose());
        const double obj_h =
            (Y - U * F2).squaredNorm() + lambda_u * U.squaredNorm() + lambda_h * h1.squaredNorm();
        est.objective_trace.push_back(obj_h);

        if (std::isfinite(prev_obj) &&
            std::abs(prev_obj - obj_h) <= opts.tol * std::max(1.0, std::abs(prev_obj))) {
            ++it;
            break;
        }
        prev_obj = obj_h;
    }

    // resolve the bilinear scale: unit-norm h1, scalar absorbed into U so
    // that U * F is unchanged
    const double c = h1.norm();
    if (c > 0) {
        h1 /= c;
        U *= c;
    }
    est.U_hat = std::move(U);
    est.h1_hat = std::move(h1);
    const Matrix F = V_phase1.cwiseProduct(est.h1_hat * g1.transpose());
    est.residual_norm = (Y - est.U_hat * F).norm();
    est.iterations_used = it;
    return est;
}

}  // namespace risura
