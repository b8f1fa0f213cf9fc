#pragma once

#include <optional>
#include <vector>

#include "risura/airlink.hpp"
#include "risura/tensor.hpp"

namespace risura {

struct Phase1Estimate {
    Matrix U_hat;
    Vector h1_hat;               // unit Euclidean norm (scale convention)
    double residual_norm = 0.0;  // ||Y - U_hat F_hat||_F at return
    int iterations_used = 0;
    std::vector<double> objective_trace;  // regularized objective per half-step
};

struct Phase1Options {
    double ridge = 1e-6;  // trace-normalized ridge; must be > 0 for singular systems
    int max_iter = 50;
    double tol = 1e-9;
    std::optional<Vector> h1_init;
};

// Oracle baseline: returns the true U so phase-2 performance can be isolated.
Phase1Estimate estimate_u_genie(const ChannelRealization& real);

// Alternating regularized least squares on Y = U (V had (h1 g1^T)) + W.
// The bilinear scale ambiguity is resolved by returning unit-norm h1 with
// the scalar absorbed into U_hat, leaving U_hat * F_hat unchanged.
Phase1Estimate estimate_u_alternating(const Matrix& Y, const Matrix& V_phase1, const Vector& g1,
                                      const Phase1Options& opts = {});

}  // namespace risura
