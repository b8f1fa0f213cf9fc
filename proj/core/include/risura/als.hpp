#pragma once

#include <cstdint>
#include <vector>

#include "risura/ctad.hpp"
#include "risura/tensor.hpp"

namespace risura {

struct AlsReport {
    Matrix G;                                  // Ng x K_fixed
    std::vector<std::vector<Matrix>> factors;  // [l][i]
    std::vector<double> residual_trace;        // relative residual per sweep
    int iterations = 0;
    bool converged = false;
};

// Plain coupled alternating least squares at a fixed column count: exact LS
// for every X_l^i and for the shared G (all L blocks stacked). No priors,
// no pruning; rank-deficient solves fall back to a 1e-10 ridge jitter.
AlsReport als_fit(const CtadProblem& pb, Index K_fixed, int max_iter, double tol,
                  std::uint64_t seed);

AlsReport als_fit(std::vector<ComplexTensor> Y, std::vector<Matrix> P, Index K_fixed,
                  int max_iter, double tol, std::uint64_t seed);

}  // namespace risura
