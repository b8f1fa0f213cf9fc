#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "risura/rng.hpp"
#include "risura/tensor.hpp"

namespace risura {

// Gamma distribution in (shape, rate) parameterization; mean = shape/rate.
struct GammaParam {
    double shape = 1.0;
    double rate = 1.0;
    double mean() const { return shape / rate; }
    double mean_log() const;  // E[log x] = digamma(shape) - log(rate)
};

// Immutable per-run view of the coupled observations: the L data tensors,
// the mixing matrices, and everything derived from them that the sweeps
// reuse (unfoldings, P^H P, data energies).
struct CtadProblem {
    std::vector<ComplexTensor> Y;
    std::vector<Matrix> P;
    std::vector<std::vector<Matrix>> Y_unf;  // [l][mode], modes 0..d (d is the antenna mode)
    std::vector<Matrix> PhP;                 // P_l^H P_l
    std::vector<double> Y_energy;            // ||Y_l||_F^2
    int L = 0;
    int d = 0;                // data modes (tensor order is d+1)
    std::vector<Index> tau;   // per-mode sizes
    Index M = 0;              // antenna mode size
    Index Ng = 0;             // rows of G
    Index n_obs = 0;          // total complex observations, L * M * prod(tau)
    double total_energy = 0.0;

    static CtadProblem build(std::vector<ComplexTensor> Y, std::vector<Matrix> P);
};

// All variational posterior statistics. The covariance of g = row-major
// vec of G ((n,k) -> n*Kc + k) is stored dense; omega_block(n1,n2) views
// its Kc x Kc blocks.
struct VariationalState {
    Index Kc = 0;
    double delta = 1e-6;

    Matrix M_G;        // Ng x Kc posterior mean of G
    Matrix Omega;      // (Ng*Kc) x (Ng*Kc) posterior covariance of g

    std::vector<std::vector<Matrix>> M_x;      // [l][i], tau_i x Kc factor means
    std::vector<std::vector<Matrix>> Sigma_x;  // [l][i], Kc x Kc shared row covariance

    GammaParam beta;
    std::vector<GammaParam> gamma;             // per column of the X factors
    std::vector<GammaParam> eta;               // per column of G
    std::vector<std::vector<GammaParam>> xi;   // [n][k], per element of G

    std::vector<double> elbo_trace;
    std::vector<Index> kc_trace;

    Eigen::Block<Matrix> omega_block(Index n1, Index n2) {
        return Omega.block(n1 * Kc, n2 * Kc, Kc, Kc);
    }
    Eigen::Block<const Matrix> omega_block(Index n1, Index n2) const {
        return Omega.block(n1 * Kc, n2 * Kc, Kc, Kc);
    }
};

struct CtadSchedule {
    int max_sweeps = 300;
    double tol = 1e-7;        // relative ELBO change
    bool prune_enabled = true;
    int prune_start = 20;     // first sweep eligible for pruning
    int prune_every = 5;
    double kappa = 1e6;       // precision ratio threshold
    int omega_limit = 4096;   // max Ng * K_init
};

struct CtadReport {
    Index K_hat = 0;
    Matrix G_hat;                           // Ng x K_hat
    std::vector<std::vector<Matrix>> factors;  // [l][i] factor means
    double beta_mean = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> elbo_trace;
    std::vector<Index> kc_trace;
    std::vector<int> prune_sweeps;
};

// Deterministic initialization: factor means are seeded CN(0,1) columns
// rescaled to the per-entry RMS of the data, all covariances identity, and
// every gamma posterior set to (delta + count, delta + count) so all prior
// precision means start at 1.
VariationalState init_state(const CtadProblem& pb, Index K_init, double delta, Rng& rng);

// Mean-field coordinate updates. Each call maximizes the ELBO over its own
// factor given every other posterior held fixed.
void update_G(VariationalState& s, const CtadProblem& pb);
void update_X(VariationalState& s, const CtadProblem& pb, int l, int i,
              const Matrix* pg_gram_cache = nullptr);
void update_xi(VariationalState& s);
void update_eta(VariationalState& s);
void update_gamma(VariationalState& s, const CtadProblem& pb);
void update_beta(VariationalState& s, const CtadProblem& pb);

// Expected Gram E[(P_l G)^H (P_l G)] under Q(G).
Matrix expected_pg_gram(const VariationalState& s, const CtadProblem& pb, int l);

// E sum_l ||Y_l - [[X_l^1..X_l^d, P_l G]]||_F^2 under Q (the Eq.-18 bracket).
double expected_residual(const VariationalState& s, const CtadProblem& pb);

// Full evidence lower bound in closed form.
double compute_elbo(const VariationalState& s, const CtadProblem& pb);

// Removes columns whose eta and gamma precision means both exceed kappa
// times the respective minimum. Never drops below one column. Returns the
// number of removed columns.
int prune(VariationalState& s, double kappa);

// Algorithm sweep order: G, all (l, i) factors, xi, eta, gamma, beta; ELBO
// after each sweep; pruning per schedule; stops on relative ELBO change
// below tol (evaluated within a pruning epoch) or max_sweeps.
CtadReport run_ctad(const CtadProblem& pb, Index K_init, double delta,
                    const CtadSchedule& schedule, std::uint64_t seed,
                    std::ostream* diag_csv = nullptr);

CtadReport run_ctad(std::vector<ComplexTensor> Y, std::vector<Matrix> P, Index K_init,
                    double delta, const CtadSchedule& schedule, std::uint64_t seed,
                    std::ostream* diag_csv = nullptr);

// Hermitian positive-definite inverse with jitter escalation
// (1e-12, 1e-10, 1e-8 of the mean diagonal) before giving up.
Matrix hermitian_inverse(const Matrix& a, const char* context);

double digamma(double x);

}  // namespace risura
