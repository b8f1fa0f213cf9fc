#pragma once

#include "risura/config.hpp"
#include "risura/rng.hpp"
#include "risura/tensor.hpp"

namespace risura {

// Ground truth for one trial: angular dictionary, sparse coefficients,
// device-RIS channels, RIS-BS matrix, reflection patterns and the effective
// per-subblock mixing matrices P_l.
struct ChannelRealization {
    Matrix A_R;                     // N x Ng dictionary of steering vectors
    Matrix lambda;                  // Ng x Ka angular coefficients (columns lambda_k)
    Matrix h;                       // N x Ka device-RIS channels
    Matrix U;                       // M x N RIS-BS channel
    Matrix V_phase1;                // N x t_p phase-1 reflection matrix
    std::vector<Vector> v_phase2;   // L phase-2 reflection vectors (length N)
    std::vector<Matrix> P;          // L mixing matrices, each M x Ng
};

struct RisPatterns {
    Matrix V_phase1;
    std::vector<Vector> v_phase2;
};

// Half-wavelength ULA steering vector (1/sqrt(Np)) * [1, e^{-j pi x}, ...],
// unit Euclidean norm, for direction cosine x in [-1, 1].
Vector steering_vector(double x, int np);

// count uniformly spaced points -1 + 2q/count, q = 0..count-1. At
// count == Np these are the DFT directions of an Np-element array.
std::vector<double> uniform_grid(int count);

// N x Ng dictionary: [phi_{N1}(nu_1)..phi_{N1}(nu_{N1g})] kron
// [phi_{N2}(si_1)..phi_{N2}(si_{N2g})].
Matrix build_dictionary(const SystemConfig& cfg);

// Draws channels (device-RIS and RIS-BS) for one trial. On-grid mode places
// zeta_s nonzeros per device on dictionary columns; physical mode draws
// paths_per_device off-grid paths within the configured angular spread and
// keeps lambda as the least-squares projection for reference.
ChannelRealization synth_channels(const SystemConfig& cfg, Rng& rng);

// Phase-1 Bernoulli on/off pattern with uniform phases; phase-2 all-on
// vectors with uniform phases, constant within a subblock.
RisPatterns gen_ris_patterns(const SystemConfig& cfg, Rng& rng);

// P_l = Vhat_l A_R with Vhat_l(:, n) = v_l(n) U(:, n).
Matrix effective_mixing(const Matrix& U, const Matrix& A_R, const Vector& v_l);

// Stores the patterns into the realization and recomputes every P_l.
void apply_patterns(ChannelRealization& real, const RisPatterns& patterns);

ChannelRealization build_realization(const SystemConfig& cfg, Rng& chan_rng, Rng& ris_rng);

// Phase-1 observation Y = U (V had (h1 g1^T)) + W, W iid CN(0, noise_var).
Matrix phase1_rx(const Matrix& U, const Vector& h1, const Vector& g1, const Matrix& V_phase1,
                 double noise_var, Rng& rng);

// Phase-2 observations. mode_factors[l][i] is tau_i x Ka with column k the
// mode-i vector of device k's rank-1 signal tensor in subblock l. Each Y_l
// is assembled device by device as a sum of rank-1 outer products with
// channel factor P_l lambda_k, plus iid CN(0, noise_var) noise.
std::vector<ComplexTensor> phase2_rx(const ChannelRealization& real,
                                     const std::vector<std::vector<Matrix>>& mode_factors,
                                     double noise_var, Rng& rng);

// vec of the rank-1 outer product of the given vectors (first vector's
// index fastest in the canonical order).
Vector outer_product_vec(const std::vector<Vector>& vectors);

double db_to_linear(double db);

}  // namespace risura
