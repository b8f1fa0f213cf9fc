#include "risura/airlink.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace risura {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Vector steering_vector(double x, int np) {
    if (np < 1) throw std::invalid_argument("steering_vector: array length must be >= 1");
    Vector v(np);
    const double scale = 1.0 / std::sqrt(static_cast<double>(np));
    for (int n = 0; n < np; ++n) {
        const double phase = -std::numbers::pi * x * n;
        v[n] = scale * cd(std::cos(phase), std::sin(phase));
    }
    return v;
}

std::vector<double> uniform_grid(int count) {
    if (count < 1) throw std::invalid_argument("uniform_grid: count must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int q = 0; q < count; ++q) g[static_cast<std::size_t>(q)] = -1.0 + 2.0 * q / count;
    return g;
}

Matrix build_dictionary(const SystemConfig& cfg) {
    if (cfg.N1g < cfg.N1 || cfg.N2g < cfg.N2)
        throw std::invalid_argument("build_dictionary: grid lengths must cover the array");
    const auto nu = uniform_grid(cfg.N1g);
    const auto si = uniform_grid(cfg.N2g);

    Matrix a1(cfg.N1, cfg.N1g);
    for (int q = 0; q < cfg.N1g; ++q) a1.col(q) = steering_vector(nu[static_cast<std::size_t>(q)], cfg.N1);
    Matrix a2(cfg.N2, cfg.N2g);
    for (int q = 0; q < cfg.N2g; ++q) a2.col(q) = steering_vector(si[static_cast<std::size_t>(q)], cfg.N2);
    return kronecker(a1, a2);
}

namespace {

// Steering vector of one physical path, consistent with the dictionary's
// kron order: first axis direction cosine cos(el)*sin(az), second -cos(el)*cos(az).
Vector path_steering(double az, double el, int n1, int n2) {
    const double u1 = std::cos(el) * std::sin(az);
    const double u2 = -std::cos(el) * std::cos(az);
    return kronecker(steering_vector(u1, n1), steering_vector(u2, n2));
}

}  // namespace

ChannelRealization synth_channels(const SystemConfig& cfg, Rng& rng) {
    ChannelRealization real;
    real.A_R = build_dictionary(cfg);
    const int N = cfg.N();
    const int Ng = cfg.Ng();
    const double l0 = db_to_linear(cfg.pathloss.l0_db);

    real.lambda = Matrix::Zero(Ng, cfg.Ka);
    real.h = Matrix::Zero(N, cfg.Ka);

    for (int k = 0; k < cfg.Ka; ++k) {
        const double dist = rng.uniform(cfg.dist_min, cfg.dist_max);
        const double eps_k = l0 * std::pow(dist / cfg.pathloss.d0, -cfg.pathloss.exp_devris);
        const double amp = std::sqrt(eps_k);

        if (cfg.channel_mode == ChannelMode::OnGrid) {
            std::set<int> support;
            while (static_cast<int>(support.size()) < cfg.zeta_s)
                support.insert(static_cast<int>(rng.index(static_cast<std::uint64_t>(Ng))));
            for (int idx : support) real.lambda(idx, k) = amp * rng.cgauss();
            real.h.col(k) = real.A_R * real.lambda.col(k);
        } else {
            const double spread = cfg.angular_spread_deg * std::numbers::pi / 180.0;
            const double az0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double el0 = rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
            Vector hk = Vector::Zero(N);
            for (int i = 0; i < cfg.paths_per_device; ++i) {
                const double az = az0 + rng.uniform(-0.5 * spread, 0.5 * spread);
                const double el = el0 + rng.uniform(-0.5 * spread, 0.5 * spread);
                hk += rng.cgauss() * path_steering(az, el, cfg.N1, cfg.N2);
            }
            real.h.col(k) = amp * hk;
            // reference projection only; exact equality holds in on-grid mode
            real.lambda.col(k) = real.A_R.colPivHouseholderQr().solve(real.h.col(k));
        }
    }

    const double risbs_gain =
        l0 * std::pow(cfg.dist_risbs / cfg.pathloss.d0, -cfg.pathloss.exp_risbs);
    const double uamp = std::sqrt(risbs_gain);
    real.U.resize(cfg.M, N);
    for (Index n = 0; n < real.U.cols(); ++n)
        for (Index m = 0; m < real.U.rows(); ++m) real.U(m, n) = uamp * rng.cgauss();
    return real;
}

RisPatterns gen_ris_patterns(const SystemConfig& cfg, Rng& rng) {
    RisPatterns pat;
    const int N = cfg.N();
    const int tp = cfg.effective_t_p();
    pat.V_phase1 = Matrix::Zero(N, tp);
    for (int t = 0; t < tp; ++t)
        for (int n = 0; n < N; ++n) {
            const bool on = rng.bernoulli(cfg.p_on);
            const cd phase = rng.cphase();  // drawn regardless so the stream is position-stable
            if (on) pat.V_phase1(n, t) = phase;
        }
    pat.v_phase2.resize(static_cast<std::size_t>(cfg.L));
    for (int l = 0; l < cfg.L; ++l) {
        Vector v(N);
        for (int n = 0; n < N; ++n) v[n] = rng.cphase();
        pat.v_phase2[static_cast<std::size_t>(l)] = std::move(v);
    }
    return pat;
}

Matrix effective_mixing(const Matrix& U, const Matrix& A_R, const Vector& v_l) {
    if (U.cols() != A_R.rows() || v_l.size() != U.cols())
        throw std::invalid_argument("effective_mixing: shape mismatch");
    // Vhat_l = U scaled column-wise by v_l
    return (U * v_l.asDiagonal()) * A_R;
}

void apply_patterns(ChannelRealization& real, const RisPatterns& patterns) {
    real.V_phase1 = patterns.V_phase1;
    real.v_phase2 = patterns.v_phase2;
    real.P.clear();
    real.P.reserve(real.v_phase2.size());
    for (const auto& v : real.v_phase2) real.P.push_back(effective_mixing(real.U, real.A_R, v));
}

ChannelRealization build_realization(const SystemConfig& cfg, Rng& chan_rng, Rng& ris_rng) {
    ChannelRealization real = synth_channels(cfg, chan_rng);
    apply_patterns(real, gen_ris_patterns(cfg, ris_rng));
    return real;
}

Matrix phase1_rx(const Matrix& U, const Vector& h1, const Vector& g1, const Matrix& V_phase1,
                 double noise_var, Rng& rng) {
    if (U.cols() != h1.size() || V_phase1.rows() != h1.size() || V_phase1.cols() != g1.size())
        throw std::invalid_argument("phase1_rx: shape mismatch");
    const Matrix F = V_phase1.cwiseProduct(h1 * g1.transpose());
    Matrix Y = U * F;
    if (noise_var > 0) {
        const double s = std::sqrt(noise_var);
        for (Index j = 0; j < Y.cols(); ++j)
            for (Index i = 0; i < Y.rows(); ++i) Y(i, j) += s * rng.cgauss();
    }
    return Y;
}

Vector outer_product_vec(const std::vector<Vector>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("outer_product_vec: no vectors");
    Vector acc = vectors.front();
    for (std::size_t m = 1; m < vectors.size(); ++m) {
        const Vector& w = vectors[m];
        Vector next(acc.size() * w.size());
        for (Index j = 0; j < w.size(); ++j) next.segment(j * acc.size(), acc.size()) = w[j] * acc;
        acc = std::move(next);
    }
    return acc;
}

std::vector<ComplexTensor> phase2_rx(const ChannelRealization& real,
                                     const std::vector<std::vector<Matrix>>& mode_factors,
                                     double noise_var, Rng& rng) {
    const std::size_t L = real.P.size();
    if (mode_factors.size() != L) throw std::invalid_argument("phase2_rx: need factors for every subblock");
    const Index Ka = real.lambda.cols();

    std::vector<ComplexTensor> out;
    out.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        const auto& modes = mode_factors[l];
        std::vector<Index> shape;
        for (const auto& x : modes) {
            if (x.cols() != Ka) throw std::invalid_argument("phase2_rx: factor column count != Ka");
            shape.push_back(x.rows());
        }
        shape.push_back(real.P[l].rows());

        ComplexTensor y(shape);
        for (Index k = 0; k < Ka; ++k) {
            std::vector<Vector> vecs;
            vecs.reserve(modes.size() + 1);
            for (const auto& x : modes) vecs.push_back(x.col(k));
            vecs.push_back(real.P[l] * real.lambda.col(k));
            y.vec() += outer_product_vec(vecs);
        }
        if (noise_var > 0) {
            const double s = std::sqrt(noise_var);
            for (Index j = 0; j < y.vec().size(); ++j) y.vec()[j] += s * rng.cgauss();
        }
        out.push_back(std::move(y));
    }
    return out;
}

}  // namespace risura
