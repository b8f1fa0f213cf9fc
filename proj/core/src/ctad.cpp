#include "risura/ctad.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace risura {

double digamma(double x) {
    // recurrence to x >= 6, then the asymptotic series
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double GammaParam::mean_log() const { return digamma(shape) - std::log(rate); }

Matrix hermitian_inverse(const Matrix& a, const char* context) {
    Matrix h = 0.5 * (a + a.adjoint());
    const double md = std::max(h.diagonal().real().mean(), 0.0);
    static constexpr double kJitter[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double j : kJitter) {
        Matrix trial = h;
        if (j > 0) trial.diagonal().array() += j * (md > 0 ? md : 1.0);
        Eigen::LLT<Matrix> llt(trial);
        if (llt.info() == Eigen::Success) {
            Matrix inv = llt.solve(Matrix::Identity(h.rows(), h.cols()));
            if (inv.allFinite()) return 0.5 * (inv + inv.adjoint());
        }
    }
    throw std::runtime_error(std::string("hermitian_inverse failed in ") + context);
}

namespace {

double hermitian_logdet(const Matrix& a, const char* context) {
    const double md = std::max(a.diagonal().real().mean(), 0.0);
    static constexpr double kJitter[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double j : kJitter) {
        Matrix trial = 0.5 * (a + a.adjoint());
        if (j > 0) trial.diagonal().array() += j * (md > 0 ? md : 1.0);
        Eigen::LLT<Matrix> llt(trial);
        if (llt.info() == Eigen::Success) {
            double ld = 0.0;
            for (Index i = 0; i < trial.rows(); ++i)
                ld += std::log(std::real(llt.matrixLLT()(i, i)));
            return 2.0 * ld;
        }
    }
    throw std::runtime_error(std::string("hermitian_logdet failed in ") + context);
}

// E[X^H X] for one factor posterior: mean Gram plus tau_i times the shared
// row covariance.
Matrix mode_gram(const VariationalState& s, const CtadProblem& pb, int l, int i) {
    return gram_expect(s.M_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)],
                       s.Sigma_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)],
                       pb.tau[static_cast<std::size_t>(i)]);
}

// Hadamard chain of all mode Grams (skip < 0) or all but one.
Matrix gram_chain(const VariationalState& s, const CtadProblem& pb, int l, int skip) {
    Matrix out = Matrix::Ones(s.Kc, s.Kc);
    for (int i = 0; i < pb.d; ++i) {
        if (i == skip) continue;
        out = out.cwiseProduct(mode_gram(s, pb, l, i));
    }
    return out;
}

// Khatri-Rao chain of factor means in descending mode order, with P_l M_G
// occupying the top (antenna) mode; pass skip = d to exclude it.
Matrix mean_chain(const VariationalState& s, const CtadProblem& pb, int l, int skip,
                  const Matrix* pmg) {
    std::vector<Matrix> factors(s.M_x[static_cast<std::size_t>(l)]);
    if (pmg) factors.push_back(*pmg);
    return khatri_rao_chain_excluding(factors, skip);
}

}  // namespace

CtadProblem CtadProblem::build(std::vector<ComplexTensor> Y, std::vector<Matrix> P) {
    if (Y.empty() || Y.size() != P.size())
        throw std::invalid_argument("ctad: need one mixing matrix per data tensor");
    CtadProblem pb;
    pb.L = static_cast<int>(Y.size());
    const int order = Y.front().order();
    if (order < 2) throw std::invalid_argument("ctad: tensors must have at least 2 modes");
    pb.d = order - 1;
    pb.tau.assign(Y.front().shape().begin(), Y.front().shape().end() - 1);
    pb.M = Y.front().dim(order - 1);
    pb.Ng = P.front().cols();

    pb.Y_unf.resize(static_cast<std::size_t>(pb.L));
    for (int l = 0; l < pb.L; ++l) {
        const auto& t = Y[static_cast<std::size_t>(l)];
        if (t.order() != order || t.shape() != Y.front().shape())
            throw std::invalid_argument("ctad: all data tensors must share one shape");
        const auto& p = P[static_cast<std::size_t>(l)];
        if (p.rows() != pb.M || p.cols() != pb.Ng)
            throw std::invalid_argument("ctad: mixing matrix shape mismatch");
        auto& unf = pb.Y_unf[static_cast<std::size_t>(l)];
        unf.reserve(static_cast<std::size_t>(order));
        for (int m = 0; m < order; ++m) unf.push_back(unfold(t, m));
        pb.PhP.push_back(p.adjoint() * p);
        pb.Y_energy.push_back(t.squared_norm());
        pb.total_energy += t.squared_norm();
    }
    pb.n_obs = 0;
    Index per = pb.M;
    for (Index ti : pb.tau) per *= ti;
    pb.n_obs = per * pb.L;
    pb.Y = std::move(Y);
    pb.P = std::move(P);
    return pb;
}

VariationalState init_state(const CtadProblem& pb, Index K_init, double delta, Rng& rng) {
    if (K_init < 1) throw std::invalid_argument("ctad: K_init must be >= 1");
    if (pb.n_obs == 0) throw std::invalid_argument("ctad: empty data");

    VariationalState s;
    s.Kc = K_init;
    s.delta = delta;

    const double rms = std::sqrt(pb.total_energy / static_cast<double>(pb.n_obs));
    const double scale_floor = rms > 0 ? rms : 1.0;
    auto draw = [&](Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index k = 0; k < cols; ++k) {
            for (Index r = 0; r < rows; ++r) m(r, k) = rng.cgauss();
            const double crms = m.col(k).norm() / std::sqrt(static_cast<double>(rows));
            if (crms > 0) m.col(k) *= scale_floor / crms;
        }
        return m;
    };

    s.M_G = draw(pb.Ng, K_init);
    s.Omega = Matrix::Identity(pb.Ng * K_init, pb.Ng * K_init);
    s.M_x.resize(static_cast<std::size_t>(pb.L));
    s.Sigma_x.resize(static_cast<std::size_t>(pb.L));
    for (int l = 0; l < pb.L; ++l) {
        for (int i = 0; i < pb.d; ++i) {
            s.M_x[static_cast<std::size_t>(l)].push_back(
                draw(pb.tau[static_cast<std::size_t>(i)], K_init));
            s.Sigma_x[static_cast<std::size_t>(l)].push_back(Matrix::Identity(K_init, K_init));
        }
    }

    Index tau_sum = 0;
    for (Index t : pb.tau) tau_sum += t;
    const double c_beta = delta + static_cast<double>(pb.n_obs);
    const double c_gamma = delta + static_cast<double>(pb.L) * static_cast<double>(tau_sum);
    const double c_eta = delta + static_cast<double>(pb.Ng);
    const double c_xi = delta + 1.0;
    s.beta = {c_beta, c_beta};
    s.gamma.assign(static_cast<std::size_t>(K_init), {c_gamma, c_gamma});
    s.eta.assign(static_cast<std::size_t>(K_init), {c_eta, c_eta});
    s.xi.assign(static_cast<std::size_t>(pb.Ng),
                std::vector<GammaParam>(static_cast<std::size_t>(K_init), {c_xi, c_xi}));
    return s;
}

void update_G(VariationalState& s, const CtadProblem& pb) {
    const Index K = s.Kc;
    const Index N = pb.Ng;
    const double eb = s.beta.mean();

    Matrix lambda = Matrix::Zero(N * K, N * K);
    Vector b = Vector::Zero(N * K);
    for (int l = 0; l < pb.L; ++l) {
        const Matrix D = gram_chain(s, pb, l, -1);
        const Matrix& B = pb.PhP[static_cast<std::size_t>(l)];
        for (Index n1 = 0; n1 < N; ++n1)
            for (Index n2 = 0; n2 < N; ++n2)
                lambda.block(n1 * K, n2 * K, K, K).noalias() += (eb * B(n1, n2)) * D;

        const Matrix chain = mean_chain(s, pb, l, -1, nullptr);
        const Matrix w = eb * (pb.P[static_cast<std::size_t>(l)].adjoint() *
                               (pb.Y_unf[static_cast<std::size_t>(l)][static_cast<std::size_t>(pb.d)] *
                                chain.conjugate()));
        for (Index n = 0; n < N; ++n) b.segment(n * K, K) += w.row(n).transpose();
    }
    for (Index n = 0; n < N; ++n)
        for (Index k = 0; k < K; ++k)
            lambda(n * K + k, n * K + k) +=
                cd(s.eta[static_cast<std::size_t>(k)].mean() +
                       s.xi[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)].mean(),
                   0.0);

    s.Omega = hermitian_inverse(lambda, "update_G");
    const Vector u = s.Omega * b;
    for (Index n = 0; n < N; ++n) s.M_G.row(n) = u.segment(n * K, K).transpose();
}

Matrix expected_pg_gram(const VariationalState& s, const CtadProblem& pb, int l) {
    const Index K = s.Kc;
    const Index N = pb.Ng;
    const Matrix& B = pb.PhP[static_cast<std::size_t>(l)];
    Matrix c = s.M_G.adjoint() * B * s.M_G;
    for (Index n1 = 0; n1 < N; ++n1)
        for (Index n2 = 0; n2 < N; ++n2)
            c.noalias() += B(n1, n2) * s.omega_block(n1, n2).conjugate();
    return 0.5 * (c + c.adjoint());
}

void update_X(VariationalState& s, const CtadProblem& pb, int l, int i,
              const Matrix* pg_gram_cache) {
    const Index K = s.Kc;
    const double eb = s.beta.mean();
    const Matrix c_l = pg_gram_cache ? *pg_gram_cache : expected_pg_gram(s, pb, l);

    // Sigma follows the row-Gram convention: E[X^H X] = M^H M + tau * Sigma,
    // which puts the conjugate on the data-term precision.
    Matrix d_minus = gram_chain(s, pb, l, i).cwiseProduct(c_l);
    Matrix prec = eb * d_minus.conjugate();
    for (Index k = 0; k < K; ++k) prec(k, k) += cd(s.gamma[static_cast<std::size_t>(k)].mean(), 0.0);
    Matrix sigma = hermitian_inverse(prec, "update_X");

    const Matrix pmg = pb.P[static_cast<std::size_t>(l)] * s.M_G;
    const Matrix chain = mean_chain(s, pb, l, i, &pmg);
    Matrix mean = eb * (pb.Y_unf[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
                        chain.conjugate()) *
                  sigma;
    s.Sigma_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = std::move(sigma);
    s.M_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = std::move(mean);
}

void update_xi(VariationalState& s) {
    const Index N = s.M_G.rows();
    for (Index n = 0; n < N; ++n)
        for (Index k = 0; k < s.Kc; ++k) {
            const double second_moment =
                std::norm(s.M_G(n, k)) + std::real(s.Omega(n * s.Kc + k, n * s.Kc + k));
            auto& q = s.xi[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
            q.shape = s.delta + 1.0;
            q.rate = s.delta + second_moment;
        }
}

void update_eta(VariationalState& s) {
    const Index N = s.M_G.rows();
    for (Index k = 0; k < s.Kc; ++k) {
        double sum = s.M_G.col(k).squaredNorm();
        for (Index n = 0; n < N; ++n) sum += std::real(s.Omega(n * s.Kc + k, n * s.Kc + k));
        auto& q = s.eta[static_cast<std::size_t>(k)];
        q.shape = s.delta + static_cast<double>(N);
        q.rate = s.delta + sum;
    }
}

void update_gamma(VariationalState& s, const CtadProblem& pb) {
    Index tau_sum = 0;
    for (Index t : pb.tau) tau_sum += t;
    for (Index k = 0; k < s.Kc; ++k) {
        double sum = 0.0;
        for (int l = 0; l < pb.L; ++l)
            for (int i = 0; i < pb.d; ++i) {
                const auto& m = s.M_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
                const auto& sg = s.Sigma_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
                sum += m.col(k).squaredNorm() +
                       static_cast<double>(pb.tau[static_cast<std::size_t>(i)]) *
                           std::real(sg(k, k));
            }
        auto& q = s.gamma[static_cast<std::size_t>(k)];
        q.shape = s.delta + static_cast<double>(pb.L) * static_cast<double>(tau_sum);
        q.rate = s.delta + sum;
    }
}

double expected_residual(const VariationalState& s, const CtadProblem& pb) {
    double total = 0.0;
    for (int l = 0; l < pb.L; ++l) {
        const Matrix c_l = expected_pg_gram(s, pb, l);
        const Matrix d_l = gram_chain(s, pb, l, -1);
        const Matrix pmg = pb.P[static_cast<std::size_t>(l)] * s.M_G;
        const Matrix chain = mean_chain(s, pb, l, -1, nullptr);
        const Matrix model = pmg * chain.transpose();
        const auto& y = pb.Y_unf[static_cast<std::size_t>(l)][static_cast<std::size_t>(pb.d)];
        const double cross = (y.conjugate().cwiseProduct(model)).sum().real();
        const double quad = c_l.cwiseProduct(d_l).sum().real();
        total += pb.Y_energy[static_cast<std::size_t>(l)] - 2.0 * cross + quad;
    }
    return total;
}

void update_beta(VariationalState& s, const CtadProblem& pb) {
    double resid = expected_residual(s, pb);
    if (resid < -1e-8 * pb.total_energy)
        throw std::runtime_error("update_beta: expected residual is negative beyond tolerance");
    if (resid < 0) resid = 0.0;
    s.beta.shape = s.delta + static_cast<double>(pb.n_obs);
    s.beta.rate = s.delta + resid;
}

double compute_elbo(const VariationalState& s, const CtadProblem& pb) {
    const Index K = s.Kc;
    const Index N = pb.Ng;
    const double log_pi = std::log(std::numbers::pi);
    const double delta = s.delta;
    const double lg_delta = std::lgamma(delta);
    const double dlogd = delta * std::log(delta);

    const double resid = std::max(expected_residual(s, pb), 0.0);
    double elbo = static_cast<double>(pb.n_obs) * (s.beta.mean_log() - log_pi) -
                  s.beta.mean() * resid;

    // G prior
    for (Index n = 0; n < N; ++n)
        for (Index k = 0; k < K; ++k) {
            const auto& xq = s.xi[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
            const auto& eq = s.eta[static_cast<std::size_t>(k)];
            const double second = std::norm(s.M_G(n, k)) + std::real(s.Omega(n * K + k, n * K + k));
            elbo += eq.mean_log() + xq.mean_log() - 2.0 * log_pi -
                    (eq.mean() + xq.mean()) * second;
        }

    // X priors
    for (int l = 0; l < pb.L; ++l)
        for (int i = 0; i < pb.d; ++i) {
            const double ti = static_cast<double>(pb.tau[static_cast<std::size_t>(i)]);
            const auto& m = s.M_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
            const auto& sg = s.Sigma_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
            for (Index k = 0; k < K; ++k) {
                const auto& gq = s.gamma[static_cast<std::size_t>(k)];
                elbo += ti * (gq.mean_log() - log_pi) -
                        gq.mean() * (m.col(k).squaredNorm() + ti * std::real(sg(k, k)));
            }
        }

    // gamma-prior cross entropies and entropies
    auto gamma_terms = [&](const GammaParam& q) {
        const double prior = dlogd - lg_delta + (delta - 1.0) * q.mean_log() - delta * q.mean();
        const double entropy =
            q.shape - std::log(q.rate) + std::lgamma(q.shape) + (1.0 - q.shape) * digamma(q.shape);
        return prior + entropy;
    };
    elbo += gamma_terms(s.beta);
    for (const auto& q : s.gamma) elbo += gamma_terms(q);
    for (const auto& q : s.eta) elbo += gamma_terms(q);
    for (const auto& row : s.xi)
        for (const auto& q : row) elbo += gamma_terms(q);

    // Gaussian entropies
    elbo += static_cast<double>(N * K) * (log_pi + 1.0) + hermitian_logdet(s.Omega, "elbo:Omega");
    for (int l = 0; l < pb.L; ++l)
        for (int i = 0; i < pb.d; ++i) {
            const double ti = static_cast<double>(pb.tau[static_cast<std::size_t>(i)]);
            elbo += ti * (static_cast<double>(K) * (log_pi + 1.0) +
                          hermitian_logdet(
                              s.Sigma_x[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)],
                              "elbo:Sigma"));
        }
    return elbo;
}

int prune(VariationalState& s, double kappa) {
    if (kappa <= 1.0) throw std::invalid_argument("prune: kappa must exceed 1");
    const Index K = s.Kc;
    if (K <= 1) return 0;

    double min_eta = std::numeric_limits<double>::infinity();
    double min_gamma = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < K; ++k) {
        min_eta = std::min(min_eta, s.eta[static_cast<std::size_t>(k)].mean());
        min_gamma = std::min(min_gamma, s.gamma[static_cast<std::size_t>(k)].mean());
    }
    std::vector<Index> keep;
    for (Index k = 0; k < K; ++k) {
        const bool dead = s.eta[static_cast<std::size_t>(k)].mean() > kappa * min_eta &&
                          s.gamma[static_cast<std::size_t>(k)].mean() > kappa * min_gamma;
        if (!dead) keep.push_back(k);
    }
    if (keep.empty()) {
        Index best = 0;
        for (Index k = 1; k < K; ++k)
            if (s.eta[static_cast<std::size_t>(k)].mean() <
                s.eta[static_cast<std::size_t>(best)].mean())
                best = k;
        keep.push_back(best);
    }
    const Index Kn = static_cast<Index>(keep.size());
    if (Kn == K) return 0;

    const Index N = s.M_G.rows();
    Matrix mg(N, Kn);
    for (Index a = 0; a < Kn; ++a) mg.col(a) = s.M_G.col(keep[static_cast<std::size_t>(a)]);

    Matrix omega(N * Kn, N * Kn);
    for (Index n1 = 0; n1 < N; ++n1)
        for (Index n2 = 0; n2 < N; ++n2)
            for (Index a = 0; a < Kn; ++a)
                for (Index b = 0; b < Kn; ++b)
                    omega(n1 * Kn + a, n2 * Kn + b) =
                        s.Omega(n1 * K + keep[static_cast<std::size_t>(a)],
                                n2 * K + keep[static_cast<std::size_t>(b)]);

    for (auto& per_l : s.M_x)
        for (auto& m : per_l) {
            Matrix nm(m.rows(), Kn);
            for (Index a = 0; a < Kn; ++a) nm.col(a) = m.col(keep[static_cast<std::size_t>(a)]);
            m = std::move(nm);
        }
    for (auto& per_l : s.Sigma_x)
        for (auto& sg : per_l) {
            Matrix ns(Kn, Kn);
            for (Index a = 0; a < Kn; ++a)
                for (Index b = 0; b < Kn; ++b)
                    ns(a, b) = sg(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
            sg = std::move(ns);
        }

    auto select = [&](auto& v) {
        auto old = v;
        v.clear();
        for (Index k : keep) v.push_back(old[static_cast<std::size_t>(k)]);
    };
    select(s.gamma);
    select(s.eta);
    for (auto& row : s.xi) select(row);

    s.M_G = std::move(mg);
    s.Omega = std::move(omega);
    s.Kc = Kn;
    return static_cast<int>(K - Kn);
}

CtadReport run_ctad(const CtadProblem& pb, Index K_init, double delta,
                    const CtadSchedule& schedule, std::uint64_t seed, std::ostream* diag_csv) {
    if (pb.Ng * K_init > schedule.omega_limit)
        throw std::invalid_argument(
            "ctad: N_g*K_init = " + std::to_string(pb.Ng * K_init) + " exceeds omega_limit = " +
            std::to_string(schedule.omega_limit) +
            "; the dense covariance of vec(G) has (N_g*K)^2 entries and each sweep pays "
            "O((N_g*K)^3) to invert it");

    Rng rng(seed);
    VariationalState s = init_state(pb, K_init, delta, rng);

    CtadReport rep;
    if (diag_csv) (*diag_csv) << "sweep,elbo,K_c,beta_mean\n";

    double epoch_prev = std::numeric_limits<double>::quiet_NaN();
    int sweep = 0;
    for (sweep = 1; sweep <= schedule.max_sweeps; ++sweep) {
        update_G(s, pb);
        for (int l = 0; l < pb.L; ++l) {
            const Matrix c_l = expected_pg_gram(s, pb, l);
            for (int i = 0; i < pb.d; ++i) update_X(s, pb, l, i, &c_l);
        }
        update_xi(s);
        update_eta(s);
        update_gamma(s, pb);
        update_beta(s, pb);

        const double elbo = compute_elbo(s, pb);
        s.elbo_trace.push_back(elbo);
        s.kc_trace.push_back(s.Kc);
        if (diag_csv) {
            diag_csv->precision(12);
            (*diag_csv) << sweep << ',' << elbo << ',' << s.Kc << ',' << s.beta.mean() << '\n';
        }

        bool pruned = false;
        if (schedule.prune_enabled && sweep >= schedule.prune_start &&
            (sweep - schedule.prune_start) % schedule.prune_every == 0) {
            if (prune(s, schedule.kappa) > 0) {
                pruned = true;
                rep.prune_sweeps.push_back(sweep);
            }
        }

        const bool settled =
            !std::isnan(epoch_prev) &&
            std::abs(elbo - epoch_prev) <= schedule.tol * std::max(1.0, std::abs(epoch_prev));
        if (pruned) {
            epoch_prev = std::numeric_limits<double>::quiet_NaN();  // new epoch
        } else if (settled) {
            if (schedule.prune_enabled && sweep < schedule.prune_start) {
                // hold until the schedule's first prune check
                epoch_prev = elbo;
            } else if (schedule.prune_enabled && prune(s, schedule.kappa) > 0) {
                // final prune on a converged candidate so dead columns
                // cannot survive an ELBO plateau between checks
                rep.prune_sweeps.push_back(sweep);
                epoch_prev = std::numeric_limits<double>::quiet_NaN();
            } else {
                rep.converged = true;
                break;
            }
        } else {
            epoch_prev = elbo;
        }
    }

    rep.K_hat = s.Kc;
    rep.G_hat = s.M_G;
    rep.factors = s.M_x;
    rep.beta_mean = s.beta.mean();
    rep.iterations = std::min(sweep, schedule.max_sweeps);
    rep.elbo_trace = s.elbo_trace;
    rep.kc_trace = s.kc_trace;
    return rep;
}

CtadReport run_ctad(std::vector<ComplexTensor> Y, std::vector<Matrix> P, Index K_init,
                    double delta, const CtadSchedule& schedule, std::uint64_t seed,
                    std::ostream* diag_csv) {
    return run_ctad(CtadProblem::build(std::move(Y), std::move(P)), K_init, delta, schedule, seed,
                    diag_csv);
}

}  // namespace risura
