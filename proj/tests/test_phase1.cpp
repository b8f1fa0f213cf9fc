#include <doctest.h>

#include "risura/phase1.hpp"
#include "test_util.hpp"

using namespace risura;

namespace {

struct Instance {
    Matrix U, V;
    Vector g1, h1;
    Matrix Y;  // noiseless
};

Instance make_instance(Index M, Index N, Index tp, double p_on, Rng& rng) {
    Instance in;
    in.U = test::random_matrix(M, N, rng);
    in.V = Matrix::Zero(N, tp);
    for (Index t = 0; t < tp; ++t)
        for (Index n = 0; n < N; ++n)
            if (rng.bernoulli(p_on)) in.V(n, t) = rng.cphase();
    in.g1 = Vector(tp);
    for (Index t = 0; t < tp; ++t) in.g1[t] = rng.cgauss();
    in.h1 = Vector(N);
    for (Index n = 0; n < N; ++n) in.h1[n] = rng.cgauss();
    in.Y = in.U * in.V.cwiseProduct(in.h1 * in.g1.transpose());
    return in;
}

}  // namespace

TEST_CASE("genie estimate returns the exact channel and exact mixing matrices") {
    SystemConfig cfg;
    cfg.M = 4;
    cfg.N1 = cfg.N2 = 2;
    cfg.N1g = cfg.N2g = 2;
    cfg.Ka = 2;
    cfg.K_init = 2;
    cfg.zeta_s = 2;
    Rng rng(1);
    const auto real = build_realization(cfg, rng, rng);
    const auto est = estimate_u_genie(real);
    CHECK((est.U_hat - real.U).norm() == 0.0);
    CHECK(est.residual_norm == 0.0);
    CHECK(std::abs(est.h1_hat.norm() - 1.0) < 1e-12);
    for (std::size_t l = 0; l < real.P.size(); ++l) {
        const Matrix p = effective_mixing(est.U_hat, real.A_R, real.v_phase2[l]);
        CHECK((p - real.P[l]).norm() == 0.0);
    }
}

TEST_CASE("with the true h1 supplied, one U step nails a noiseless instance") {
    Rng rng(2);
    const auto in = make_instance(6, 8, 40, 0.5, rng);
    Phase1Options opts;
    opts.ridge = 1e-12;
    opts.max_iter = 1;
    opts.h1_init = in.h1;
    const auto est = estimate_u_alternating(in.Y, in.V, in.g1, opts);
    CHECK(est.residual_norm / in.Y.norm() < 1e-8);
}

TEST_CASE("zero observation shrinks to zero with zero residual") {
    Rng rng(3);
    const auto in = make_instance(4, 6, 30, 0.5, rng);
    const Matrix Y0 = Matrix::Zero(4, 30);
    const auto est = estimate_u_alternating(Y0, in.V, in.g1, {});
    CHECK(est.U_hat.norm() < 1e-8);
    CHECK(est.residual_norm < 1e-10);
}

TEST_CASE("noiseless alternation recovers the bilinear product at t_p = 4N") {
    Rng rng(4);
    const Index N = 12;
    const auto in = make_instance(6, N, 4 * N, 0.5, rng);
    Phase1Options opts;
    opts.ridge = 1e-9;
    opts.max_iter = 200;
    opts.tol = 1e-14;
    const auto est = estimate_u_alternating(in.Y, in.V, in.g1, opts);
    const Matrix F_hat = in.V.cwiseProduct(est.h1_hat * in.g1.transpose());
    const Matrix F_true = in.V.cwiseProduct(in.h1 * in.g1.transpose());
    const double prod_err = (est.U_hat * F_hat - in.U * F_true).norm() / (in.U * F_true).norm();
    CHECK(prod_err < 1e-3);
    CHECK(std::abs(est.h1_hat.norm() - 1.0) < 1e-12);
}

TEST_CASE("the regularized objective is monotone across half-steps") {
    Rng rng(5);
    auto in = make_instance(5, 8, 48, 0.5, rng);
    // noisy observation
    for (Index j = 0; j < in.Y.cols(); ++j)
        for (Index i = 0; i < in.Y.rows(); ++i) in.Y(i, j) += 0.3 * rng.cgauss();
    Phase1Options opts;
    opts.max_iter = 30;
    opts.tol = 0.0;  // run all iterations
    const auto est = estimate_u_alternating(in.Y, in.V, in.g1, opts);
    REQUIRE(est.objective_trace.size() >= 4);
    for (std::size_t i = 1; i < est.objective_trace.size(); ++i)
        CHECK(est.objective_trace[i] <= est.objective_trace[i - 1] * (1 + 1e-10) + 1e-9);
}

TEST_CASE("estimator product is invariant to the scale of the init") {
    Rng rng(6);
    const auto in = make_instance(5, 6, 36, 0.6, rng);
    Phase1Options o1, o2;
    o1.max_iter = o2.max_iter = 40;
    o1.h1_init = in.h1;
    o2.h1_init = (cd(0.23, -1.7) * in.h1).eval();
    const auto e1 = estimate_u_alternating(in.Y, in.V, in.g1, o1);
    const auto e2 = estimate_u_alternating(in.Y, in.V, in.g1, o2);
    const Matrix f1 = in.V.cwiseProduct(e1.h1_hat * in.g1.transpose());
    const Matrix f2 = in.V.cwiseProduct(e2.h1_hat * in.g1.transpose());
    CHECK((e1.U_hat * f1 - e2.U_hat * f2).norm() / (e1.U_hat * f1).norm() < 1e-8);
}
