#include "risura/als.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace risura {

namespace {

Matrix solve_normal(const Matrix& gram, const Matrix& rhs, const char* ctx) {
    Matrix a = 0.5 * (gram + gram.adjoint());
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) {
        const double md = a.diagonal().real().mean();
        a.diagonal().array() += 1e-10 * (md > 0 ? md : 1.0);
        llt.compute(a);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error(std::string("als: normal equations not solvable in ") + ctx);
    }
    return llt.solve(rhs);
}

}  // namespace

AlsReport als_fit(const CtadProblem& pb, Index K_fixed, int max_iter, double tol,
                  std::uint64_t seed) {
    if (K_fixed < 1) throw std::invalid_argument("als: K_fixed must be >= 1");
    Rng rng(seed);
    const Index N = pb.Ng;

    const double rms = std::sqrt(pb.total_energy / static_cast<double>(pb.n_obs));
    const double scale = rms > 0 ? rms : 1.0;
    auto draw = [&](Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index k = 0; k < cols; ++k)
            for (Index r = 0; r < rows; ++r) m(r, k) = scale * rng.cgauss();
        return m;
    };

    AlsReport rep;
    rep.G = draw(N, K_fixed);
    rep.factors.resize(static_cast<std::size_t>(pb.L));
    for (int l = 0; l < pb.L; ++l)
        for (int i = 0; i < pb.d; ++i)
            rep.factors[static_cast<std::size_t>(l)].push_back(
                draw(pb.tau[static_cast<std::size_t>(i)], K_fixed));

    auto chain_for = [&](int l, int skip, const Matrix* pg) {
        std::vector<Matrix> fs(rep.factors[static_cast<std::size_t>(l)]);
        if (pg) fs.push_back(*pg);
        return khatri_rao_chain_excluding(fs, skip);
    };

    double prev = std::numeric_limits<double>::infinity();
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        // factor steps
        for (int l = 0; l < pb.L; ++l) {
            const Matrix pg = pb.P[static_cast<std::size_t>(l)] * rep.G;
            for (int i = 0; i < pb.d; ++i) {
                const Matrix a = chain_for(l, i, &pg);
                // X = Y(i) A^* [(A^H A)^*]^{-1}, solved via the adjoint system
                const Matrix gram = (a.adjoint() * a).conjugate();
                const Matrix r =
                    pb.Y_unf[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
                    a.conjugate();
                rep.factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] =
                    solve_normal(gram, r.adjoint(), "factor step").adjoint();
            }
        }

        // shared G step over the stacked blocks (row-major vec of G)
        Matrix lhs = Matrix::Zero(N * K_fixed, N * K_fixed);
        Vector rhs = Vector::Zero(N * K_fixed);
        for (int l = 0; l < pb.L; ++l) {
            const Matrix a = chain_for(l, -1, nullptr);
            const Matrix aha = a.adjoint() * a;
            const Matrix& b = pb.PhP[static_cast<std::size_t>(l)];
            for (Index n1 = 0; n1 < N; ++n1)
                for (Index n2 = 0; n2 < N; ++n2)
                    lhs.block(n1 * K_fixed, n2 * K_fixed, K_fixed, K_fixed).noalias() +=
                        b(n1, n2) * aha;
            const Matrix w =
                pb.P[static_cast<std::size_t>(l)].adjoint() *
                (pb.Y_unf[static_cast<std::size_t>(l)][static_cast<std::size_t>(pb.d)] *
                 a.conjugate());
            for (Index n = 0; n < N; ++n) rhs.segment(n * K_fixed, K_fixed) += w.row(n).transpose();
        }
        const Vector g = solve_normal(lhs, rhs, "G step");
        for (Index n = 0; n < N; ++n) rep.G.row(n) = g.segment(n * K_fixed, K_fixed).transpose();

        // relative residual
        double res = 0.0;
        for (int l = 0; l < pb.L; ++l) {
            const Matrix model = (pb.P[static_cast<std::size_t>(l)] * rep.G) *
                                 chain_for(l, -1, nullptr).transpose();
            res += (pb.Y_unf[static_cast<std::size_t>(l)][static_cast<std::size_t>(pb.d)] - model)
                       .squaredNorm();
        }
        const double rel = std::sqrt(res / (pb.total_energy > 0 ? pb.total_energy : 1.0));
        rep.residual_trace.push_back(rel);
        if (std::isfinite(prev) && std::abs(prev - rel) <= tol * std::max(prev, 1e-300)) {
            rep.converged = true;
            break;
        }
        prev = rel;
    }
    rep.iterations = std::min(it, max_iter);
    return rep;
}

AlsReport als_fit(std::vector<ComplexTensor> Y, std::vector<Matrix> P, Index K_fixed,
                  int max_iter, double tol, std::uint64_t seed) {
    return als_fit(CtadProblem::build(std::move(Y), std::move(P)), K_fixed, max_iter, tol, seed);
}

}  // namespace risura
