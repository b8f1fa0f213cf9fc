#include <doctest.h>

#include "risura/tensor.hpp"
#include "test_util.hpp"

using namespace risura;
using test::random_matrix;
using test::random_tensor;

namespace {

// brute-force mode-n unfolding straight from the index definition: row is
// i_n, column counts the remaining indices with lower modes fastest
Matrix unfold_bruteforce(const ComplexTensor& t, int mode) {
    const int d = t.order();
    Matrix out(t.dim(mode), t.size() / t.dim(mode));
    std::vector<Index> idx(static_cast<std::size_t>(d), 0);
    for (Index lin = 0; lin < t.size(); ++lin) {
        Index rem = lin;
        for (int m = 0; m < d; ++m) {
            idx[static_cast<std::size_t>(m)] = rem % t.dim(m);
            rem /= t.dim(m);
        }
        Index col = 0, stride = 1;
        for (int m = 0; m < d; ++m) {
            if (m == mode) continue;
            col += idx[static_cast<std::size_t>(m)] * stride;
            stride *= t.dim(m);
        }
        out(idx[static_cast<std::size_t>(mode)], col) = t.vec()[lin];
    }
    return out;
}

}  // namespace

TEST_CASE("unfold: 2x2 matrix tensor is its own mode-0 unfolding") {
    ComplexTensor t({2, 2});
    // t(i,j) = i + 2j (0-based)
    for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < 2; ++i) t.at({i, j}) = cd(static_cast<double>(i + 2 * j), 0);
    const Matrix m = unfold(t, 0);
    for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < 2; ++i) CHECK(m(i, j) == cd(static_cast<double>(i + 2 * j), 0));
}

TEST_CASE("unfold matches the brute-force index mapping on a 3x4x5 tensor") {
    Rng rng(42);
    const ComplexTensor t = random_tensor({3, 4, 5}, rng);
    for (int mode = 0; mode < 3; ++mode) {
        const Matrix a = unfold(t, mode);
        const Matrix b = unfold_bruteforce(t, mode);
        CHECK(test::rel_err(a, b) == 0.0);
    }
}

TEST_CASE("unfold of a zero tensor is zero, and bad modes throw") {
    const ComplexTensor t({2, 3, 4});
    CHECK(unfold(t, 1).norm() == 0.0);
    CHECK_THROWS(unfold(t, 3));
    CHECK_THROWS(unfold(t, -1));
}

TEST_CASE("fold inverts unfold for every mode up to order 4") {
    Rng rng(7);
    const std::vector<std::vector<Index>> shapes = {{2, 3, 4}, {3, 4, 5}, {2, 3, 2, 4}, {5, 7}};
    for (const auto& shape : shapes) {
        const ComplexTensor t = random_tensor(shape, rng);
        for (int mode = 0; mode < t.order(); ++mode) {
            const ComplexTensor back = fold(unfold(t, mode), mode, shape);
            CHECK((back.vec() - t.vec()).norm() == 0.0);  // exact
        }
    }
    CHECK(fold(Matrix::Zero(2, 6), 0, {2, 3, 2}).norm() == 0.0);
    CHECK_THROWS(fold(Matrix::Zero(2, 5), 0, {2, 3, 2}));
}

TEST_CASE("khatri_rao basics") {
    Matrix a(1, 1), b(1, 1);
    a(0, 0) = cd(2, 1);
    b(0, 0) = cd(3, -1);
    CHECK(khatri_rao(a, b)(0, 0) == a(0, 0) * b(0, 0));

    const Matrix i2 = Matrix::Identity(2, 2);
    const Matrix kr = khatri_rao(i2, i2);
    REQUIRE(kr.rows() == 4);
    REQUIRE(kr.cols() == 2);
    // columns e1 kron e1 and e2 kron e2
    CHECK(kr(0, 0) == cd(1, 0));
    CHECK(kr(3, 1) == cd(1, 0));
    CHECK(std::abs(kr.sum() - cd(2, 0)) == 0.0);

    Matrix c(2, 3);
    CHECK_THROWS(khatri_rao(i2, c));
}

TEST_CASE("khatri_rao columns are per-column Kroneckers (definition oracle)") {
    Rng rng(3);
    const Matrix a = random_matrix(3, 2, rng);
    const Matrix b = random_matrix(3, 2, rng);
    const Matrix kr = khatri_rao(a, b);
    for (Index k = 0; k < 2; ++k)
        for (Index ia = 0; ia < 3; ++ia)
            for (Index ib = 0; ib < 3; ++ib)
                CHECK(kr(ia * 3 + ib, k) == a(ia, k) * b(ib, k));
}

TEST_CASE("khatri_rao chain groupings agree") {
    Rng rng(5);
    const Matrix a = random_matrix(2, 3, rng);
    const Matrix b = random_matrix(3, 3, rng);
    const Matrix c = random_matrix(4, 3, rng);
    const Matrix lhs = khatri_rao(khatri_rao(a, b), c);
    const Matrix rhs = khatri_rao(a, khatri_rao(b, c));
    CHECK(test::rel_err(lhs, rhs) < 1e-12);
}

TEST_CASE("kruskal_reconstruct: rank-1 outer product and zero factor") {
    KruskalFactors f;
    Matrix u(2, 1), v(2, 1);
    u << cd(1, 0), cd(0, 0);
    v << cd(0, 0), cd(1, 0);
    f.factors = {u, v};
    const ComplexTensor t = kruskal_reconstruct(f);
    CHECK(t.at({0, 1}) == cd(1, 0));
    CHECK(std::abs(t.vec().sum() - cd(1, 0)) == 0.0);

    Rng rng(11);
    KruskalFactors g;
    g.factors = {random_matrix(3, 2, rng), Matrix::Zero(4, 2), random_matrix(5, 2, rng)};
    CHECK(kruskal_reconstruct(g).norm() == 0.0);
}

TEST_CASE("kruskal_reconstruct matches the triple-loop sum oracle") {
    Rng rng(17);
    KruskalFactors f;
    f.factors = {random_matrix(3, 3, rng), random_matrix(4, 3, rng), random_matrix(5, 3, rng)};
    const ComplexTensor t = kruskal_reconstruct(f);
    double max_err = 0;
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 4; ++j)
            for (Index k = 0; k < 5; ++k) {
                cd sum = 0;
                for (Index r = 0; r < 3; ++r)
                    sum += f.factors[0](i, r) * f.factors[1](j, r) * f.factors[2](k, r);
                max_err = std::max(max_err, std::abs(t.at({i, j, k}) - sum));
            }
    CHECK(max_err < 1e-12);
}

TEST_CASE("kruskal unfolding identity holds for every mode") {
    Rng rng(23);
    KruskalFactors f;
    f.factors = {random_matrix(2, 3, rng), random_matrix(3, 3, rng), random_matrix(4, 3, rng),
                 random_matrix(2, 3, rng)};
    const ComplexTensor t = kruskal_reconstruct(f);
    for (int mode = 0; mode < 4; ++mode) {
        const Matrix lhs = unfold(t, mode);
        const Matrix rhs = f.factors[static_cast<std::size_t>(mode)] *
                           khatri_rao_chain_excluding(f.factors, mode).transpose();
        CHECK(test::rel_err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("gram_expect basics") {
    Rng rng(31);
    const Matrix m = random_matrix(6, 3, rng);
    CHECK(test::rel_err(gram_expect(m, Matrix::Zero(3, 3), 6), Matrix(m.adjoint() * m)) < 1e-15);
    const Matrix tauI = gram_expect(Matrix::Zero(6, 3), Matrix::Identity(3, 3), 6);
    CHECK(test::rel_err(tauI, Matrix(6.0 * Matrix::Identity(3, 3))) < 1e-15);
    CHECK_THROWS(gram_expect(m, Matrix::Identity(2, 2), 6));
}

TEST_CASE("gram_expect matches a Monte Carlo average of sampled Grams") {
    Rng rng(1234);
    const Index rows = 4, K = 2;
    const Matrix m = random_matrix(rows, K, rng);
    Matrix a = random_matrix(K, K, rng);
    const Matrix sigma_stored = a * a.adjoint();  // row-Gram convention
    const Matrix expected = gram_expect(m, sigma_stored, rows);

    // rows are sampled with column covariance conj(sigma) so that
    // E[X^H X] = M^H M + rows * sigma
    const Matrix lfac = test::chol_factor(sigma_stored.conjugate());
    const int draws = 100000;
    Matrix acc = Matrix::Zero(K, K);
    Matrix acc2 = Matrix::Zero(K, K);  // accumulate |entry|^2 for SE estimate
    for (int s = 0; s < draws; ++s) {
        Matrix x = m;
        for (Index r = 0; r < rows; ++r) {
            Vector z(K);
            for (Index k = 0; k < K; ++k) z[k] = rng.cgauss();
            x.row(r) += (lfac * z).transpose();
        }
        const Matrix g = x.adjoint() * x;
        acc += g;
        acc2 += g.cwiseAbs2();
    }
    const Matrix mean = acc / draws;
    for (Index i = 0; i < K; ++i)
        for (Index j = 0; j < K; ++j) {
            const double var =
                acc2(i, j).real() / draws - std::norm(mean(i, j));
            const double se = std::sqrt(std::max(var, 0.0) / draws);
            CHECK(std::abs(mean(i, j) - expected(i, j)) <= 3.0 * se + 1e-12);
        }
}

TEST_CASE("Gram-Hadamard identity underpins the factor updates") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_matrix(4, 3, rng);
        const Matrix b = random_matrix(5, 3, rng);
        const Matrix kr = khatri_rao(a, b);
        const Matrix lhs = kr.adjoint() * kr;
        const Matrix rhs = (a.adjoint() * a).cwiseProduct(b.adjoint() * b);
        CHECK(test::rel_err(lhs, rhs) < 1e-12);
    }
}
