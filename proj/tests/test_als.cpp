#include <doctest.h>

#include "risura/als.hpp"
#include "test_util.hpp"

using namespace risura;
using test::random_matrix;

namespace {

CtadProblem lowrank_problem(int L, Index true_rank, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ComplexTensor> Y;
    std::vector<Matrix> P;
    const Matrix lambda = random_matrix(10, true_rank, rng);
    for (int l = 0; l < L; ++l) {
        const Matrix p = random_matrix(8, 10, rng);
        KruskalFactors f;
        f.factors = {random_matrix(6, true_rank, rng), random_matrix(6, true_rank, rng),
                     p * lambda};
        Y.push_back(kruskal_reconstruct(f));
        P.push_back(p);
    }
    return CtadProblem::build(std::move(Y), std::move(P));
}

}  // namespace

TEST_CASE("noiseless data at the true rank fits to numerical zero") {
    const CtadProblem pb = lowrank_problem(2, 2, 11);
    const AlsReport rep = als_fit(pb, 2, 500, 1e-14, 21);
    REQUIRE(!rep.residual_trace.empty());
    MESSAGE("final relative residual ", rep.residual_trace.back());
    CHECK(rep.residual_trace.back() < 1e-6);
}

TEST_CASE("a rank-1 fit of rank-2 data stays bounded away from zero") {
    const CtadProblem pb = lowrank_problem(2, 2, 12);
    const AlsReport r1 = als_fit(pb, 1, 300, 1e-12, 22);
    const AlsReport r2 = als_fit(pb, 2, 300, 1e-12, 22);
    CHECK(r1.residual_trace.back() > 100.0 * std::max(r2.residual_trace.back(), 1e-12));
    CHECK(r1.residual_trace.back() > 1e-3);
}

TEST_CASE("the residual trace is monotone non-increasing") {
    const CtadProblem pb = lowrank_problem(3, 2, 13);
    const AlsReport rep = als_fit(pb, 3, 60, 0.0, 23);
    for (std::size_t i = 1; i < rep.residual_trace.size(); ++i)
        CHECK(rep.residual_trace[i] <= rep.residual_trace[i - 1] * (1.0 + 1e-10) + 1e-12);
}
