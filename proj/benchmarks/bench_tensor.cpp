#include <benchmark/benchmark.h>

#include "risura/rng.hpp"
#include "risura/tensor.hpp"

using namespace risura;

namespace {

ComplexTensor random_tensor(const std::vector<Index>& shape, Rng& rng) {
    ComplexTensor t(shape);
    for (Index i = 0; i < t.size(); ++i) t.vec()[i] = rng.cgauss();
    return t;
}

Matrix random_matrix(Index r, Index c, Rng& rng) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) m(i, j) = rng.cgauss();
    return m;
}

}  // namespace

static void BM_Unfold(benchmark::State& state) {
    Rng rng(1);
    const Index s = state.range(0);
    const ComplexTensor t = random_tensor({s, s, s}, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(unfold(t, 1));
    }
}
BENCHMARK(BM_Unfold)->Arg(8)->Arg(16)->Arg(32);

static void BM_KhatriRao(benchmark::State& state) {
    Rng rng(2);
    const Index s = state.range(0);
    const Matrix a = random_matrix(s, 8, rng);
    const Matrix b = random_matrix(s, 8, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(khatri_rao(a, b));
    }
}
BENCHMARK(BM_KhatriRao)->Arg(16)->Arg(64)->Arg(256);

static void BM_KruskalReconstruct(benchmark::State& state) {
    Rng rng(3);
    const Index s = state.range(0);
    KruskalFactors f;
    f.factors = {random_matrix(s, 4, rng), random_matrix(s, 4, rng), random_matrix(16, 4, rng)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kruskal_reconstruct(f));
    }
}
BENCHMARK(BM_KruskalReconstruct)->Arg(8)->Arg(16);
