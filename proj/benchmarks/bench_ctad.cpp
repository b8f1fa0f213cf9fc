#include <benchmark/benchmark.h>

#include "risura/airlink.hpp"
#include "risura/ctad.hpp"
#include "risura/rng.hpp"

using namespace risura;

namespace {

// noisy coupled instance with the given subblock count
CtadProblem make_problem(int L, std::uint64_t seed) {
    SystemConfig cfg;
    cfg.M = 8;
    cfg.N1 = cfg.N2 = 4;
    cfg.N1g = cfg.N2g = 4;
    cfg.Ka = 3;
    cfg.K_init = 4;
    cfg.K_total = 64;
    set_block_count(cfg, L);
    cfg.tau = {6, 6};
    cfg.bits_per_mode = {6, 6};
    cfg.zeta_s = 3;
    Rng crng(derive_seed(seed, 1)), rrng(derive_seed(seed, 2)), nrng(derive_seed(seed, 3));
    auto real = build_realization(cfg, crng, rrng);
    Rng srng(derive_seed(seed, 4));
    std::vector<std::vector<Matrix>> mf(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l)
        for (int i = 0; i < 2; ++i) {
            Matrix x(6, cfg.Ka);
            for (Index c = 0; c < cfg.Ka; ++c)
                for (Index r = 0; r < 6; ++r) x(r, c) = srng.cgauss();
            mf[static_cast<std::size_t>(l)].push_back(x);
        }
    auto Y = phase2_rx(real, mf, 1.0, nrng);
    return CtadProblem::build(std::move(Y), real.P);
}

}  // namespace

// one full sweep (all coordinate updates + ELBO) at fixed dimensions
static void BM_CtadSweep(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const CtadProblem pb = make_problem(L, 99);
    Rng rng(5);
    VariationalState s = init_state(pb, 4, 1e-6, rng);
    for (auto _ : state) {
        update_G(s, pb);
        for (int l = 0; l < pb.L; ++l) {
            const Matrix c_l = expected_pg_gram(s, pb, l);
            for (int i = 0; i < pb.d; ++i) update_X(s, pb, l, i, &c_l);
        }
        update_xi(s);
        update_eta(s);
        update_gamma(s, pb);
        update_beta(s, pb);
        benchmark::DoNotOptimize(compute_elbo(s, pb));
    }
}
BENCHMARK(BM_CtadSweep)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_UpdateG(benchmark::State& state) {
    const CtadProblem pb = make_problem(static_cast<int>(state.range(0)), 7);
    Rng rng(6);
    VariationalState s = init_state(pb, 4, 1e-6, rng);
    for (auto _ : state) {
        update_G(s, pb);
    }
}
BENCHMARK(BM_UpdateG)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
