#include <doctest.h>

#include "risura/airlink.hpp"
#include "risura/modem.hpp"
#include "test_util.hpp"

using namespace risura;

TEST_CASE("codebooks: unit norm, determinism, coherence strictly below one") {
    const auto c = build_constellation(0, 8, 6, 4242);
    REQUIRE(c.size() == 64);
    for (Index k = 0; k < c.size(); ++k)
        CHECK(std::abs(c.codebook.col(k).norm() - 1.0) < 1e-12);

    const auto c2 = build_constellation(0, 8, 6, 4242);
    CHECK((c.codebook - c2.codebook).norm() == 0.0);
    const auto c3 = build_constellation(0, 8, 6, 999);
    CHECK((c.codebook - c3.codebook).norm() > 0.0);

    double max_coh = 0.0;
    for (Index a = 0; a < c.size(); ++a)
        for (Index b = a + 1; b < c.size(); ++b)
            max_coh = std::max(max_coh, std::abs(c.codebook.col(a).dot(c.codebook.col(b))));
    CHECK(max_coh < 1.0);
}

TEST_CASE("paper-scale bits per mode are rejected with a diagnostic") {
    CHECK_THROWS_WITH_AS(build_constellation(0, 80, 135, 1), doctest::Contains("budget"),
                         std::invalid_argument);
}

TEST_CASE("bit group packing round-trips") {
    for (int v = 0; v < 64; ++v) CHECK(bits_to_index(index_to_bits(v, 6)) == v);
}

TEST_CASE("mapping: norm scaling, zero power, vec-kron identity") {
    SystemConfig cfg;
    const auto cs = build_constellations(cfg);

    Bits zeros(12, 0);
    const auto m0 = map_bits_to_signal(zeros, cs, 2.5);
    CHECK(m0.indices == std::vector<int>{0, 0});
    const ComplexTensor t0 = signal_tensor(m0);
    CHECK(std::abs(t0.norm() - std::sqrt(2.5)) < 1e-12);

    const auto mz = map_bits_to_signal(zeros, cs, 0.0);
    CHECK(signal_tensor(mz).norm() == 0.0);

    Rng rng(8);
    Bits bits(12);
    for (auto& b : bits) b = rng.bernoulli(0.5) ? 1 : 0;
    const auto mb = map_bits_to_signal(bits, cs, 1.0);
    const ComplexTensor t = signal_tensor(mb);
    // canonical vec equals kron with mode-0 fastest
    const Vector v0 = mb.mode_vectors[0];
    const Vector v1 = mb.mode_vectors[1];
    for (Index j = 0; j < v1.size(); ++j)
        for (Index i = 0; i < v0.size(); ++i)
            CHECK(std::abs(t.vec()[j * v0.size() + i] - v0[i] * v1[j]) < 1e-14);

    Bits wrong(11);
    CHECK_THROWS(map_bits_to_signal(wrong, cs, 1.0));
}

TEST_CASE("demap: exact codeword, scale/phase invariance, zero input, ties") {
    const auto c = build_constellation(0, 8, 6, 4242);
    for (int m : {0, 17, 63}) {
        const auto [idx, conf] = demap_mode(c.codebook.col(m), c);
        CHECK(idx == m);
        CHECK(conf == doctest::Approx(1.0));

        const Vector scaled = cd(3.7, 0) * std::polar(1.0, 1.2) * c.codebook.col(m);
        const auto [idx2, conf2] = demap_mode(scaled, c);
        CHECK(idx2 == m);
        CHECK(conf2 == doctest::Approx(1.0));
    }
    CHECK_THROWS(demap_mode(Vector::Zero(8), c));

    // duplicated codeword forces an exact tie; lowest index must win
    SubConstellation dup = c;
    dup.codebook.col(5) = dup.codebook.col(2);
    const auto [idx, conf] = demap_mode(dup.codebook.col(2), dup);
    CHECK(idx == 2);
}

TEST_CASE("demap decisions coincide with the exhaustive matched-filter oracle") {
    const auto c = build_constellation(0, 8, 4, 99);  // 16 codewords of length 8
    Rng rng(1717);
    const double snr_db = 20.0;
    const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0));
    int mismatch = 0;
    int errors = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = static_cast<int>(rng.index(16));
        Vector x = c.codebook.col(m);
        for (Index i = 0; i < x.size(); ++i) x[i] += sigma * rng.cgauss();

        const auto [idx, conf] = demap_mode(x, c);
        // oracle: brute-force scale-invariant matched filter
        int best = 0;
        double best_corr = -1;
        for (Index k = 0; k < 16; ++k) {
            const double corr = std::abs(c.codebook.col(k).dot(x)) / x.norm();
            if (corr > best_corr) {
                best_corr = corr;
                best = static_cast<int>(k);
            }
        }
        if (idx != best) ++mismatch;
        if (idx != m) ++errors;
    }
    CHECK(mismatch == 0);           // identical decisions by construction
    CHECK(errors <= 1000 * 0.05);   // and sane error rate at 20 dB
}

TEST_CASE("assembling then demapping a noiseless rank-1 block recovers all indices") {
    SystemConfig cfg;
    const auto cs = build_constellations(cfg);
    Rng rng(31);
    Bits bits(12);
    for (auto& b : bits) b = rng.bernoulli(0.5) ? 1 : 0;
    const auto mapped = map_bits_to_signal(bits, cs, 3.0);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto [idx, conf] = demap_mode(mapped.mode_vectors[i], cs[i]);
        CHECK(idx == mapped.indices[i]);
        CHECK(conf == doctest::Approx(1.0));
    }
}

TEST_CASE("hex rendering of message bits") {
    CHECK(bits_to_hex({1, 0, 1, 0}) == "a");
    CHECK(bits_to_hex({1, 1, 1, 1, 0, 0, 0, 0}) == "f0");
    CHECK(bits_to_hex({1, 0}) == "8");  // right-padded nibble
}
