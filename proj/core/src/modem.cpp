#include "risura/modem.hpp"

#include <cmath>
#include <stdexcept>

#include "risura/airlink.hpp"
#include "risura/rng.hpp"

namespace risura {

SubConstellation build_constellation(int mode_index, Index dim, int bits, std::uint64_t seed) {
    if (dim < 1 || bits < 0) throw std::invalid_argument("constellation: bad dimensions");
    constexpr std::uint64_t kBudgetBytes = 256ull << 20;
    const long double need = std::ldexp(1.0L, bits) * static_cast<long double>(dim) * 16.0L;
    if (bits >= 40 || need > static_cast<long double>(kBudgetBytes))
        throw std::invalid_argument(
            "constellation: 2^" + std::to_string(bits) + " codewords of length " +
            std::to_string(dim) + " need " + std::to_string(static_cast<double>(need / (1 << 20))) +
            " MiB, over the " + std::to_string(kBudgetBytes >> 20) +
            " MiB explicit-codebook budget; use fewer bits per mode");

    SubConstellation c;
    c.mode_index = mode_index;
    c.dim = dim;
    c.bits = bits;
    c.seed = seed;
    const Index count = Index(1) << bits;
    c.codebook.resize(dim, count);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(mode_index)));
    for (Index k = 0; k < count; ++k) {
        Vector v(dim);
        double n = 0.0;
        do {
            for (Index i = 0; i < dim; ++i) v[i] = rng.cgauss();
            n = v.norm();
        } while (n == 0.0);
        c.codebook.col(k) = v / n;
    }
    return c;
}

std::vector<SubConstellation> build_constellations(const SystemConfig& cfg) {
    std::vector<SubConstellation> out;
    out.reserve(static_cast<std::size_t>(cfg.d));
    for (int i = 0; i < cfg.d; ++i)
        out.push_back(build_constellation(i, cfg.tau[static_cast<std::size_t>(i)],
                                          cfg.bits_per_mode[static_cast<std::size_t>(i)],
                                          cfg.constellation_seed));
    return out;
}

Bits index_to_bits(int index, int width) {
    Bits b(static_cast<std::size_t>(width));
    for (int j = 0; j < width; ++j) b[static_cast<std::size_t>(j)] = (index >> j) & 1;
    return b;
}

int bits_to_index(const Bits& bits) {
    int v = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) v |= (bits[j] & 1) << j;
    return v;
}

MappedBlock map_bits_to_signal(const Bits& block_bits,
                               const std::vector<SubConstellation>& constellations, double power) {
    std::size_t need = 0;
    for (const auto& c : constellations) need += static_cast<std::size_t>(c.bits);
    if (block_bits.size() != need)
        throw std::invalid_argument("map_bits_to_signal: bit count does not match constellations");

    MappedBlock out;
    const double amp = std::sqrt(power);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < constellations.size(); ++i) {
        const auto& c = constellations[i];
        const Bits group(block_bits.begin() + static_cast<std::ptrdiff_t>(pos),
                         block_bits.begin() + static_cast<std::ptrdiff_t>(pos + c.bits));
        pos += static_cast<std::size_t>(c.bits);
        const int idx = bits_to_index(group);
        Vector x = c.codebook.col(idx);
        if (i == 0) x *= amp;
        out.mode_vectors.push_back(std::move(x));
        out.indices.push_back(idx);
    }
    return out;
}

ComplexTensor signal_tensor(const MappedBlock& block) {
    std::vector<Index> shape;
    for (const auto& v : block.mode_vectors) shape.push_back(v.size());
    return ComplexTensor(shape, outer_product_vec(block.mode_vectors));
}

std::pair<int, double> demap_mode(const Vector& x_hat, const SubConstellation& c) {
    const double xn = x_hat.norm();
    if (!(xn > 0)) throw std::invalid_argument("demap_mode: zero input vector");
    if (x_hat.size() != c.dim) throw std::invalid_argument("demap_mode: length mismatch");
    int best = 0;
    double best_corr = -1.0;
    for (Index k = 0; k < c.codebook.cols(); ++k) {
        const double corr = std::abs(c.codebook.col(k).dot(x_hat)) / xn;
        if (corr > best_corr) {
            best_corr = corr;
            best = static_cast<int>(k);
        }
    }
    return {best, best_corr};
}

std::string bits_to_hex(const Bits& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    const std::size_t n = bits.size();
    for (std::size_t pos = 0; pos < n; pos += 4) {
        int v = 0;
        for (std::size_t j = 0; j < 4 && pos + j < n; ++j) v = (v << 1) | (bits[pos + j] & 1);
        if (pos + 4 > n) v <<= (pos + 4 - n);  // right-pad the final nibble
        out.push_back(digits[v]);
    }
    return out;
}

}  // namespace risura
