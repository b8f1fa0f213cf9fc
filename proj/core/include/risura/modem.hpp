#pragma once

#include <cstdint>
#include <vector>

#include "risura/config.hpp"
#include "risura/tensor.hpp"

namespace risura {

using Bits = std::vector<std::uint8_t>;

// Seeded random Grassmannian-style sub-constellation: 2^bits unit-norm
// complex vectors of length dim, fully determined by (dim, bits, seed).
struct SubConstellation {
    int mode_index = 0;
    Index dim = 0;
    int bits = 0;
    std::uint64_t seed = 0;
    Matrix codebook;  // dim x 2^bits, unit-norm columns

    Index size() const { return codebook.cols(); }
};

// Throws when 2^bits codewords of the given length exceed the in-memory
// codebook budget (explicit codebooks only work at desk scale).
SubConstellation build_constellation(int mode_index, Index dim, int bits, std::uint64_t seed);

// One constellation per tensor mode from the config's tau / bits_per_mode.
std::vector<SubConstellation> build_constellations(const SystemConfig& cfg);

struct MappedBlock {
    std::vector<Vector> mode_vectors;  // mode 0 carries the sqrt(power) scale
    std::vector<int> indices;          // chosen codeword per mode
};

// Splits the R block bits into per-mode groups (LSB-first within a group),
// picks the indexed codeword per mode, and scales the rank-1 signal to
// Frobenius norm sqrt(power).
MappedBlock map_bits_to_signal(const Bits& block_bits,
                               const std::vector<SubConstellation>& constellations, double power);

ComplexTensor signal_tensor(const MappedBlock& block);

// Scale- and phase-invariant codeword decision: argmax |c^H x| / ||x||.
// Returns the index and the achieved normalized correlation in [0, 1].
// Exact ties resolve to the lowest index.
std::pair<int, double> demap_mode(const Vector& x_hat, const SubConstellation& c);

// index -> LSB-first bit group of the given width, and back.
Bits index_to_bits(int index, int width);
int bits_to_index(const Bits& bits);

std::string bits_to_hex(const Bits& bits);

}  // namespace risura
