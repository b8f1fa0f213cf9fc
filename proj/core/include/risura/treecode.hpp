#pragma once

#include <cstdint>
#include <vector>

#include "risura/config.hpp"
#include "risura/modem.hpp"

namespace risura {

// Tree outer code: block 1 is pure information, blocks l >= 2 append p_l
// parity bits, each a seeded pseudo-random half-density XOR over all
// information bits of blocks 1..l.
struct TreeCodeProfile {
    int L = 0;
    int R = 0;
    std::vector<int> parity;  // p_1 == 0
    std::uint64_t seed = 0;

    std::vector<int> info_sizes() const;
    int B_total() const;
    void validate() const;

    static TreeCodeProfile from_config(const SystemConfig& cfg);
};

// message (B_total bits) -> L blocks of R bits each.
std::vector<Bits> encode_tree(const Bits& message, const TreeCodeProfile& profile);

// Depth-first stitching over one fragment per block; a path survives iff
// every parity check recomputed from its info bits matches the carried
// parity bits. Returns all surviving messages, deduplicated.
std::vector<Bits> decode_tree(const std::vector<std::vector<Bits>>& candidates,
                              const TreeCodeProfile& profile);

}  // namespace risura
