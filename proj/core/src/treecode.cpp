#include "risura/treecode.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "risura/rng.hpp"

namespace risura {

std::vector<int> TreeCodeProfile::info_sizes() const {
    std::vector<int> b;
    b.reserve(parity.size());
    for (int p : parity) b.push_back(R - p);
    return b;
}

int TreeCodeProfile::B_total() const {
    int t = 0;
    for (int p : parity) t += R - p;
    return t;
}

void TreeCodeProfile::validate() const {
    if (L < 1 || static_cast<int>(parity.size()) != L)
        throw std::invalid_argument("tree code: parity profile must have L entries");
    if (parity.front() != 0) throw std::invalid_argument("tree code: p_1 must be 0");
    for (int p : parity)
        if (p < 0 || p > R) throw std::invalid_argument("tree code: parity counts must be in [0, R]");
}

TreeCodeProfile TreeCodeProfile::from_config(const SystemConfig& cfg) {
    TreeCodeProfile p;
    p.L = cfg.L;
    p.R = cfg.R;
    p.parity = cfg.parity;
    p.seed = cfg.code_seed;
    p.validate();
    return p;
}

namespace {

// masks[l][j]: XOR subset over the cumulative info bits of blocks 0..l for
// parity bit j of block l. Each bit joins with probability 1/2.
std::vector<std::vector<Bits>> parity_masks(const TreeCodeProfile& p) {
    const auto info = p.info_sizes();
    std::vector<std::vector<Bits>> masks(static_cast<std::size_t>(p.L));
    int cum = 0;
    for (int l = 0; l < p.L; ++l) {
        cum += info[static_cast<std::size_t>(l)];
        auto& block = masks[static_cast<std::size_t>(l)];
        block.resize(static_cast<std::size_t>(p.parity[static_cast<std::size_t>(l)]));
        for (int j = 0; j < p.parity[static_cast<std::size_t>(l)]; ++j) {
            Rng rng(derive_seed(p.seed, (static_cast<std::uint64_t>(l) << 32) |
                                            static_cast<std::uint64_t>(j)));
            Bits m(static_cast<std::size_t>(cum));
            for (auto& b : m) b = rng.bernoulli(0.5) ? 1 : 0;
            block[static_cast<std::size_t>(j)] = std::move(m);
        }
    }
    return masks;
}

std::uint8_t masked_xor(const Bits& info, const Bits& mask) {
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) acc ^= info[i] & mask[i];
    return acc;
}

}  // namespace

std::vector<Bits> encode_tree(const Bits& message, const TreeCodeProfile& profile) {
    profile.validate();
    if (static_cast<int>(message.size()) != profile.B_total())
        throw std::invalid_argument("encode_tree: message length must equal B_total");

    const auto info = profile.info_sizes();
    const auto masks = parity_masks(profile);

    std::vector<Bits> blocks;
    blocks.reserve(static_cast<std::size_t>(profile.L));
    std::size_t pos = 0;
    Bits seen;  // info bits of blocks 0..l
    for (int l = 0; l < profile.L; ++l) {
        const int bl = info[static_cast<std::size_t>(l)];
        Bits block(message.begin() + static_cast<std::ptrdiff_t>(pos),
                   message.begin() + static_cast<std::ptrdiff_t>(pos + bl));
        seen.insert(seen.end(), block.begin(), block.end());
        pos += static_cast<std::size_t>(bl);
        for (const Bits& m : masks[static_cast<std::size_t>(l)]) block.push_back(masked_xor(seen, m));
        blocks.push_back(std::move(block));
    }
    return blocks;
}

namespace {

struct Decoder {
    const TreeCodeProfile& p;
    const std::vector<std::vector<Bits>>& lists;
    std::vector<int> info;
    std::vector<std::vector<Bits>> masks;
    std::set<Bits> found;

    void search(int l, Bits& path_info) {
        if (l == p.L) {
            found.insert(path_info);
            return;
        }
        const int bl = info[static_cast<std::size_t>(l)];
        const int pl = p.parity[static_cast<std::size_t>(l)];
        for (const Bits& frag : lists[static_cast<std::size_t>(l)]) {
            if (static_cast<int>(frag.size()) != p.R) continue;
            const std::size_t base = path_info.size();
            path_info.insert(path_info.end(), frag.begin(), frag.begin() + bl);
            bool ok = true;
            for (int j = 0; j < pl && ok; ++j) {
                const auto& m = masks[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
                ok = masked_xor(path_info, m) == frag[static_cast<std::size_t>(bl + j)];
            }
            if (ok) search(l + 1, path_info);
            path_info.resize(base);
        }
    }
};

}  // namespace

std::vector<Bits> decode_tree(const std::vector<std::vector<Bits>>& candidates,
                              const TreeCodeProfile& profile) {
    profile.validate();
    if (static_cast<int>(candidates.size()) != profile.L)
        throw std::invalid_argument("decode_tree: need a candidate list per block");

    // duplicate fragments cannot change the (deduplicated) output
    std::vector<std::vector<Bits>> lists(candidates.size());
    for (std::size_t l = 0; l < candidates.size(); ++l) {
        std::set<Bits> uniq(candidates[l].begin(), candidates[l].end());
        lists[l].assign(uniq.begin(), uniq.end());
    }

    Decoder dec{profile, lists, profile.info_sizes(), parity_masks(profile), {}};
    Bits path;
    path.reserve(static_cast<std::size_t>(profile.B_total()));
    dec.search(0, path);
    return {dec.found.begin(), dec.found.end()};
}

}  // namespace risura
