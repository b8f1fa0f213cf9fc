#include <doctest.h>

#include <set>

#include "risura/rng.hpp"
#include "risura/treecode.hpp"

using namespace risura;

namespace {

const TreeCodeProfile kDesk{3, 12, {0, 6, 12}, 7777};

Bits random_bits(int n, Rng& rng) {
    Bits b(static_cast<std::size_t>(n));
    for (auto& x : b) x = rng.bernoulli(0.5) ? 1 : 0;
    return b;
}

}  // namespace

TEST_CASE("paper profile splits info as (270, 102, 0)") {
    TreeCodeProfile p{3, 270, {0, 168, 270}, 1};
    CHECK(p.info_sizes() == std::vector<int>{270, 102, 0});
    CHECK(p.B_total() == 372);
}

TEST_CASE("all-zero message yields all-zero parity") {
    const Bits msg(18, 0);
    const auto blocks = encode_tree(msg, kDesk);
    REQUIRE(blocks.size() == 3);
    for (const auto& b : blocks) {
        REQUIRE(b.size() == 12);
        for (auto bit : b) CHECK(bit == 0);
    }
}

TEST_CASE("desk profile round trip and determinism") {
    Rng rng(21);
    for (int rep = 0; rep < 50; ++rep) {
        const Bits msg = random_bits(18, rng);
        const auto blocks = encode_tree(msg, kDesk);
        CHECK(encode_tree(msg, kDesk) == blocks);

        std::vector<std::vector<Bits>> lists(3);
        for (int l = 0; l < 3; ++l) lists[static_cast<std::size_t>(l)].push_back(blocks[static_cast<std::size_t>(l)]);
        const auto dec = decode_tree(lists, kDesk);
        REQUIRE(dec.size() == 1);
        CHECK(dec.front() == msg);
    }
    CHECK_THROWS(encode_tree(Bits(17, 0), kDesk));
}

TEST_CASE("encoding is injective across random messages") {
    Rng rng(22);
    std::set<std::vector<Bits>> images;
    std::set<Bits> msgs;
    for (int rep = 0; rep < 200; ++rep) {
        const Bits msg = random_bits(18, rng);
        if (!msgs.insert(msg).second) continue;
        CHECK(images.insert(encode_tree(msg, kDesk)).second);
    }
}

TEST_CASE("five devices stitch back exactly; an empty list yields nothing") {
    Rng rng(23);
    std::set<Bits> msgs;
    while (msgs.size() < 5) msgs.insert(random_bits(18, rng));

    std::vector<std::vector<Bits>> lists(3);
    for (const auto& m : msgs) {
        const auto blocks = encode_tree(m, kDesk);
        for (int l = 0; l < 3; ++l) lists[static_cast<std::size_t>(l)].push_back(blocks[static_cast<std::size_t>(l)]);
    }
    const auto dec = decode_tree(lists, kDesk);
    CHECK(dec.size() == msgs.size());
    for (const auto& m : dec) CHECK(msgs.count(m) == 1);

    lists[1].clear();
    CHECK(decode_tree(lists, kDesk).empty());
}

TEST_CASE("impostor fragments are filtered at roughly the parity false-pass rate") {
    // 5 true + 50 impostors per block; sum of parity bits is 18, so a wrong
    // path survives with probability ~2^-18
    Rng rng(24);
    const int trials = 100;
    long long wrong_paths = 0;
    long long false_stitches = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::set<Bits> msgs;
        while (msgs.size() < 5) msgs.insert(random_bits(18, rng));
        std::vector<std::vector<Bits>> lists(3);
        for (const auto& m : msgs) {
            const auto blocks = encode_tree(m, kDesk);
            for (int l = 0; l < 3; ++l)
                lists[static_cast<std::size_t>(l)].push_back(blocks[static_cast<std::size_t>(l)]);
        }
        for (int l = 0; l < 3; ++l)
            for (int j = 0; j < 50; ++j)
                lists[static_cast<std::size_t>(l)].push_back(random_bits(12, rng));

        const auto dec = decode_tree(lists, kDesk);
        for (const auto& m : dec)
            if (!msgs.count(m)) ++false_stitches;
        long long paths = 1;
        for (const auto& lst : lists) paths *= static_cast<long long>(lst.size());
        wrong_paths += paths - 5;
    }
    const double bound = static_cast<double>(wrong_paths) / std::pow(2.0, 18);
    MESSAGE("false stitches ", false_stitches, " vs analytical bound ", bound);
    CHECK(static_cast<double>(false_stitches) <= 3.0 * bound + 1e-9);
}

TEST_CASE("profile validation") {
    CHECK_THROWS(TreeCodeProfile{3, 12, {1, 6, 12}, 1}.validate());
    CHECK_THROWS(TreeCodeProfile{3, 12, {0, 13, 12}, 1}.validate());
    CHECK_THROWS(TreeCodeProfile{3, 12, {0, 6}, 1}.validate());
}
