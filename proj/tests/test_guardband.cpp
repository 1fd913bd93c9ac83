#include <doctest.h>

#include "idspolar/guardband.hpp"
#include "idspolar/random.hpp"

using namespace idspolar;

namespace {

BitString random_bits(std::size_t n, RandomSource& rng) {
    BitString b;
    for (std::size_t i = 0; i < n; ++i) b.push_back(rng.bit());
    return b;
}

}  // namespace

TEST_CASE("ell sequence") {
    const GuardConfig cfg(10, 4, 0.2);
    const std::size_t expected[] = {1, 1, 2, 4, 8, 16, 16, 32, 64, 128};
    for (int m = 1; m <= 10; ++m) CHECK(cfg.ell(m) == expected[m - 1]);
    for (int m = 1; m < 10; ++m) CHECK(cfg.ell(m) <= cfg.ell(m + 1));
}

TEST_CASE("config validation") {
    CHECK_THROWS(GuardConfig(3, 4, 0.2));
    CHECK_THROWS(GuardConfig(3, 0, 0.2));
    CHECK_THROWS(GuardConfig(3, 2, 0.0));
    CHECK_THROWS(GuardConfig(3, 2, 0.5));
    CHECK_NOTHROW(GuardConfig(3, 3, 0.2));
}

TEST_CASE("window length") {
    CHECK(GuardConfig(10, 6, 0.2).window_length(1.0) == 4);
    CHECK(GuardConfig(10, 5, 0.2).window_length(1.0) == 2);
    CHECK(GuardConfig(5, 2, 0.2).window_length(0.9) == 1);
    CHECK(GuardConfig(5, 1, 0.2).window_length(0.1) == 1);
}

TEST_CASE("small guard layout by hand") {
    const GuardConfig cfg(3, 2, 0.25);
    CHECK(cfg.ell(2) == 1);
    CHECK(cfg.ell(3) == 2);
    const GuardedCodeword g = encode_with_guards(BitString::parse("10110010"), cfg);
    CHECK(g.bits.to_string() == "1011" "011110" "0010");
    CHECK(g.bits.size() == 14);
    CHECK(total_length(cfg) == 14);
}

TEST_CASE("two-level layout") {
    const GuardConfig cfg(5, 3, 0.2);
    CHECK(cfg.ell(3) == 2);
    CHECK(cfg.ell(4) == 4);
    CHECK(cfg.ell(5) == 8);
    CHECK(total_length(cfg) == 76);
    RandomSource rng(1);
    const GuardedCodeword g = encode_with_guards(random_bits(32, rng), cfg);
    CHECK(g.bits.size() == 76);

    std::size_t blocks = 0, cursor = 0;
    std::vector<std::size_t> guard_lengths(3, 0);
    for (const auto& seg : g.layout.segments) {
        CHECK(seg.start == cursor);
        cursor = seg.end;
        if (seg.kind == SegmentKind::Block) {
            ++blocks;
            CHECK(seg.length() == 8);
        } else {
            guard_lengths[seg.index] += seg.length();
            if (seg.kind == SegmentKind::GuardLeft || seg.kind == SegmentKind::GuardRight) CHECK(seg.length() == 2);
        }
    }
    CHECK(cursor == 76);
    CHECK(blocks == 4);
    CHECK(guard_lengths == std::vector<std::size_t>{12, 20, 12});
    CHECK(cfg.guard_level(0) == 4);
    CHECK(cfg.guard_level(1) == 5);
    CHECK(cfg.guard_level(2) == 4);
}

TEST_CASE("single block is the identity") {
    const GuardConfig cfg(3, 3, 0.2);
    const BitString x = BitString::parse("01101001");
    const GuardedCodeword g = encode_with_guards(x, cfg);
    CHECK(g.bits == x);
    REQUIRE(g.layout.segments.size() == 1);
    CHECK(g.layout.segments[0].kind == SegmentKind::Block);
    CHECK(total_length(cfg) == 8);
}

TEST_CASE("closed form length and guard overhead") {
    for (int n = 2; n <= 14; ++n)
        for (int n0 = 1; n0 <= n; ++n0) {
            const GuardConfig cfg(n, n0, 0.2);
            if (n <= 12) {
                CHECK(total_length(cfg) == encode_with_guards(BitString::zeros(cfg.N()), cfg).bits.size());
            }
        }
    // Overhead per payload bit shrinks as blocks grow at a fixed number of blocks.
    double previous = 1e9;
    for (int n0 = 4; n0 <= 36; n0 += 4) {
        const GuardConfig cfg(n0 + 3, n0, 0.2);
        const double ratio = static_cast<double>(total_length(cfg)) / static_cast<double>(cfg.N());
        CHECK(ratio < previous);
        previous = ratio;
    }
    CHECK(previous < 1.05);
}

TEST_CASE("split and strip round trip") {
    RandomSource rng(5);
    const GuardConfig cfg(5, 3, 0.2);
    CHECK(split_blocks(random_bits(32, rng), cfg).size() == 4);
    const GuardConfig small(3, 2, 0.2);
    CHECK(split_blocks(random_bits(8, rng), small).size() == 2);
    for (int t = 0; t < 20; ++t) {
        const BitString x = random_bits(32, rng);
        BitString joined;
        for (const auto& b : split_blocks(x, cfg)) joined.append(b);
        CHECK(joined == x);
        const GuardedCodeword g = encode_with_guards(x, cfg);
        CHECK(strip_guards(g.bits, g.layout) == x);
    }
    CHECK_THROWS_AS(encode_with_guards(BitString::zeros(31), cfg), BadLength);
    CHECK_THROWS_AS(split_blocks(BitString::zeros(16), cfg), BadLength);
}

TEST_CASE("layout json lists segments") {
    const GuardedCodeword g = encode_with_guards(BitString::zeros(8), GuardConfig(3, 2, 0.25));
    const auto j = g.layout.to_json();
    CHECK(j.dump().find("guard") != std::string::npos);
}
