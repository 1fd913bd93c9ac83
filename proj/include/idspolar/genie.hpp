#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "idspolar/channel.hpp"
#include "idspolar/guardband.hpp"

namespace idspolar {

/// Channel output split along the input layout: pieces[k] is the output of
/// layout.segments[k].
struct SegmentedOutput {
    std::vector<BitString> pieces;
    /// Start of pieces[k] within the concatenated output.
    std::vector<std::size_t> offsets;

    const BitString& piece(const GuardLayout& layout, SegmentKind kind, std::size_t index) const {
        return pieces[layout.find(kind, index)];
    }
    std::size_t offset(const GuardLayout& layout, SegmentKind kind, std::size_t index) const {
        return offsets[layout.find(kind, index)];
    }
    BitString concatenated() const;
};

/// Each layout segment goes through the channel independently; since the
/// channel is memoryless the concatenation has the law of transmit(spec, g_x).
SegmentedOutput transmit_segmented(const ChannelSpec& spec, const BitString& g_x, const GuardLayout& layout,
                                   RandomSource& rng);

struct PadFlags {
    bool short_ones = false;              // ones run shorter than h, extended with fresh draws
    bool first_window_fell_off = false;   // dithered window ran past the zero run
    bool second_window_fell_off = false;  // following frame ran past the zero run

    bool any() const noexcept { return short_ones || first_window_fell_off || second_window_fell_off; }
};

/// Result of one dithered padding procedure.
struct PadOutcome {
    BitString pad;
    int rho = 0;
    /// Symbols prepended (left pad) or appended (right pad) to the ones run.
    BitString extension;
    PadFlags flags;
    /// Symbols of the dirty-zero run discarded before the pad starts
    /// (left pad) or after it ends (right pad). Equals the run length when the
    /// pad is empty.
    std::size_t consumed = 0;
    /// 1 if the dithered window decided, 2 if the following frame did; 0 on fall-off.
    int frames = 0;
};

/// Left padding of a block from the output of the preceding guard's midright
/// (ones) and right (zeros) sub-blocks. Draws the dither uniformly on {1..h}
/// unless one is supplied.
PadOutcome genie_pad_left(const BitString& d_midright, const BitString& d_right, int h, const ChannelSpec& spec,
                          RandomSource& rng, std::optional<int> rho = std::nullopt);

/// Mirror image of genie_pad_left: reverse, pad, reverse.
PadOutcome genie_pad_right(const BitString& d_left, const BitString& d_midleft, int h, const ChannelSpec& spec,
                           RandomSource& rng, std::optional<int> rho = std::nullopt);

/// One block's parsed output y* = left + middle + right.
struct DzpBlockOutput {
    BitString left;
    BitString middle;
    BitString right;

    BitString y_star() const { return left + middle + right; }
};

enum class PadSide { Left, Right };

struct TapeEntry {
    std::size_t guard;
    /// Left: the left pad of block guard+1. Right: the right pad of block guard.
    PadSide side;
    int rho;
    BitString extension;
    PadFlags flags;
};

struct DitherTape {
    std::vector<TapeEntry> entries;
    BitString edge_left;
    BitString edge_right;

    std::size_t count_short_ones() const;
    std::size_t count_first_fell_off() const;
    std::size_t count_second_fell_off() const;
    nlohmann::json to_json() const;
};

/// Guard context read by the padding procedure: a run of `ones_len` ones
/// followed (left pad) or preceded (right pad) by `zero_len` zeros.
struct PadContext {
    std::size_t zero_len;
    std::size_t ones_len;
    int h;

    /// Context of a guard at `level` (default n0 + 1).
    static PadContext for_config(const GuardConfig& cfg, double beta, std::optional<int> level = std::nullopt);
    friend bool operator==(const PadContext&, const PadContext&) = default;
};

/// Draws a left pad from a freshly transmitted guard context.
PadOutcome sample_pad_left(const ChannelSpec& spec, const PadContext& ctx, RandomSource& rng);
PadOutcome sample_pad_right(const ChannelSpec& spec, const PadContext& ctx, RandomSource& rng);

/// Standalone sampler of the dirty-zero-padded channel for one block.
DzpBlockOutput sample_dzp(const ChannelSpec& spec, const BitString& x_block, const PadContext& ctx,
                          RandomSource& rng);

struct GenieParse {
    GuardedCodeword codeword;
    SegmentedOutput output;
    std::vector<DzpBlockOutput> blocks;
    DitherTape tape;
};

/// Encodes x with guards, transmits it, and pads every block. The outer edge
/// pads are fresh draws from the padding law.
GenieParse genie_parse(const ChannelSpec& spec, const BitString& x, const GuardConfig& cfg, RandomSource& rng);

}  // namespace idspolar
