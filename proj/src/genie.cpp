#include "idspolar/genie.hpp"

namespace idspolar {

BitString SegmentedOutput::concatenated() const {
    BitString y;
    for (const auto& p : pieces) y.append(p);
    return y;
}

SegmentedOutput transmit_segmented(const ChannelSpec& spec, const BitString& g_x, const GuardLayout& layout,
                                   RandomSource& rng) {
    if (layout.total_length() != g_x.size()) throw BadLength("layout does not match the guarded codeword");
    SegmentedOutput out;
    out.pieces.reserve(layout.segments.size());
    out.offsets.reserve(layout.segments.size());
    std::size_t offset = 0;
    for (const auto& seg : layout.segments) {
        BitString piece;
        for (std::size_t k = seg.start; k < seg.end; ++k) emit_symbol(spec, g_x[k], rng, piece);
        out.offsets.push_back(offset);
        offset += piece.size();
        out.pieces.push_back(std::move(piece));
    }
    return out;
}

namespace {

// Left-pad procedure on scan-ordered strings. For the mirrored (right) pad
// the extension draws are emitted physically and so enter the scan reversed.
PadOutcome pad_scan(const BitString& d_midright, const BitString& d_right, int h, const ChannelSpec& spec,
                    RandomSource& rng, std::optional<int> rho, bool mirrored) {
    if (h < 1) throw std::invalid_argument("window length must be positive");
    const auto window = static_cast<std::size_t>(h);
    PadOutcome out;

    BitString ones = d_midright;
    while (ones.size() < window) {
        out.flags.short_ones = true;
        BitString draw;
        emit_symbol(spec, 1, rng, draw);
        if (mirrored) draw = draw.reversed();
        ones.prepend(draw);
        out.extension.prepend(draw);
    }

    out.rho = rho ? *rho : rng.uniform_int(1, h);
    if (out.rho < 1 || out.rho > h) throw std::invalid_argument("dither must lie in {1..h}");

    // z = ones + d_right; the window covers z[e-h, e) in 0-based terms.
    const std::size_t z_len = ones.size() + d_right.size();
    auto zeros_in_window = [&](std::size_t e) {
        std::size_t zeros = 0;
        for (std::size_t k = e - window; k < e; ++k) {
            const Bit b = k < ones.size() ? ones[k] : d_right[k - ones.size()];
            zeros += b == 0;
        }
        return zeros;
    };

    std::size_t e = ones.size() + static_cast<std::size_t>(out.rho);
    if (e > z_len) {
        out.flags.first_window_fell_off = true;
        out.consumed = d_right.size();
        return out;
    }
    out.frames = 1;
    if (2 * zeros_in_window(e) < window) {
        e += window;
        if (e > z_len) {
            out.flags.second_window_fell_off = true;
            out.frames = 0;
            out.consumed = d_right.size();
            return out;
        }
        out.frames = 2;
    }
    out.consumed = e - ones.size();
    out.pad = d_right.suffix_from(out.consumed);
    return out;
}

}  // namespace

PadOutcome genie_pad_left(const BitString& d_midright, const BitString& d_right, int h, const ChannelSpec& spec,
                          RandomSource& rng, std::optional<int> rho) {
    return pad_scan(d_midright, d_right, h, spec, rng, rho, false);
}

PadOutcome genie_pad_right(const BitString& d_left, const BitString& d_midleft, int h, const ChannelSpec& spec,
                           RandomSource& rng, std::optional<int> rho) {
    PadOutcome out = pad_scan(d_midleft.reversed(), d_left.reversed(), h, spec, rng, rho, true);
    out.pad = out.pad.reversed();
    out.extension = out.extension.reversed();
    return out;
}

namespace {

std::size_t count_entries(const DitherTape& tape, bool PadFlags::*flag) {
    std::size_t n = 0;
    for (const auto& e : tape.entries) n += e.flags.*flag;
    return n;
}

nlohmann::json flags_json(const PadFlags& f) {
    return {{"short_ones", f.short_ones},
            {"first_window_fell_off", f.first_window_fell_off},
            {"second_window_fell_off", f.second_window_fell_off}};
}

}  // namespace

std::size_t DitherTape::count_short_ones() const { return count_entries(*this, &PadFlags::short_ones); }
std::size_t DitherTape::count_first_fell_off() const { return count_entries(*this, &PadFlags::first_window_fell_off); }
std::size_t DitherTape::count_second_fell_off() const {
    return count_entries(*this, &PadFlags::second_window_fell_off);
}

nlohmann::json DitherTape::to_json() const {
    nlohmann::json entries_json = nlohmann::json::array();
    for (const auto& e : entries)
        entries_json.push_back({{"guard", e.guard},
                                {"side", e.side == PadSide::Left ? "left" : "right"},
                                {"rho", e.rho},
                                {"extension", e.extension.to_string()},
                                {"flags", flags_json(e.flags)}});
    return {{"edge_left", edge_left.to_string()}, {"edge_right", edge_right.to_string()}, {"entries", entries_json}};
}

PadContext PadContext::for_config(const GuardConfig& cfg, double beta, std::optional<int> level) {
    const int m = level.value_or(cfg.n0() + 1);
    return PadContext{cfg.zero_run(), cfg.ell(m), cfg.window_length(beta)};
}

PadOutcome sample_pad_left(const ChannelSpec& spec, const PadContext& ctx, RandomSource& rng) {
    const BitString d_midright = transmit(spec, BitString::ones(ctx.ones_len), rng);
    const BitString d_right = transmit(spec, BitString::zeros(ctx.zero_len), rng);
    return genie_pad_left(d_midright, d_right, ctx.h, spec, rng);
}

PadOutcome sample_pad_right(const ChannelSpec& spec, const PadContext& ctx, RandomSource& rng) {
    const BitString d_left = transmit(spec, BitString::zeros(ctx.zero_len), rng);
    const BitString d_midleft = transmit(spec, BitString::ones(ctx.ones_len), rng);
    return genie_pad_right(d_left, d_midleft, ctx.h, spec, rng);
}

DzpBlockOutput sample_dzp(const ChannelSpec& spec, const BitString& x_block, const PadContext& ctx,
                          RandomSource& rng) {
    DzpBlockOutput out;
    out.left = sample_pad_left(spec, ctx, rng).pad;
    out.middle = transmit(spec, x_block, rng);
    out.right = sample_pad_right(spec, ctx, rng).pad;
    return out;
}

GenieParse genie_parse(const ChannelSpec& spec, const BitString& x, const GuardConfig& cfg, RandomSource& rng) {
    const double beta = channel_stats(spec).beta;
    const int h = cfg.window_length(beta);
    const PadContext ctx = PadContext::for_config(cfg, beta);

    GenieParse parse;
    parse.codeword = encode_with_guards(x, cfg);
    const GuardLayout& layout = parse.codeword.layout;
    parse.output = transmit_segmented(spec, parse.codeword.bits, layout, rng);
    parse.tape.edge_left = sample_pad_left(spec, ctx, rng).pad;
    parse.tape.edge_right = sample_pad_right(spec, ctx, rng).pad;

    const std::size_t phi = cfg.Phi();
    parse.blocks.resize(phi);
    for (std::size_t i = 0; i < phi; ++i)
        parse.blocks[i].middle = parse.output.piece(layout, SegmentKind::Block, i);
    parse.blocks.front().left = parse.tape.edge_left;
    parse.blocks.back().right = parse.tape.edge_right;

    const auto& piece = [&](SegmentKind k, std::size_t g) -> const BitString& { return parse.output.piece(layout, k, g); };
    for (std::size_t g = 0; g + 1 < phi; ++g) {
        PadOutcome right = genie_pad_right(piece(SegmentKind::GuardLeft, g), piece(SegmentKind::GuardMidLeft, g), h,
                                           spec, rng);
        PadOutcome left = genie_pad_left(piece(SegmentKind::GuardMidRight, g), piece(SegmentKind::GuardRight, g), h,
                                         spec, rng);
        parse.blocks[g].right = right.pad;
        parse.blocks[g + 1].left = left.pad;
        parse.tape.entries.push_back({g, PadSide::Right, right.rho, right.extension, right.flags});
        parse.tape.entries.push_back({g, PadSide::Left, left.rho, left.extension, left.flags});
    }
    return parse;
}

}  // namespace idspolar
