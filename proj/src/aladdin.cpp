#include "idspolar/aladdin.hpp"

#include <map>

namespace idspolar {

TrimTrace trim_scan(std::span<const Bit> z, int h, int dither) {
    TrimTrace t;
    t.h = h;
    t.dither = dither;
    const auto window = static_cast<std::size_t>(h);
    std::size_t e = window + static_cast<std::size_t>(dither);
    for (;;) {
        if (e > z.size()) {
            t.failed = true;
            return t;
        }
        ++t.frames;
        if (2 * count_zeros(z.subspan(e - window, window)) >= window) {
            t.cut = e;
            return t;
        }
        e += window;
    }
}

namespace {

struct Parser {
    const BitString& y_pad;
    const GuardConfig& cfg;
    int h;
    RandomSource& rng;
    ParseResult result;

    void run(std::size_t first, std::size_t last, int m, std::size_t block_offset) {
        if (result.failed) return;
        if (m <= cfg.n0()) {
            result.blocks.push_back(y_pad.slice(first, last));
            return;
        }
        const std::size_t half_blocks = std::size_t{1} << (m - cfg.n0() - 1);
        const std::size_t len = last - first;
        const std::size_t mid = first + (len + 1) / 2;

        ParseSite site{block_offset + half_blocks - 1, m, mid, {}, {}};
        const BitString z_first = y_pad.slice(first, mid).reversed();
        site.first_half = trim_scan(z_first.view(), h, rng.uniform_int(1, h));
        site.first_half.backward = true;
        site.first_half.origin = mid;
        site.second_half = trim_scan(y_pad.view().subspan(mid, last - mid), h, rng.uniform_int(1, h));
        site.second_half.origin = mid;
        result.sites.push_back(site);

        if (site.first_half.failed || site.second_half.failed) {
            result.failed = true;
            result.failure_site = site.guard;
            result.blocks.clear();
            return;
        }
        run(first, mid - site.first_half.cut, m - 1, block_offset);
        run(mid + site.second_half.cut, last, m - 1, block_offset + half_blocks);
    }
};

nlohmann::json trace_json(const TrimTrace& t) {
    return {{"dither", t.dither}, {"frames", t.frames}, {"cut", t.cut}, {"failed", t.failed}};
}

}  // namespace

ParseResult aladdin_parse(const BitString& y_pad, const GuardConfig& cfg, int h, RandomSource& rng) {
    if (h < 1) throw std::invalid_argument("window length must be positive");
    Parser p{y_pad, cfg, h, rng, {}};
    p.run(0, y_pad.size(), cfg.n(), 0);
    return std::move(p.result);
}

nlohmann::json ParseResult::to_json() const {
    nlohmann::json out{{"failed", failed}};
    if (failure_site) out["failure_site"] = *failure_site;
    nlohmann::json b = nlohmann::json::array();
    for (const auto& blk : blocks) b.push_back(blk.to_string());
    out["blocks"] = b;
    nlohmann::json s = nlohmann::json::array();
    for (const auto& site : sites)
        s.push_back({{"guard", site.guard},
                     {"level", site.level},
                     {"midpoint", site.midpoint},
                     {"first_half", trace_json(site.first_half)},
                     {"second_half", trace_json(site.second_half)}});
    out["sites"] = s;
    return out;
}

std::optional<int> derive_genie_dither(const TrimTrace& trace, long long boundary) {
    const long long h = trace.h;
    if (boundary < h) return std::nullopt;
    const long long k = (boundary - trace.dither) / h;
    return static_cast<int>(trace.dither + h * (k + 1) - boundary);
}

CouplingFlags& CouplingFlags::operator+=(const CouplingFlags& o) {
    short_ones += o.short_ones;
    first_window_fell_off += o.first_window_fell_off;
    second_window_fell_off += o.second_window_fell_off;
    early_stop += o.early_stop;
    overrun += o.overrun;
    misplaced_midpoint += o.misplaced_midpoint;
    parse_failure += o.parse_failure;
    return *this;
}

CoupledTrialReport run_coupled_trial(const ChannelSpec& spec, const BitString& x, const GuardConfig& cfg,
                                     RandomSource& rng) {
    const double beta = channel_stats(spec).beta;
    const int h = cfg.window_length(beta);
    const PadContext ctx = PadContext::for_config(cfg, beta);

    const GuardedCodeword codeword = encode_with_guards(x, cfg);
    const GuardLayout& layout = codeword.layout;
    const SegmentedOutput output = transmit_segmented(spec, codeword.bits, layout, rng);
    const BitString edge_left = sample_pad_left(spec, ctx, rng).pad;
    const BitString edge_right = sample_pad_right(spec, ctx, rng).pad;
    const BitString y_pad = edge_left + output.concatenated() + edge_right;
    const auto shift = static_cast<long long>(edge_left.size());

    CoupledTrialReport report;
    report.aladdin = aladdin_parse(y_pad, cfg, h, rng);
    if (report.aladdin.failed) report.flags.parse_failure = 1;

    std::map<std::size_t, const ParseSite*> site_of_guard;
    for (const auto& site : report.aladdin.sites) site_of_guard[site.guard] = &site;

    const std::size_t phi = cfg.Phi();
    report.genie_blocks.resize(phi);
    for (std::size_t i = 0; i < phi; ++i)
        report.genie_blocks[i].middle = output.piece(layout, SegmentKind::Block, i);
    report.genie_blocks.front().left = edge_left;
    report.genie_blocks.back().right = edge_right;

    auto couple = [&](std::size_t guard, PadSide side) {
        const auto it = site_of_guard.find(guard);
        const ParseSite* site = it == site_of_guard.end() ? nullptr : it->second;
        DitherPair pair{guard, side, std::nullopt, 0, false};
        const TrimTrace* trace = nullptr;
        long long boundary = 0;
        if (site) {
            const auto mid = static_cast<long long>(site->midpoint);
            if (side == PadSide::Right) {
                trace = &site->first_half;
                const std::size_t zeros = layout.find(SegmentKind::GuardLeft, guard);
                boundary = mid - (shift + static_cast<long long>(output.offsets[zeros] + output.pieces[zeros].size()));
            } else {
                trace = &site->second_half;
                boundary = shift + static_cast<long long>(output.offset(layout, SegmentKind::GuardRight, guard)) - mid;
            }
            pair.aladdin_rho = trace->dither;
            if (auto rho = derive_genie_dither(*trace, boundary)) {
                pair.genie_rho = *rho;
                pair.derived = true;
            } else {
                pair.genie_rho = trace->dither;
                ++report.flags.misplaced_midpoint;
            }
        } else {
            pair.genie_rho = rng.uniform_int(1, h);
        }

        const PadOutcome pad =
            side == PadSide::Right
                ? genie_pad_right(output.piece(layout, SegmentKind::GuardLeft, guard),
                                  output.piece(layout, SegmentKind::GuardMidLeft, guard), h, spec, rng, pair.genie_rho)
                : genie_pad_left(output.piece(layout, SegmentKind::GuardMidRight, guard),
                                 output.piece(layout, SegmentKind::GuardRight, guard), h, spec, rng, pair.genie_rho);
        report.flags.short_ones += pad.flags.short_ones;
        report.flags.first_window_fell_off += pad.flags.first_window_fell_off;
        report.flags.second_window_fell_off += pad.flags.second_window_fell_off;

        if (pair.derived && !trace->failed && pad.frames > 0) {
            const long long first_frame_end = boundary + pair.genie_rho;
            const long long genie_end = first_frame_end + (pad.frames == 2 ? h : 0);
            const auto cut = static_cast<long long>(trace->cut);
            if (cut < first_frame_end)
                ++report.flags.early_stop;
            else if (cut > genie_end)
                ++report.flags.overrun;
        }
        report.dithers.push_back(pair);
        return pad.pad;
    };

    for (std::size_t g = 0; g + 1 < phi; ++g) {
        report.genie_blocks[g].right = couple(g, PadSide::Right);
        report.genie_blocks[g + 1].left = couple(g, PadSide::Left);
    }

    report.matched = !report.aladdin.failed && report.aladdin.blocks.size() == phi;
    for (std::size_t i = 0; report.matched && i < phi; ++i)
        report.matched = report.aladdin.blocks[i] == report.genie_blocks[i].y_star();
    return report;
}

nlohmann::json CoupledTrialReport::to_json() const {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& b : genie_blocks) g.push_back(b.y_star().to_string());
    nlohmann::json d = nlohmann::json::array();
    for (const auto& p : dithers) {
        nlohmann::json e{{"guard", p.guard},
                         {"side", p.side == PadSide::Left ? "left" : "right"},
                         {"genie_rho", p.genie_rho},
                         {"derived", p.derived}};
        e["aladdin_rho"] = p.aladdin_rho ? nlohmann::json(*p.aladdin_rho) : nlohmann::json(nullptr);
        d.push_back(e);
    }
    return {{"matched", matched},
            {"genie_blocks", g},
            {"aladdin", aladdin.to_json()},
            {"flags",
             {{"short_ones", flags.short_ones},
              {"first_window_fell_off", flags.first_window_fell_off},
              {"second_window_fell_off", flags.second_window_fell_off},
              {"early_stop", flags.early_stop},
              {"overrun", flags.overrun},
              {"misplaced_midpoint", flags.misplaced_midpoint},
              {"parse_failure", flags.parse_failure}}},
            {"dithers", d}};
}

}  // namespace idspolar
