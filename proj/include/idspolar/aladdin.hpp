#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "idspolar/genie.hpp"

namespace idspolar {

/// One dithered zero-majority scan. Scan coordinates count symbols away from
/// the split point: forward scans walk right through z_II, backward scans
/// walk left through z_I.
struct TrimTrace {
    bool backward = false;
    /// Absolute position of the split point in the padded output.
    std::size_t origin = 0;
    int dither = 0;
    int h = 0;
    /// Frames examined, including the one that decided.
    std::size_t frames = 0;
    /// Symbols removed (the window end e) when the scan succeeded.
    std::size_t cut = 0;
    bool failed = false;
};

/// Scans `z` (already in scan order) from its start: window [dither, dither+h),
/// then one frame at a time until the window holds at least h/2 zeros.
TrimTrace trim_scan(std::span<const Bit> z, int h, int dither);

struct ParseSite {
    std::size_t guard;
    int level;
    std::size_t midpoint;
    TrimTrace first_half;   // z_I, trimmed from its right end
    TrimTrace second_half;  // z_II, trimmed from its left end
};

struct ParseResult {
    std::vector<BitString> blocks;
    bool failed = false;
    std::optional<std::size_t> failure_site;
    /// Recursion sites in visiting order.
    std::vector<ParseSite> sites;

    nlohmann::json to_json() const;
};

/// Recursive midpoint parse of the edge-padded output. Dithers come from
/// `rng`, two per site (z_I first), sites in pre-order.
ParseResult aladdin_parse(const BitString& y_pad, const GuardConfig& cfg, int h, RandomSource& rng);

/// Genie dither coupled to a scan: the overlap of the first frame of the scan
/// grid (extended past wherever the scan actually stopped) with the dirty-zero
/// run that starts `boundary` symbols from the split point. Empty when
/// boundary < h, where the grid cannot map the dither bijectively.
std::optional<int> derive_genie_dither(const TrimTrace& trace, long long boundary);

struct CouplingFlags {
    std::size_t short_ones = 0;
    std::size_t first_window_fell_off = 0;
    std::size_t second_window_fell_off = 0;
    std::size_t early_stop = 0;          // scan stopped before reaching the zero run
    std::size_t overrun = 0;             // scan ran past the genie's final frame
    std::size_t misplaced_midpoint = 0;  // split point within h of (or past) the zero run
    std::size_t parse_failure = 0;

    std::size_t total() const noexcept {
        return short_ones + first_window_fell_off + second_window_fell_off + early_stop + overrun +
               misplaced_midpoint + parse_failure;
    }
    CouplingFlags& operator+=(const CouplingFlags& o);
};

struct DitherPair {
    std::size_t guard;
    PadSide side;
    std::optional<int> aladdin_rho;
    int genie_rho;
    bool derived;
};

struct CoupledTrialReport {
    std::vector<DzpBlockOutput> genie_blocks;
    ParseResult aladdin;
    bool matched = false;
    CouplingFlags flags;
    std::vector<DitherPair> dithers;

    nlohmann::json to_json() const;
};

/// One shared-randomness experiment: channel noise and edge pads are common,
/// Aladdin draws its dithers, and each genie dither is derived from the
/// corresponding scan.
CoupledTrialReport run_coupled_trial(const ChannelSpec& spec, const BitString& x, const GuardConfig& cfg,
                                     RandomSource& rng);

}  // namespace idspolar
