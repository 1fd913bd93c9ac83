#pragma once

#include <cstdint>

#include "idspolar/trellis.hpp"

namespace idspolar {

/// Largest block for exact enumeration of I(X;Y) and I(X;Y*).
inline constexpr int kMaxExactMiBits = 4;

struct ExactInformation {
    int block_bits = 0;
    double i_xy = 0;      // bits
    double i_xystar = 0;  // bits
    std::size_t y_support = 0;
    std::size_t ystar_support = 0;
};

/// Exact mutual information for a uniform block by enumerating every
/// output. P(y*|x) is the convolution of the left pad, channel output and
/// right pad laws. Needs table pads and at most kMaxExactMiBits bits.
ExactInformation exact_information(const ChannelSpec& spec, const PadModel& pads, int block_bits);

struct MonteCarloInformation {
    int block_bits = 0;
    std::uint64_t trials = 0;
    double i_xy = 0;
    double i_xy_half_width = 0;
    double i_xystar = 0;
    double i_xystar_half_width = 0;
    /// Mean and 95% half-width of the per-trial difference I(X;Y) - I(X;Y*) terms.
    double gap = 0;
    double gap_half_width = 0;
    /// Trials whose sampled pads have zero probability under the pad model (excluded).
    std::uint64_t unsupported = 0;
};

/// Plug-in estimates: average of log2 P(out|x)/P(out) over sampled (x, out),
/// with exact likelihoods. Y and Y* share x and channel noise in each trial.
MonteCarloInformation monte_carlo_information(const ChannelSpec& spec, const PadModel& pads, const PadContext& ctx,
                                              int block_bits, std::uint64_t trials, std::uint64_t seed);

}  // namespace idspolar
