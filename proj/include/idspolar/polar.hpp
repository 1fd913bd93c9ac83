#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "idspolar/guardband.hpp"
#include "idspolar/trellis.hpp"

namespace idspolar {

/// x = u F^{(x)n} with F = [[1,0],[1,1]] (natural order). An involution.
/// Throws BadLength unless |u| is a power of two.
BitString polar_encode(const BitString& u);

/// Same transform on an integer holding `bits` bits (bit t is x_t); `bits` is a power of two.
std::uint64_t polar_encode_index(std::uint64_t u, int bits);

struct PolarConfig {
    int n = 0;
    int n0 = 0;
    std::vector<bool> frozen;  // size N
    BitString frozen_values;   // size N; only frozen positions are read

    std::size_t N() const noexcept { return frozen.size(); }
    std::size_t information_size() const;
    double rate() const;
    std::vector<std::size_t> information_positions() const;

    /// Places `message` on the information set and frozen_values elsewhere.
    BitString embed(const BitString& message) const;
    BitString extract(const BitString& u) const;

    nlohmann::json to_json() const;
    static PolarConfig from_json(const nlohmann::json& j);

    /// Keeps the `information_bits` positions with the smallest estimated
    /// error as information; ties go to the higher index. Frozen values are zero.
    static PolarConfig from_error_estimates(int n, int n0, const std::vector<double>& bit_error,
                                            std::size_t information_bits);
};

/// Per-position record of one successive-cancellation pass.
struct ScTrace {
    /// P(u_t = 1 | y, u_<t) as seen by the decoder (decided or genie prefix).
    std::vector<double> p_one;
    BitString decisions;
};

/// Turns log-likelihood tables into normalised posteriors under a uniform
/// prior. A table that is zero everywhere becomes uniform.
std::vector<std::vector<double>> block_posteriors(const std::vector<std::vector<double>>& log_tables);

/// Successive cancellation over the outer polar levels on full block
/// posteriors (check nodes are XOR convolutions over {0,1}^N0), then in-order
/// decisions inside each block.
///
/// With `genie_u` set, every decision is replaced by the true bit after its
/// posterior is recorded (genie-aided decoding); frozen bits are otherwise forced.
ScTrace successive_cancellation(const std::vector<std::vector<double>>& posteriors, const PolarConfig& code,
                                const BitString* genie_u = nullptr);

/// Decodes û from the parsed block outputs.
BitString sc_decode(const std::vector<BitString>& y_star_blocks, const PolarConfig& code, const ChannelSpec& spec,
                    const PadModel& pads);

struct CodeConstruction {
    PolarConfig code;
    /// Mean genie-aided error probability of each position.
    std::vector<double> bit_error;
    std::uint64_t trials = 0;
};

/// Monte-Carlo construction: genie-parsed transmissions of uniform u,
/// genie-aided SC, mean soft error per position, freeze the worst until
/// round(target_rate * N) positions remain.
CodeConstruction construct_code(const ChannelSpec& spec, const GuardConfig& cfg, const PadModel& pads,
                                double target_rate, std::uint64_t trials, std::uint64_t seed);

/// Blocks of a genie parse as plain y* strings.
std::vector<BitString> y_star_strings(const std::vector<DzpBlockOutput>& blocks);

}  // namespace idspolar
