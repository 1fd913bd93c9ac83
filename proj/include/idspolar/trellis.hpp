#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "idspolar/channel.hpp"
#include "idspolar/genie.hpp"

namespace idspolar {

/// log(0). Kept finite so that lattice code never does arithmetic on -inf.
inline constexpr double kLogZero = std::numeric_limits<double>::lowest();
inline bool is_log_zero(double v) noexcept { return v <= kLogZero; }

using StringPmf = std::unordered_map<BitString, double, BitStringHash>;

/// Exact output distribution of `x`. With `reversed_symbols` each per-symbol
/// output is written back to front (the law of the reversed output string).
StringPmf enumerate_outputs(const ChannelSpec& spec, const BitString& x, bool reversed_symbols = false);

/// log P(y | x) for the IDS channel via the alignment lattice.
double ids_joint_prob(const ChannelSpec& spec, const BitString& x, const BitString& y);

class BlockTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ExactModeUnavailable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Laws of the left and right dirty-zero pads.
///
/// Table form stores a pmf over pad strings. Factored form stores a length
/// pmf per side and treats pad symbols as i.i.d. with the pooled zero
/// fraction; it is an approximation used when the exact support is too big.
class PadModel {
public:
    enum class Form { Table, Factored };

    struct Provenance {
        std::string method;  // "exact", "empirical", "factored" or "degenerate"
        double p_insert = 0, p_delete = 0, p_substitute = 0;
        PadContext context{0, 0, 1};
        std::uint64_t trials = 0;
        std::uint64_t seed = 0;
    };

    static PadModel from_tables(StringPmf left, StringPmf right, Provenance provenance);
    static PadModel factored(std::vector<double> left_lengths, std::vector<double> right_lengths,
                             double zero_fraction, Provenance provenance);
    /// Both pads empty with probability one.
    static PadModel empty_pads();

    Form form() const noexcept { return form_; }
    const Provenance& provenance() const noexcept { return provenance_; }

    double left_probability(std::span<const Bit> pad) const;
    double right_probability(std::span<const Bit> pad) const;
    std::size_t max_left_length() const noexcept { return max_left_; }
    std::size_t max_right_length() const noexcept { return max_right_; }

    /// Table form only.
    const StringPmf& left_table() const;
    const StringPmf& right_table() const;

    nlohmann::json to_json() const;
    static PadModel from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static PadModel load(const std::filesystem::path& path);

private:
    double probability(const StringPmf& table, const std::vector<double>& lengths, std::span<const Bit> pad) const;

    Form form_ = Form::Table;
    Provenance provenance_;
    StringPmf left_;
    StringPmf right_;
    std::vector<double> left_lengths_;
    std::vector<double> right_lengths_;
    double zero_fraction_ = 1.0;
    std::size_t max_left_ = 0;
    std::size_t max_right_ = 0;
};

/// Exact pad pmfs by summing over every channel realization of the guard
/// context and every dither. Throws ExactModeUnavailable for zero runs longer than 6.
PadModel exact_pad_model(const ChannelSpec& spec, const PadContext& ctx);

enum class PadEstimate { Auto, Table, Factored };

/// Pad law from `trials` draws of the padding procedure. Auto picks the table
/// form for zero runs of at most 6 symbols and the factored form otherwise.
PadModel estimate_pad_model(const ChannelSpec& spec, const PadContext& ctx, std::uint64_t trials, std::uint64_t seed,
                            PadEstimate form = PadEstimate::Auto);

double total_variation(const StringPmf& a, const StringPmf& b);

/// log P(y* | x) under the dirty-zero-padded channel: the lattice starts from
/// the left-pad weight of every prefix of y* and ends on the right-pad weight
/// of every suffix.
double dzp_joint_prob(const ChannelSpec& spec, const PadModel& pads, const BitString& x, const BitString& y_star);

inline constexpr int kMaxExhaustiveBlockBits = 12;

/// log P(y* | x) for every x in {0,1}^block_bits, indexed by x's bit pattern
/// (bit t of the index is x_t). Throws BlockTooLarge above 12 bits.
std::vector<double> block_likelihood_table(const ChannelSpec& spec, const PadModel& pads, const BitString& y_star,
                                           int block_bits);

}  // namespace idspolar
