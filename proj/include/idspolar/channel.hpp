#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "idspolar/bitstring.hpp"
#include "idspolar/random.hpp"

namespace idspolar {

/// The channel does not favour the transmitted symbol at its output
/// (alpha_{0|0} <= alpha_{1|0} or alpha_{1|1} <= alpha_{0|1}).
class AdvantageViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The window-majority bound is only guaranteed for h >= h0.
class WindowTooShort : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Binary insertion/deletion/substitution channel.
///
/// Per input symbol x the channel emits: nothing (p_delete), x (the
/// remainder), the flipped symbol (p_substitute), or a uniformly random bit
/// followed by x (p_insert, split evenly between "0x" and "1x").
class ChannelSpec {
public:
    /// Throws std::invalid_argument for out-of-range probabilities and
    /// AdvantageViolation when the output does not favour the input.
    ChannelSpec(double p_insert, double p_delete, double p_substitute);

    double p_insert() const noexcept { return p_insert_; }
    double p_delete() const noexcept { return p_delete_; }
    double p_substitute() const noexcept { return p_substitute_; }
    double p_correct() const noexcept { return 1.0 - p_insert_ - p_delete_ - p_substitute_; }

    std::string to_string() const;

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;

private:
    double p_insert_;
    double p_delete_;
    double p_substitute_;
};

/// Distribution of the output string produced by one input symbol.
struct SymbolOutputPmf {
    struct Entry {
        BitString output;
        double probability;
    };
    /// Order: epsilon, x, flipped x, "0x", "1x".
    std::array<Entry, 5> entries;

    double probability_of(const BitString& output) const;
    double total() const;
};

SymbolOutputPmf symbol_output_pmf(const ChannelSpec& spec, Bit x);

/// Appends the output for one input symbol to `out`. Uses one uniform draw.
void emit_symbol(const ChannelSpec& spec, Bit x, RandomSource& rng, BitString& out);

BitString transmit(const ChannelSpec& spec, const BitString& x, RandomSource& rng);

struct ChannelStats {
    double alpha_0_given_0;
    double alpha_1_given_0;
    double alpha_0_given_1;
    double alpha_1_given_1;
    double beta;   // expected output length per input symbol
    double gamma;  // half of the smaller count advantage
};

/// Throws AdvantageViolation when the advantage condition fails and
/// std::domain_error if the expected output length depends on the input.
ChannelStats channel_stats(const ChannelSpec& spec);

struct Lemma1Constants {
    double delta;
    double h0_prime;
    double c0_prime;
    double c0_double_prime;
    double c0;
    double h0;
};

Lemma1Constants lemma1_constants(const ChannelStats& stats);

/// Declares 0 iff at least half of the window is zeros (ties go to 0).
Bit window_majority_test(std::span<const Bit> window);
inline Bit window_majority_test(const BitString& window) { return window_majority_test(window.view()); }

/// e^{-h c0}; throws WindowTooShort for h < h0.
double misclassification_bound(const Lemma1Constants& consts, long long h);

/// Output of the all-x input, generated until it holds at least h+1 symbols,
/// optionally dropping the first output symbol, truncated to h symbols.
BitString sample_window(const ChannelSpec& spec, Bit x, std::size_t h, bool drop_first, RandomSource& rng);

}  // namespace idspolar
