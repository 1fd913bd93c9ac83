#include "idspolar/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace idspolar {

namespace {

constexpr double kEqualityTolerance = 1e-12;

bool valid_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

double expected_count(const SymbolOutputPmf& pmf, Bit symbol) {
    double total = 0.0;
    for (const auto& e : pmf.entries) {
        const std::size_t zeros = e.output.count_zeros();
        const std::size_t count = symbol == 0 ? zeros : e.output.size() - zeros;
        total += e.probability * static_cast<double>(count);
    }
    return total;
}

}  // namespace

ChannelSpec::ChannelSpec(double p_insert, double p_delete, double p_substitute)
    : p_insert_(p_insert), p_delete_(p_delete), p_substitute_(p_substitute) {
    if (!valid_probability(p_insert) || !valid_probability(p_delete) || !valid_probability(p_substitute))
        throw std::invalid_argument("IDS probabilities must lie in [0, 1]: " + to_string());
    if (p_insert + p_delete + p_substitute > 1.0 + kEqualityTolerance)
        throw std::invalid_argument("p_insert + p_delete + p_substitute must not exceed 1: " + to_string());
    channel_stats(*this);
}

std::string ChannelSpec::to_string() const {
    std::ostringstream os;
    os << "(p_insert=" << p_insert_ << ", p_delete=" << p_delete_ << ", p_substitute=" << p_substitute_ << ")";
    return os.str();
}

double SymbolOutputPmf::probability_of(const BitString& output) const {
    double p = 0.0;
    for (const auto& e : entries)
        if (e.output == output) p += e.probability;
    return p;
}

double SymbolOutputPmf::total() const {
    double p = 0.0;
    for (const auto& e : entries) p += e.probability;
    return p;
}

SymbolOutputPmf symbol_output_pmf(const ChannelSpec& spec, Bit x) {
    x = x ? 1 : 0;
    const Bit flipped = x ^ 1U;
    const double half_insert = spec.p_insert() / 2.0;
    return SymbolOutputPmf{{{
        {BitString{}, spec.p_delete()},
        {BitString::repeat(x, 1), spec.p_correct()},
        {BitString::repeat(flipped, 1), spec.p_substitute()},
        {BitString(std::vector<Bit>{0, x}), half_insert},
        {BitString(std::vector<Bit>{1, x}), half_insert},
    }}};
}

void emit_symbol(const ChannelSpec& spec, Bit x, RandomSource& rng, BitString& out) {
    const double u = rng.uniform();
    double edge = spec.p_delete();
    if (u < edge) return;
    edge += spec.p_correct();
    if (u < edge) {
        out.push_back(x);
        return;
    }
    edge += spec.p_substitute();
    if (u < edge) {
        out.push_back(x ^ 1U);
        return;
    }
    edge += spec.p_insert() / 2.0;
    out.push_back(u < edge ? 0 : 1);
    out.push_back(x);
}

BitString transmit(const ChannelSpec& spec, const BitString& x, RandomSource& rng) {
    BitString y;
    for (Bit b : x) emit_symbol(spec, b, rng, y);
    return y;
}

ChannelStats channel_stats(const ChannelSpec& spec) {
    const SymbolOutputPmf zero = symbol_output_pmf(spec, 0);
    const SymbolOutputPmf one = symbol_output_pmf(spec, 1);
    ChannelStats s{};
    s.alpha_0_given_0 = expected_count(zero, 0);
    s.alpha_1_given_0 = expected_count(zero, 1);
    s.alpha_0_given_1 = expected_count(one, 0);
    s.alpha_1_given_1 = expected_count(one, 1);
    s.beta = s.alpha_0_given_0 + s.alpha_1_given_0;
    if (std::abs(s.beta - (s.alpha_0_given_1 + s.alpha_1_given_1)) > kEqualityTolerance)
        throw std::domain_error("expected output length depends on the input symbol");
    if (!(s.alpha_0_given_0 > s.alpha_1_given_0) || !(s.alpha_1_given_1 > s.alpha_0_given_1)) {
        std::ostringstream os;
        os << "channel " << spec.to_string() << " gives the input no advantage at the output: alpha_0|0="
           << s.alpha_0_given_0 << ", alpha_1|0=" << s.alpha_1_given_0 << ", alpha_1|1=" << s.alpha_1_given_1
           << ", alpha_0|1=" << s.alpha_0_given_1;
        throw AdvantageViolation(os.str());
    }
    s.gamma = std::min(s.alpha_0_given_0 - s.alpha_1_given_0, s.alpha_1_given_1 - s.alpha_0_given_1) / 2.0;
    return s;
}

Lemma1Constants lemma1_constants(const ChannelStats& s) {
    Lemma1Constants c{};
    c.delta = std::min({s.gamma / (2.0 * s.alpha_0_given_0), s.gamma / (2.0 * s.alpha_1_given_1), 0.5});
    c.h0_prime = 2.0 * (s.beta + 1.0) / c.delta - 1.0;
    const double keep = 1.0 - c.delta;
    const double stretch = s.beta / (1.0 - c.delta / 2.0) - s.beta;
    c.c0_prime = (keep / s.beta) * stretch * stretch / 2.0;
    const double margin = (s.gamma / 2.0) / keep;
    c.c0_double_prime = (keep / s.beta) * margin * margin / 2.0;
    c.c0 = 0.5 * std::min(c.c0_prime, c.c0_double_prime);
    c.h0 = std::max(c.h0_prime, std::log(4.0) / c.c0);
    return c;
}

Bit window_majority_test(std::span<const Bit> window) {
    return 2 * count_zeros(window) >= window.size() ? 0 : 1;
}

double misclassification_bound(const Lemma1Constants& consts, long long h) {
    if (static_cast<double>(h) < consts.h0) {
        std::ostringstream os;
        os << "window length " << h << " is below h0=" << consts.h0;
        throw WindowTooShort(os.str());
    }
    return std::exp(-static_cast<double>(h) * consts.c0);
}

BitString sample_window(const ChannelSpec& spec, Bit x, std::size_t h, bool drop_first, RandomSource& rng) {
    BitString y;
    while (y.size() < h + 1) emit_symbol(spec, x, rng, y);
    const std::size_t first = drop_first ? 1 : 0;
    return y.slice(first, first + h);
}

}  // namespace idspolar
