#include "idspolar/information.hpp"

#include <cmath>

namespace idspolar {

namespace {

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

struct Accumulator {
    StringPmf marginal;
    double conditional_entropy = 0.0;

    void add(const StringPmf& given_x, double weight) {
        for (const auto& [out, p] : given_x) {
            marginal[out] += weight * p;
            conditional_entropy += weight * entropy_term(p);
        }
    }
    double information() const {
        double h = 0.0;
        for (const auto& [out, p] : marginal) h += entropy_term(p);
        return h - conditional_entropy;
    }
};

double log2_mean_exp(const std::vector<double>& logs) {
    double peak = kLogZero;
    for (double v : logs) peak = std::max(peak, v);
    double sum = 0.0;
    for (double v : logs)
        if (!is_log_zero(v)) sum += std::exp(v - peak);
    return (peak + std::log(sum / static_cast<double>(logs.size()))) / std::log(2.0);
}

struct Moments {
    double sum = 0, sum_sq = 0;
    std::uint64_t n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double half_width() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return 1.959963984540054 * std::sqrt(var / static_cast<double>(n));
    }
};

}  // namespace

ExactInformation exact_information(const ChannelSpec& spec, const PadModel& pads, int block_bits) {
    if (block_bits < 1 || block_bits > kMaxExactMiBits)
        throw ExactModeUnavailable("exact mutual information needs 1 to 4 block bits");
    if (pads.form() != PadModel::Form::Table)
        throw ExactModeUnavailable("exact mutual information needs tabulated pad laws");

    const std::uint64_t count = std::uint64_t{1} << block_bits;
    const double weight = 1.0 / static_cast<double>(count);
    Accumulator plain, padded;
    for (std::uint64_t index = 0; index < count; ++index) {
        const BitString x = BitString::from_index(index, static_cast<std::size_t>(block_bits));
        const StringPmf y_law = enumerate_outputs(spec, x);
        plain.add(y_law, weight);

        StringPmf ystar_law;
        for (const auto& [l, pl] : pads.left_table())
            for (const auto& [y, py] : y_law)
                for (const auto& [r, pr] : pads.right_table()) ystar_law[l + y + r] += pl * py * pr;
        padded.add(ystar_law, weight);
    }
    ExactInformation out;
    out.block_bits = block_bits;
    out.i_xy = plain.information();
    out.i_xystar = padded.information();
    out.y_support = plain.marginal.size();
    out.ystar_support = padded.marginal.size();
    return out;
}

MonteCarloInformation monte_carlo_information(const ChannelSpec& spec, const PadModel& pads, const PadContext& ctx,
                                              int block_bits, std::uint64_t trials, std::uint64_t seed) {
    if (block_bits < 1 || block_bits > kMaxExhaustiveBlockBits)
        throw BlockTooLarge("Monte-Carlo mutual information scores every block input");
    const std::uint64_t count = std::uint64_t{1} << block_bits;
    const auto bits = static_cast<std::size_t>(block_bits);
    const PadModel no_pads = PadModel::empty_pads();

    Moments plain, padded, gap;
    std::uint64_t unsupported = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomSource rng = RandomSource::for_trial(seed, t);
        const std::uint64_t index = rng.uniform_below(count);
        const BitString x = BitString::from_index(index, bits);
        const DzpBlockOutput out = sample_dzp(spec, x, ctx, rng);

        const std::vector<double> y_table = block_likelihood_table(spec, no_pads, out.middle, block_bits);
        const std::vector<double> ystar_table = block_likelihood_table(spec, pads, out.y_star(), block_bits);
        const double a = y_table[index] / std::log(2.0) - log2_mean_exp(y_table);
        // A pad outside the model's support makes the term -inf; such trials are counted and skipped.
        if (is_log_zero(ystar_table[index])) {
            ++unsupported;
            continue;
        }
        const double b = ystar_table[index] / std::log(2.0) - log2_mean_exp(ystar_table);
        plain.add(a);
        padded.add(b);
        gap.add(a - b);
    }
    MonteCarloInformation r;
    r.block_bits = block_bits;
    r.trials = trials;
    r.i_xy = plain.mean();
    r.i_xy_half_width = plain.half_width();
    r.i_xystar = padded.mean();
    r.i_xystar_half_width = padded.half_width();
    r.gap = gap.mean();
    r.gap_half_width = gap.half_width();
    r.unsupported = unsupported;
    return r;
}

}  // namespace idspolar
