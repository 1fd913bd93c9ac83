#include "idspolar/polar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace idspolar {

BitString polar_encode(const BitString& u) {
    const std::size_t n = u.size();
    if (n == 0 || !std::has_single_bit(n)) throw BadLength("polar_encode needs a power-of-two length");
    std::vector<Bit> x(u.begin(), u.end());
    for (std::size_t span = 1; span < n; span <<= 1)
        for (std::size_t j = 0; j < n; ++j)
            if ((j & span) == 0) x[j] ^= x[j + span];
    return BitString(std::move(x));
}

std::uint64_t polar_encode_index(std::uint64_t u, int bits) {
    const auto width = static_cast<std::uint64_t>(bits);
    for (std::uint64_t span = 1; span < width; span <<= 1)
        for (std::uint64_t j = 0; j < width; ++j)
            if ((j & span) == 0) u ^= ((u >> (j + span)) & 1U) << j;
    return u;
}

std::size_t PolarConfig::information_size() const {
    return static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), false));
}

double PolarConfig::rate() const {
    return N() == 0 ? 0.0 : static_cast<double>(information_size()) / static_cast<double>(N());
}

std::vector<std::size_t> PolarConfig::information_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < N(); ++i)
        if (!frozen[i]) out.push_back(i);
    return out;
}

BitString PolarConfig::embed(const BitString& message) const {
    if (message.size() != information_size()) throw BadLength("message length does not match the information set");
    std::vector<Bit> u(frozen_values.begin(), frozen_values.end());
    std::size_t k = 0;
    for (std::size_t i = 0; i < N(); ++i)
        if (!frozen[i]) u[i] = message[k++];
    return BitString(std::move(u));
}

BitString PolarConfig::extract(const BitString& u) const {
    BitString out;
    for (std::size_t i = 0; i < N(); ++i)
        if (!frozen[i]) out.push_back(u[i]);
    return out;
}

nlohmann::json PolarConfig::to_json() const {
    std::vector<std::size_t> frozen_set;
    for (std::size_t i = 0; i < N(); ++i)
        if (frozen[i]) frozen_set.push_back(i);
    return {{"n", n}, {"n0", n0}, {"rate", rate()}, {"frozen_set", frozen_set},
            {"frozen_values", frozen_values.to_string()}};
}

PolarConfig PolarConfig::from_json(const nlohmann::json& j) {
    PolarConfig c;
    c.n = j.at("n").get<int>();
    c.n0 = j.at("n0").get<int>();
    c.frozen.assign(std::size_t{1} << c.n, false);
    for (std::size_t i : j.at("frozen_set").get<std::vector<std::size_t>>()) c.frozen.at(i) = true;
    c.frozen_values = BitString::parse(j.at("frozen_values").get<std::string>());
    if (c.frozen_values.size() != c.N()) throw BadLength("frozen_values length does not match N");
    return c;
}

PolarConfig PolarConfig::from_error_estimates(int n, int n0, const std::vector<double>& bit_error,
                                              std::size_t information_bits) {
    const std::size_t N = std::size_t{1} << n;
    if (bit_error.size() != N) throw BadLength("one error estimate per position is required");
    if (information_bits > N) throw std::invalid_argument("more information bits than positions");
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (bit_error[a] != bit_error[b]) return bit_error[a] < bit_error[b];
        return a > b;
    });
    PolarConfig c;
    c.n = n;
    c.n0 = n0;
    c.frozen.assign(N, true);
    c.frozen_values = BitString::zeros(N);
    for (std::size_t k = 0; k < information_bits; ++k) c.frozen[order[k]] = false;
    return c;
}

std::vector<std::vector<double>> block_posteriors(const std::vector<std::vector<double>>& log_tables) {
    std::vector<std::vector<double>> out;
    out.reserve(log_tables.size());
    for (const auto& table : log_tables) {
        std::vector<double> p(table.size(), 0.0);
        double peak = kLogZero;
        for (double v : table) peak = std::max(peak, v);
        if (is_log_zero(peak)) {
            std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
        } else {
            double total = 0.0;
            for (std::size_t i = 0; i < table.size(); ++i) {
                p[i] = is_log_zero(table[i]) ? 0.0 : std::exp(table[i] - peak);
                total += p[i];
            }
            for (double& v : p) v /= total;
        }
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

using Posterior = std::vector<double>;

void normalise(Posterior& p) {
    double total = 0.0;
    for (double& v : p) {
        v = std::max(v, 0.0);
        total += v;
    }
    if (total > 0.0) {
        for (double& v : p) v /= total;
    } else {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    }
}

void walsh_hadamard(Posterior& v) {
    for (std::size_t span = 1; span < v.size(); span <<= 1)
        for (std::size_t j = 0; j < v.size(); ++j)
            if ((j & span) == 0) {
                const double a = v[j], b = v[j + span];
                v[j] = a + b;
                v[j + span] = a - b;
            }
}

// P(a XOR b = s) for independent a ~ lhs, b ~ rhs.
Posterior xor_convolve(Posterior lhs, Posterior rhs) {
    walsh_hadamard(lhs);
    walsh_hadamard(rhs);
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] *= rhs[i];
    walsh_hadamard(lhs);
    normalise(lhs);
    return lhs;
}

struct Decoder {
    const PolarConfig& code;
    const BitString* genie_u;
    int block_bits;
    std::vector<std::uint64_t> encode_table;  // block-level polar transform of every pattern
    ScTrace trace;

    std::uint64_t leaf(const Posterior& p_w, std::size_t chunk) {
        const std::size_t size = p_w.size();
        const std::size_t base = chunk * static_cast<std::size_t>(block_bits);
        std::uint64_t prefix = 0;
        for (int t = 0; t < block_bits; ++t) {
            const std::uint64_t mask = (std::uint64_t{1} << t) - 1;
            double mass[2] = {0.0, 0.0};
            for (std::uint64_t u = 0; u < size; ++u)
                if ((u & mask) == prefix) mass[(u >> t) & 1U] += p_w[encode_table[u]];
            const double total = mass[0] + mass[1];
            const double p_one = total > 0.0 ? mass[1] / total : 0.5;
            const std::size_t pos = base + static_cast<std::size_t>(t);
            Bit decision;
            if (genie_u)
                decision = (*genie_u)[pos];
            else if (code.frozen[pos])
                decision = code.frozen_values[pos];
            else
                decision = p_one > 0.5 ? 1 : 0;
            trace.p_one[pos] = p_one;
            trace.decisions.push_back(decision);
            prefix |= std::uint64_t{decision} << t;
        }
        return encode_table[prefix];
    }

    std::vector<std::uint64_t> run(const std::vector<Posterior>& channel, std::size_t chunk) {
        if (channel.size() == 1) return {leaf(channel[0], chunk)};
        const std::size_t half = channel.size() / 2;
        std::vector<Posterior> upper(half);
        for (std::size_t j = 0; j < half; ++j) upper[j] = xor_convolve(channel[j], channel[j + half]);
        const std::vector<std::uint64_t> first = run(upper, chunk);

        std::vector<Posterior> lower(half);
        for (std::size_t j = 0; j < half; ++j) {
            const Posterior& a = channel[j];
            const Posterior& b = channel[j + half];
            Posterior p(a.size());
            for (std::uint64_t v = 0; v < p.size(); ++v) p[v] = a[v ^ first[j]] * b[v];
            normalise(p);
            lower[j] = std::move(p);
        }
        const std::vector<std::uint64_t> second = run(lower, chunk + half);

        std::vector<std::uint64_t> out(channel.size());
        for (std::size_t j = 0; j < half; ++j) {
            out[j] = first[j] ^ second[j];
            out[j + half] = second[j];
        }
        return out;
    }
};

}  // namespace

ScTrace successive_cancellation(const std::vector<std::vector<double>>& posteriors, const PolarConfig& code,
                                const BitString* genie_u) {
    const std::size_t phi = std::size_t{1} << (code.n - code.n0);
    const std::size_t block_bits = std::size_t{1} << code.n0;
    const std::size_t patterns = std::size_t{1} << block_bits;
    if (block_bits > static_cast<std::size_t>(kMaxExhaustiveBlockBits)) throw BlockTooLarge("block too large for SC leaves");
    if (posteriors.size() != phi) throw BadLength("one posterior per block is required");
    for (const auto& p : posteriors)
        if (p.size() != patterns) throw BadLength("block posterior has the wrong size");
    if (genie_u && genie_u->size() != code.N()) throw BadLength("genie vector has the wrong length");

    Decoder d{code, genie_u, static_cast<int>(block_bits), std::vector<std::uint64_t>(patterns), {}};
    for (std::uint64_t u = 0; u < patterns; ++u) d.encode_table[u] = polar_encode_index(u, static_cast<int>(block_bits));
    d.trace.p_one.assign(code.N(), 0.5);
    d.run(posteriors, 0);
    return std::move(d.trace);
}

std::vector<BitString> y_star_strings(const std::vector<DzpBlockOutput>& blocks) {
    std::vector<BitString> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(b.y_star());
    return out;
}

BitString sc_decode(const std::vector<BitString>& y_star_blocks, const PolarConfig& code, const ChannelSpec& spec,
                    const PadModel& pads) {
    std::vector<std::vector<double>> tables;
    tables.reserve(y_star_blocks.size());
    for (const auto& y : y_star_blocks) tables.push_back(block_likelihood_table(spec, pads, y, 1 << code.n0));
    return successive_cancellation(block_posteriors(tables), code).decisions;
}

CodeConstruction construct_code(const ChannelSpec& spec, const GuardConfig& cfg, const PadModel& pads,
                                double target_rate, std::uint64_t trials, std::uint64_t seed) {
    if (!(target_rate >= 0.0 && target_rate <= 1.0)) throw std::invalid_argument("target rate must lie in [0, 1]");
    const std::size_t N = cfg.N();
    CodeConstruction out;
    out.trials = trials;
    out.bit_error.assign(N, 0.0);

    PolarConfig scratch;
    scratch.n = cfg.n();
    scratch.n0 = cfg.n0();
    scratch.frozen.assign(N, false);
    scratch.frozen_values = BitString::zeros(N);

    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomSource rng = RandomSource::for_trial(seed, t);
        std::vector<Bit> bits(N);
        for (auto& b : bits) b = rng.bit();
        const BitString u(std::move(bits));
        const GenieParse parse = genie_parse(spec, polar_encode(u), cfg, rng);
        std::vector<std::vector<double>> tables;
        for (const auto& blk : parse.blocks)
            tables.push_back(block_likelihood_table(spec, pads, blk.y_star(), static_cast<int>(cfg.N0())));
        const ScTrace trace = successive_cancellation(block_posteriors(tables), scratch, &u);
        for (std::size_t i = 0; i < N; ++i)
            out.bit_error[i] += std::min(trace.p_one[i], 1.0 - trace.p_one[i]);
    }
    if (trials > 0)
        for (double& e : out.bit_error) e /= static_cast<double>(trials);

    const auto info = static_cast<std::size_t>(std::llround(target_rate * static_cast<double>(N)));
    out.code = PolarConfig::from_error_estimates(cfg.n(), cfg.n0(), out.bit_error, info);
    return out;
}

}  // namespace idspolar
