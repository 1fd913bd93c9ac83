#include "idspolar/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace idspolar {

StringPmf enumerate_outputs(const ChannelSpec& spec, const BitString& x, bool reversed_symbols) {
    StringPmf current{{BitString{}, 1.0}};
    for (Bit b : x) {
        const SymbolOutputPmf pmf = symbol_output_pmf(spec, b);
        StringPmf next;
        for (const auto& [prefix, p] : current)
            for (const auto& e : pmf.entries) {
                if (e.probability == 0.0) continue;
                next[prefix + (reversed_symbols ? e.output.reversed() : e.output)] += p * e.probability;
            }
        current = std::move(next);
    }
    return current;
}

namespace {

struct Weights {
    double del, keep, flip, insert_half;

    explicit Weights(const ChannelSpec& spec)
        : del(spec.p_delete()), keep(spec.p_correct()), flip(spec.p_substitute()), insert_half(spec.p_insert() / 2) {}
};

// One input symbol of the lattice: from row (i, .) to row (i+1, .).
void step(const Weights& w, Bit x, std::span<const Bit> y, const std::vector<double>& from, std::vector<double>& to) {
    const std::size_t m = y.size();
    std::fill(to.begin(), to.end(), 0.0);
    for (std::size_t j = 0; j <= m; ++j) {
        const double v = from[j];
        if (v == 0.0) continue;
        to[j] += v * w.del;
        if (j + 1 <= m) to[j + 1] += v * (y[j] == x ? w.keep : w.flip);
        if (j + 2 <= m && y[j + 1] == x) to[j + 2] += v * w.insert_half;
    }
}

// Rescales `row` to max 1 and returns log of the factor, or false if the row is all zero.
bool rescale(std::vector<double>& row, double& log_scale) {
    const double peak = *std::max_element(row.begin(), row.end());
    if (peak == 0.0) return false;
    for (double& v : row) v /= peak;
    log_scale += std::log(peak);
    return true;
}

double finish(const std::vector<double>& row, const std::vector<double>& tail, double log_scale) {
    double total = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) total += row[j] * tail[j];
    return total > 0.0 ? std::log(total) + log_scale : kLogZero;
}

struct PadWeights {
    std::vector<double> head;  // head[j] = P_left(y*[0, j))
    std::vector<double> tail;  // tail[j] = P_right(y*[j, end))
};

PadWeights pad_weights(const PadModel& pads, const BitString& y_star) {
    const std::size_t m = y_star.size();
    PadWeights w{std::vector<double>(m + 1, 0.0), std::vector<double>(m + 1, 0.0)};
    for (std::size_t j = 0; j <= std::min(m, pads.max_left_length()); ++j)
        w.head[j] = pads.left_probability(y_star.view().first(j));
    for (std::size_t len = 0; len <= std::min(m, pads.max_right_length()); ++len)
        w.tail[m - len] = pads.right_probability(y_star.view().last(len));
    return w;
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : kLogZero; }

void log_accumulate(double& acc, double term) {
    if (is_log_zero(term)) return;
    if (is_log_zero(acc)) {
        acc = term;
    } else if (acc >= term) {
        acc += std::log1p(std::exp(term - acc));
    } else {
        acc = term + std::log1p(std::exp(acc - term));
    }
}

// Log-domain lattice for inputs of any length. Rows only span the columns
// reachable from the start weights, since each symbol emits at most two.
double run_log_lattice(const ChannelSpec& spec, const BitString& x, const BitString& y,
                       const std::vector<double>& head, const std::vector<double>& tail) {
    const std::size_t m = y.size();
    const double ldel = safe_log(spec.p_delete()), lkeep = safe_log(spec.p_correct()),
                 lflip = safe_log(spec.p_substitute()), lins = safe_log(spec.p_insert() / 2);
    std::vector<double> row(m + 1, kLogZero), next(m + 1, kLogZero);
    std::size_t reach = 0;
    for (std::size_t j = 0; j <= m; ++j) {
        row[j] = safe_log(head[j]);
        if (!is_log_zero(row[j])) reach = j;
    }
    auto add = [](double a, double b) { return is_log_zero(a) || is_log_zero(b) ? kLogZero : a + b; };
    for (Bit b : x) {
        const std::size_t next_reach = std::min(m, reach + 2);
        std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(next_reach + 1), kLogZero);
        for (std::size_t j = 0; j <= reach; ++j) {
            const double v = row[j];
            if (is_log_zero(v)) continue;
            log_accumulate(next[j], add(v, ldel));
            if (j + 1 <= m) log_accumulate(next[j + 1], add(v, y[j] == b ? lkeep : lflip));
            if (j + 2 <= m && y[j + 1] == b) log_accumulate(next[j + 2], add(v, lins));
        }
        std::swap(row, next);
        reach = next_reach;
    }
    double total = kLogZero;
    for (std::size_t j = 0; j <= reach; ++j) log_accumulate(total, add(row[j], safe_log(tail[j])));
    return total;
}

}  // namespace

double ids_joint_prob(const ChannelSpec& spec, const BitString& x, const BitString& y) {
    if (y.size() > 2 * x.size()) return kLogZero;
    std::vector<double> head(y.size() + 1, 0.0), tail(y.size() + 1, 0.0);
    head[0] = 1.0;
    tail[y.size()] = 1.0;
    return run_log_lattice(spec, x, y, head, tail);
}

double dzp_joint_prob(const ChannelSpec& spec, const PadModel& pads, const BitString& x, const BitString& y_star) {
    const PadWeights w = pad_weights(pads, y_star);
    return run_log_lattice(spec, x, y_star, w.head, w.tail);
}

std::vector<double> block_likelihood_table(const ChannelSpec& spec, const PadModel& pads, const BitString& y_star,
                                           int block_bits) {
    if (block_bits < 0 || block_bits > kMaxExhaustiveBlockBits)
        throw BlockTooLarge("exhaustive block scoring supports at most 12 bits per block");
    const std::size_t candidates = std::size_t{1} << block_bits;
    std::vector<double> table(candidates, kLogZero);

    PadWeights pw = pad_weights(pads, y_star);
    const Weights w(spec);
    double start_scale = 0.0;
    if (!rescale(pw.head, start_scale)) return table;

    // Rows are rescaled linear values: at most 12 steps deep, so no cell on a
    // live path drops below the row maximum by more than the double range.
    // Depth-first over candidate prefixes so each lattice row is computed once per prefix.
    const auto depth = static_cast<std::size_t>(block_bits);
    std::vector<std::vector<double>> rows(depth + 1, std::vector<double>(y_star.size() + 1));
    std::vector<double> scales(depth + 1, 0.0);
    rows[0] = pw.head;
    scales[0] = start_scale;

    auto visit = [&](auto&& self, std::size_t d, std::uint64_t index) -> void {
        if (d == depth) {
            table[index] = finish(rows[d], pw.tail, scales[d]);
            return;
        }
        for (Bit b = 0; b < 2; ++b) {
            step(w, b, y_star.view(), rows[d], rows[d + 1]);
            scales[d + 1] = scales[d];
            if (!rescale(rows[d + 1], scales[d + 1])) continue;
            self(self, d + 1, index | (std::uint64_t{b} << d));
        }
    };
    visit(visit, 0, 0);
    return table;
}

// ---------------------------------------------------------------------------
// Pad models

PadModel PadModel::from_tables(StringPmf left, StringPmf right, Provenance provenance) {
    PadModel m;
    m.form_ = Form::Table;
    m.provenance_ = std::move(provenance);
    m.left_ = std::move(left);
    m.right_ = std::move(right);
    for (const auto& [s, p] : m.left_) m.max_left_ = std::max(m.max_left_, s.size());
    for (const auto& [s, p] : m.right_) m.max_right_ = std::max(m.max_right_, s.size());
    return m;
}

PadModel PadModel::factored(std::vector<double> left_lengths, std::vector<double> right_lengths, double zero_fraction,
                            Provenance provenance) {
    if (left_lengths.empty() || right_lengths.empty())
        throw std::invalid_argument("factored pad model needs non-empty length pmfs");
    if (!(zero_fraction >= 0.0 && zero_fraction <= 1.0)) throw std::invalid_argument("zero fraction out of range");
    PadModel m;
    m.form_ = Form::Factored;
    m.provenance_ = std::move(provenance);
    m.left_lengths_ = std::move(left_lengths);
    m.right_lengths_ = std::move(right_lengths);
    m.zero_fraction_ = zero_fraction;
    m.max_left_ = m.left_lengths_.size() - 1;
    m.max_right_ = m.right_lengths_.size() - 1;
    return m;
}

PadModel PadModel::empty_pads() {
    Provenance p;
    p.method = "degenerate";
    return from_tables({{BitString{}, 1.0}}, {{BitString{}, 1.0}}, p);
}

double PadModel::probability(const StringPmf& table, const std::vector<double>& lengths,
                             std::span<const Bit> pad) const {
    if (form_ == Form::Table) {
        const auto it = table.find(BitString(pad));
        return it == table.end() ? 0.0 : it->second;
    }
    if (pad.size() >= lengths.size()) return 0.0;
    const std::size_t zeros = count_zeros(pad);
    return lengths[pad.size()] * std::pow(zero_fraction_, static_cast<double>(zeros)) *
           std::pow(1.0 - zero_fraction_, static_cast<double>(pad.size() - zeros));
}

double PadModel::left_probability(std::span<const Bit> pad) const { return probability(left_, left_lengths_, pad); }

double PadModel::right_probability(std::span<const Bit> pad) const {
    return probability(right_, right_lengths_, pad);
}

const StringPmf& PadModel::left_table() const {
    if (form_ != Form::Table) throw std::logic_error("pad model is not in table form");
    return left_;
}

const StringPmf& PadModel::right_table() const {
    if (form_ != Form::Table) throw std::logic_error("pad model is not in table form");
    return right_;
}

namespace {

constexpr int kPadModelVersion = 1;

nlohmann::json table_json(const StringPmf& table) {
    // Sorted so that serialisation is byte-stable.
    std::map<std::string, double> sorted;
    for (const auto& [s, p] : table) sorted[s.to_string()] = p;
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [s, p] : sorted) out.push_back({s, p});
    return out;
}

StringPmf table_from_json(const nlohmann::json& j) {
    StringPmf t;
    for (const auto& e : j) t[BitString::parse(e.at(0).get<std::string>())] = e.at(1).get<double>();
    return t;
}

}  // namespace

nlohmann::json PadModel::to_json() const {
    const auto& c = provenance_.context;
    nlohmann::json out{{"version", kPadModelVersion},
                       {"form", form_ == Form::Table ? "table" : "factored"},
                       {"key",
                        {{"method", provenance_.method},
                         {"p_insert", provenance_.p_insert},
                         {"p_delete", provenance_.p_delete},
                         {"p_substitute", provenance_.p_substitute},
                         {"zero_len", c.zero_len},
                         {"ones_len", c.ones_len},
                         {"h", c.h},
                         {"trials", provenance_.trials},
                         {"seed", provenance_.seed}}}};
    if (form_ == Form::Table) {
        out["left"] = table_json(left_);
        out["right"] = table_json(right_);
    } else {
        out["left_lengths"] = left_lengths_;
        out["right_lengths"] = right_lengths_;
        out["zero_fraction"] = zero_fraction_;
    }
    return out;
}

PadModel PadModel::from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != kPadModelVersion) throw std::runtime_error("unsupported pad model version");
    const auto& k = j.at("key");
    Provenance p;
    p.method = k.at("method").get<std::string>();
    p.p_insert = k.at("p_insert").get<double>();
    p.p_delete = k.at("p_delete").get<double>();
    p.p_substitute = k.at("p_substitute").get<double>();
    p.context = PadContext{k.at("zero_len").get<std::size_t>(), k.at("ones_len").get<std::size_t>(),
                           k.at("h").get<int>()};
    p.trials = k.at("trials").get<std::uint64_t>();
    p.seed = k.at("seed").get<std::uint64_t>();
    if (j.at("form").get<std::string>() == "table")
        return from_tables(table_from_json(j.at("left")), table_from_json(j.at("right")), p);
    return factored(j.at("left_lengths").get<std::vector<double>>(), j.at("right_lengths").get<std::vector<double>>(),
                    j.at("zero_fraction").get<double>(), p);
}

void PadModel::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write pad model to " + path.string());
    os << to_json().dump(1) << '\n';
}

PadModel PadModel::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read pad model from " + path.string());
    return from_json(nlohmann::json::parse(is));
}

namespace {

PadModel::Provenance provenance_for(const ChannelSpec& spec, const PadContext& ctx, std::string method) {
    PadModel::Provenance p;
    p.method = std::move(method);
    p.p_insert = spec.p_insert();
    p.p_delete = spec.p_delete();
    p.p_substitute = spec.p_substitute();
    p.context = ctx;
    return p;
}

// Law of the ones run in scan order, reduced to what the padding procedure
// reads: its last h-1 symbols once it is at least h long (after extension).
StringPmf ones_tail_law(const ChannelSpec& spec, std::size_t ones_len, std::size_t h, bool mirrored) {
    const std::size_t keep = h - 1;
    // Full string while shorter than h, otherwise only its last h-1 symbols.
    struct State {
        BitString bits;
        bool long_run;
        bool operator==(const State&) const = default;
    };
    struct StateHash {
        std::size_t operator()(const State& s) const noexcept { return BitStringHash{}(s.bits) * 2 + s.long_run; }
    };
    std::unordered_map<State, double, StateHash> current{{State{BitString{}, h == 0}, 1.0}};
    const SymbolOutputPmf pmf = symbol_output_pmf(spec, 1);
    for (std::size_t k = 0; k < ones_len; ++k) {
        std::unordered_map<State, double, StateHash> next;
        for (const auto& [state, p] : current)
            for (const auto& e : pmf.entries) {
                if (e.probability == 0.0) continue;
                BitString grown = state.bits + (mirrored ? e.output.reversed() : e.output);
                const bool long_run = state.long_run || grown.size() >= h;
                if (long_run && grown.size() > keep) grown = grown.suffix_from(grown.size() - keep);
                next[State{std::move(grown), long_run}] += p * e.probability;
            }
        current = std::move(next);
    }

    // Short runs get draws prepended in scan order. Empty draws change nothing,
    // so draws are taken conditioned on being non-empty.
    const double nonempty = 1.0 - spec.p_delete();
    StringPmf tails;
    auto extend = [&](auto&& self, const BitString& run, double p) -> void {
        if (run.size() >= h) {
            tails[run.suffix_from(run.size() - keep)] += p;
            return;
        }
        for (const auto& e : pmf.entries) {
            if (e.probability == 0.0 || e.output.empty()) continue;
            self(self, (mirrored ? e.output.reversed() : e.output) + run, p * e.probability / nonempty);
        }
    };
    for (const auto& [state, p] : current) {
        if (state.long_run)
            tails[state.bits] += p;
        else
            extend(extend, state.bits, p);
    }
    return tails;
}

StringPmf exact_pad_table(const ChannelSpec& spec, const PadContext& ctx, bool mirrored) {
    const auto h = static_cast<std::size_t>(ctx.h);
    const StringPmf tails = ones_tail_law(spec, ctx.ones_len, h, mirrored);
    const StringPmf zeros = enumerate_outputs(spec, BitString::zeros(ctx.zero_len), mirrored);
    RandomSource unused(0);
    StringPmf table;
    for (const auto& [tail, pt] : tails) {
        // One filler symbol makes the run exactly h long; the window never reaches it since rho >= 1.
        const BitString run = BitString::ones(1) + tail;
        for (const auto& [z, pz] : zeros)
            for (int rho = 1; rho <= ctx.h; ++rho) {
                const PadOutcome o = genie_pad_left(run, z, ctx.h, spec, unused, rho);
                table[mirrored ? o.pad.reversed() : o.pad] += pt * pz / ctx.h;
            }
    }
    return table;
}

}  // namespace

PadModel exact_pad_model(const ChannelSpec& spec, const PadContext& ctx) {
    if (ctx.zero_len > 6)
        throw ExactModeUnavailable("exact pad enumeration supports zero runs of at most 6 symbols");
    if (ctx.h < 1) throw std::invalid_argument("window length must be positive");
    return PadModel::from_tables(exact_pad_table(spec, ctx, false), exact_pad_table(spec, ctx, true),
                                 provenance_for(spec, ctx, "exact"));
}

PadModel estimate_pad_model(const ChannelSpec& spec, const PadContext& ctx, std::uint64_t trials, std::uint64_t seed,
                            PadEstimate form) {
    if (trials == 0) throw std::invalid_argument("pad model estimation needs at least one trial");
    if (form == PadEstimate::Auto) form = ctx.zero_len <= 6 ? PadEstimate::Table : PadEstimate::Factored;

    StringPmf left, right;
    // A pad is a suffix of the zero run's output, which is at most twice as long.
    std::vector<double> left_len(2 * ctx.zero_len + 1, 0.0), right_len(2 * ctx.zero_len + 1, 0.0);
    double zeros = 0, symbols = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomSource rng = RandomSource::for_trial(seed, t);
        const BitString a = sample_pad_left(spec, ctx, rng).pad;
        const BitString b = sample_pad_right(spec, ctx, rng).pad;
        if (form == PadEstimate::Table) {
            left[a] += 1.0;
            right[b] += 1.0;
        }
        left_len[a.size()] += 1.0;
        right_len[b.size()] += 1.0;
        zeros += static_cast<double>(a.count_zeros() + b.count_zeros());
        symbols += static_cast<double>(a.size() + b.size());
    }
    const auto n = static_cast<double>(trials);
    auto prov = provenance_for(spec, ctx, form == PadEstimate::Table ? "empirical" : "factored");
    prov.trials = trials;
    prov.seed = seed;
    if (form == PadEstimate::Table) {
        for (auto& [s, c] : left) c /= n;
        for (auto& [s, c] : right) c /= n;
        return PadModel::from_tables(std::move(left), std::move(right), prov);
    }
    for (double& c : left_len) c /= n;
    for (double& c : right_len) c /= n;
    return PadModel::factored(std::move(left_len), std::move(right_len), symbols > 0 ? zeros / symbols : 1.0, prov);
}

double total_variation(const StringPmf& a, const StringPmf& b) {
    double tv = 0.0;
    for (const auto& [s, p] : a) {
        const auto it = b.find(s);
        tv += std::abs(p - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [s, p] : b)
        if (!a.contains(s)) tv += p;
    return tv / 2.0;
}

}  // namespace idspolar
