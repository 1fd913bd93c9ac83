#include "idspolar/experiment.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace idspolar {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream is(trim(text));
    T value{};
    is >> value;
    if (is.fail() || !is.eof()) throw ConfigError("key '" + key + "': cannot parse '" + text + "'");
    return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(parse_number<T>(key, item));
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

Metric exact_metric(std::string name, double value) { return Metric{std::move(name), value, value, value, 0, 0}; }

Metric proportion_metric(std::string name, std::uint64_t hits, std::uint64_t trials, std::uint64_t seed) {
    const auto [lo, hi] = wilson_interval(hits, trials);
    return Metric{std::move(name), trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0, lo, hi,
                  trials, seed};
}

double chi_square_uniform_p(const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (counts.size() < 2 || total == 0) return 1.0;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double chi2 = 0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

BitString random_bits(std::size_t n, RandomSource& rng) {
    std::vector<Bit> bits(n);
    for (auto& b : bits) b = rng.bit();
    return BitString(std::move(bits));
}

ResultRecord start_record(ExperimentKind kind, const ExperimentConfig& cfg) {
    cfg.validate(kind);
    ResultRecord r;
    r.experiment = to_string(kind);
    r.parameters = cfg.to_json();
    return r;
}

PadContext pad_context(const ExperimentConfig& cfg, const GuardConfig& guards, double beta) {
    PadContext ctx = PadContext::for_config(guards, beta);
    if (cfg.pad_zero_len) ctx.zero_len = *cfg.pad_zero_len;
    if (cfg.pad_ones_len) ctx.ones_len = *cfg.pad_ones_len;
    if (cfg.pad_window) ctx.h = *cfg.pad_window;
    return ctx;
}

constexpr std::size_t kMaxExactPadZeros = 6;

PadModel pads_for(const ChannelSpec& spec, const PadContext& ctx, std::uint64_t trials, std::uint64_t seed) {
    if (ctx.zero_len <= kMaxExactPadZeros) return exact_pad_model(spec, ctx);
    return estimate_pad_model(spec, ctx, trials, seed);
}

// Separate streams for auxiliary Monte-Carlo work, so that it never shares
// draws with the main trials.
constexpr std::uint64_t kPadStream = 0x70616473ULL << 32;
constexpr std::uint64_t kConstructionStream = 0x636f6e73ULL << 32;

}  // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Stats: return "stats";
        case ExperimentKind::Lemma1: return "lemma1";
        case ExperimentKind::Mi: return "mi";
        case ExperimentKind::ParseAgreement: return "parse-agreement";
        case ExperimentKind::E2e: return "e2e";
        case ExperimentKind::PadModel: return "pad-model";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::Stats, ExperimentKind::Lemma1, ExperimentKind::Mi, ExperimentKind::ParseAgreement,
                   ExperimentKind::E2e, ExperimentKind::PadModel})
        if (name == to_string(k)) return k;
    throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    ExperimentConfig c;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ConfigError("sections are not supported ('[" + key + "]'); use plain key = value lines");
        const std::string v = node.data();
        if (key == "p_insert") c.p_insert = parse_number<double>(key, v);
        else if (key == "p_delete") c.p_delete = parse_number<double>(key, v);
        else if (key == "p_substitute") c.p_substitute = parse_number<double>(key, v);
        else if (key == "n") c.n = parse_number<int>(key, v);
        else if (key == "n0") c.n0 = parse_number<int>(key, v);
        else if (key == "xi") c.xi = parse_number<double>(key, v);
        else if (key == "target_rate") c.target_rate = parse_number<double>(key, v);
        else if (key == "trials") c.trials = parse_number<std::uint64_t>(key, v);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "out") c.out = trim(v);
        else if (key == "n_values") c.n_values = parse_list<int>(key, v);
        else if (key == "n0_values") c.n0_values = parse_list<int>(key, v);
        else if (key == "h_values") c.h_values = parse_list<long long>(key, v);
        else if (key == "allow_short_windows") c.allow_short_windows = parse_bool(key, v);
        else if (key == "mi_mode") c.mi_mode = trim(v);
        else if (key == "pad_zero_len") c.pad_zero_len = parse_number<std::size_t>(key, v);
        else if (key == "pad_ones_len") c.pad_ones_len = parse_number<std::size_t>(key, v);
        else if (key == "pad_window") c.pad_window = parse_number<int>(key, v);
        else if (key == "pad_trials") c.pad_trials = parse_number<std::uint64_t>(key, v);
        else if (key == "rate_rule") c.rate_rule = trim(v);
        else if (key == "rate_fraction") c.rate_fraction = parse_number<double>(key, v);
        else if (key == "construction_trials") c.construction_trials = parse_number<std::uint64_t>(key, v);
        else throw ConfigError("unknown key '" + key + "'");
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

void ExperimentConfig::validate(ExperimentKind kind) const {
    try {
        (void)channel();
    } catch (const AdvantageViolation&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("channel probabilities: ") + e.what());
    }
    if (kind == ExperimentKind::Stats) return;
    if (trials == 0) throw ConfigError("trials must be positive");
    if (kind == ExperimentKind::Lemma1) {
        for (long long h : h_values)
            if (h < 1) throw ConfigError("h_values entries must be positive");
        return;
    }

    auto check_guard = [&](int nn, int nn0) {
        if (nn0 < 1 || nn < nn0 || nn > 30)
            throw ConfigError("need 1 <= n0 <= n <= 30 (got n=" + std::to_string(nn) + ", n0=" + std::to_string(nn0) + ")");
        if (!(xi > 0 && xi < 0.5)) throw ConfigError("xi must lie in (0, 1/2)");
    };
    const std::vector<int> ns = n_values.empty() ? std::vector<int>{n} : n_values;
    const std::vector<int> n0s = n0_values.empty() ? std::vector<int>{n0} : n0_values;
    for (int a : ns)
        for (int b : n0s) check_guard(a, b);

    if (pad_window && *pad_window < 1) throw ConfigError("pad_window must be positive");
    if (kind == ExperimentKind::Mi) {
        if (mi_mode != "auto" && mi_mode != "exact" && mi_mode != "monte-carlo")
            throw ConfigError("mi_mode must be auto, exact or monte-carlo");
        if ((1 << n0) > kMaxExhaustiveBlockBits)
            throw ConfigError("mi scores every block input: need 2^n0 <= 12 (n0 <= 3)");
        if (mi_mode == "exact" && (1 << n0) > kMaxExactMiBits)
            throw ConfigError("exact mi enumerates every output: need 2^n0 <= 4 (n0 <= 2)");
    }
    if (kind == ExperimentKind::E2e) {
        for (int b : n0s)
            if ((1 << b) > kMaxExhaustiveBlockBits)
                throw ConfigError("e2e decodes blocks exhaustively: need 2^n0 <= 12 (n0 <= 3)");
        if (rate_rule != "fixed" && rate_rule != "mi-proxy") throw ConfigError("rate_rule must be fixed or mi-proxy");
        if (!(target_rate >= 0 && target_rate <= 1)) throw ConfigError("target_rate must lie in [0, 1]");
        if (!(rate_fraction >= 0 && rate_fraction <= 1)) throw ConfigError("rate_fraction must lie in [0, 1]");
        if (construction_trials == 0) throw ConfigError("construction_trials must be positive");
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j{{"p_insert", p_insert},
                     {"p_delete", p_delete},
                     {"p_substitute", p_substitute},
                     {"n", n},
                     {"n0", n0},
                     {"xi", xi},
                     {"target_rate", target_rate},
                     {"trials", trials},
                     {"seed", seed},
                     {"n_values", n_values},
                     {"n0_values", n0_values},
                     {"h_values", h_values},
                     {"allow_short_windows", allow_short_windows},
                     {"mi_mode", mi_mode},
                     {"pad_trials", pad_trials},
                     {"rate_rule", rate_rule},
                     {"rate_fraction", rate_fraction},
                     {"construction_trials", construction_trials}};
    j["pad_zero_len"] = pad_zero_len ? nlohmann::json(*pad_zero_len) : nlohmann::json(nullptr);
    j["pad_ones_len"] = pad_ones_len ? nlohmann::json(*pad_ones_len) : nlohmann::json(nullptr);
    j["pad_window"] = pad_window ? nlohmann::json(*pad_window) : nlohmann::json(nullptr);
    return j;
}

bool ResultRecord::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const Metric* ResultRecord::metric(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return &m;
    return nullptr;
}

nlohmann::json ResultRecord::to_json() const {
    nlohmann::json m = nlohmann::json::array();
    for (const auto& x : metrics)
        m.push_back({{"name", x.name},
                     {"value", x.value},
                     {"ci_low", x.ci_low},
                     {"ci_high", x.ci_high},
                     {"trials", x.trials},
                     {"seed", x.seed}});
    nlohmann::json c = nlohmann::json::array();
    for (const auto& x : checks) c.push_back({{"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
    return {{"schema_version", kSchemaVersion}, {"experiment", experiment}, {"parameters", parameters},
            {"metrics", m},     {"checks", c},     {"passed", passed()},   {"extra", extra}};
}

std::string ResultRecord::to_csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(csv_header);
    for (const auto& row : csv_rows) line(row);
    return os.str();
}

void write_outputs(const ResultRecord& record, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / (record.experiment + ".csv"), std::ios::binary);
    csv << record.to_csv();
    std::ofstream json(dir / (record.experiment + ".json"), std::ios::binary);
    json << record.to_json().dump(2) << '\n';
    if (!csv || !json) throw std::runtime_error("failed to write results to " + dir.string());
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = kZ95 * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double mi_rate_proxy(const ChannelSpec& spec, double xi) {
    const GuardConfig guards(3, 2, xi);
    const PadModel pads = exact_pad_model(spec, PadContext::for_config(guards, channel_stats(spec).beta));
    return exact_information(spec, pads, 4).i_xystar / 4.0;
}

// ---------------------------------------------------------------------------

ResultRecord cmd_stats(const ExperimentConfig& cfg) {
    ResultRecord r = start_record(ExperimentKind::Stats, cfg);
    const ChannelStats s = channel_stats(cfg.channel());
    const Lemma1Constants k = lemma1_constants(s);
    const std::pair<const char*, double> values[] = {
        {"alpha_0_given_0", s.alpha_0_given_0}, {"alpha_1_given_0", s.alpha_1_given_0},
        {"alpha_0_given_1", s.alpha_0_given_1}, {"alpha_1_given_1", s.alpha_1_given_1},
        {"beta", s.beta},                       {"gamma", s.gamma},
        {"delta", k.delta},                     {"h0_prime", k.h0_prime},
        {"c0_prime", k.c0_prime},               {"c0_double_prime", k.c0_double_prime},
        {"c0", k.c0},                           {"h0", k.h0}};
    r.csv_header = {"quantity", "value"};
    for (const auto& [name, v] : values) {
        r.metrics.push_back(exact_metric(name, v));
        r.csv_rows.push_back({name, num(v)});
    }
    return r;
}

ResultRecord cmd_lemma1(const ExperimentConfig& cfg) {
    ResultRecord r = start_record(ExperimentKind::Lemma1, cfg);
    const ChannelSpec spec = cfg.channel();
    const Lemma1Constants k = lemma1_constants(channel_stats(spec));
    std::vector<long long> grid = cfg.h_values;
    if (grid.empty()) grid = {static_cast<long long>(std::ceil(k.h0)), static_cast<long long>(std::ceil(2 * k.h0))};

    r.csv_header = {"h", "x", "drop_first", "trials", "seed", "errors", "rate", "ci_low", "ci_high", "bound", "pass"};
    std::uint64_t arm = 0;
    for (long long h : grid) {
        if (static_cast<double>(h) < k.h0 && !cfg.allow_short_windows)
            throw WindowTooShort("h = " + std::to_string(h) + " is below h0 = " + num(k.h0) +
                                 "; set allow_short_windows = true to run it anyway");
        const double bound = std::exp(-static_cast<double>(h) * k.c0);
        r.metrics.push_back(exact_metric("bound[h=" + std::to_string(h) + "]", bound));
        for (Bit x : {Bit{0}, Bit{1}})
            for (bool drop : {false, true}) {
                std::uint64_t errors = 0;
                const std::uint64_t base = arm * cfg.trials;
                for (std::uint64_t t = 0; t < cfg.trials; ++t) {
                    RandomSource rng = RandomSource::for_trial(cfg.seed, base + t);
                    const BitString w = sample_window(spec, x, static_cast<std::size_t>(h), drop, rng);
                    errors += window_majority_test(w) != x;
                }
                ++arm;
                const std::string tag = "h=" + std::to_string(h) + ",x=" + std::to_string(x) +
                                        (drop ? ",drop_first" : "");
                Metric m = proportion_metric("misclassification[" + tag + "]", errors, cfg.trials, cfg.seed);
                const bool pass = m.ci_high <= bound;
                r.metrics.push_back(m);
                r.checks.push_back({"misclassification below bound [" + tag + "]", pass,
                                    "upper 95% limit " + num(m.ci_high) + " vs bound " + num(bound)});
                r.csv_rows.push_back({std::to_string(h), std::to_string(x), drop ? "1" : "0", num(cfg.trials),
                                      num(cfg.seed), num(errors), num(m.value), num(m.ci_low), num(m.ci_high),
                                      num(bound), pass ? "1" : "0"});
            }
    }
    return r;
}

ResultRecord cmd_mi(const ExperimentConfig& cfg) {
    ResultRecord r = start_record(ExperimentKind::Mi, cfg);
    const ChannelSpec spec = cfg.channel();
    const GuardConfig guards(cfg.n, cfg.n0, cfg.xi);
    const int block_bits = 1 << cfg.n0;
    const PadContext ctx = pad_context(cfg, guards, channel_stats(spec).beta);
    const bool exact_possible = block_bits <= kMaxExactMiBits && ctx.zero_len <= kMaxExactPadZeros;
    const bool exact = cfg.mi_mode == "exact" || (cfg.mi_mode == "auto" && exact_possible);
    if (exact && !exact_possible)
        throw ExactModeUnavailable("exact mode needs 2^n0 <= 4 and a zero run of at most 6 symbols");

    r.extra["pad_context"] = {{"zero_len", ctx.zero_len}, {"ones_len", ctx.ones_len}, {"h", ctx.h}};
    r.extra["mode"] = exact ? "exact" : "monte-carlo";
    const double slack = 2 * std::log2(static_cast<double>(block_bits));
    r.csv_header = {"mode", "block_bits", "trials", "seed", "i_xy", "i_xy_ci_low", "i_xy_ci_high", "i_xystar",
                    "i_xystar_ci_low", "i_xystar_ci_high", "lower_bound"};

    if (exact) {
        const PadModel pads = exact_pad_model(spec, ctx);
        const ExactInformation e = exact_information(spec, pads, block_bits);
        r.metrics.push_back(exact_metric("i_xy", e.i_xy));
        r.metrics.push_back(exact_metric("i_xystar", e.i_xystar));
        r.metrics.push_back(exact_metric("lower_bound", e.i_xy - slack));
        r.checks.push_back({"I(X;Y*) <= I(X;Y)", e.i_xystar <= e.i_xy + 1e-9,
                            num(e.i_xystar) + " <= " + num(e.i_xy)});
        r.checks.push_back({"I(X;Y) - 2 log2 N0 <= I(X;Y*)", e.i_xy - slack <= e.i_xystar + 1e-9,
                            num(e.i_xy - slack) + " <= " + num(e.i_xystar)});
        r.extra["support"] = {{"y", e.y_support}, {"ystar", e.ystar_support}};
        r.csv_rows.push_back({"exact", num(block_bits), "0", num(cfg.seed), num(e.i_xy), num(e.i_xy), num(e.i_xy),
                              num(e.i_xystar), num(e.i_xystar), num(e.i_xystar), num(e.i_xy - slack)});
        return r;
    }

    const PadModel pads = pads_for(spec, ctx, cfg.pad_trials, cfg.seed ^ kPadStream);
    const MonteCarloInformation m = monte_carlo_information(spec, pads, ctx, block_bits, cfg.trials, cfg.seed);
    const std::uint64_t used = cfg.trials - m.unsupported;
    r.metrics.push_back({"i_xy", m.i_xy, m.i_xy - m.i_xy_half_width, m.i_xy + m.i_xy_half_width, used, cfg.seed});
    r.metrics.push_back({"i_xystar", m.i_xystar, m.i_xystar - m.i_xystar_half_width,
                         m.i_xystar + m.i_xystar_half_width, used, cfg.seed});
    r.metrics.push_back({"gap", m.gap, m.gap - m.gap_half_width, m.gap + m.gap_half_width, used, cfg.seed});
    r.metrics.push_back(proportion_metric("unsupported_pad_fraction", m.unsupported, cfg.trials, cfg.seed));
    r.checks.push_back({"I(X;Y*) <= I(X;Y) within CI", m.gap + m.gap_half_width >= 0,
                        "gap " + num(m.gap) + " +- " + num(m.gap_half_width)});
    r.checks.push_back({"I(X;Y) - 2 log2 N0 <= I(X;Y*) within CI", m.gap - m.gap_half_width <= slack,
                        "gap " + num(m.gap) + " +- " + num(m.gap_half_width) + " vs " + num(slack)});
    r.extra["pad_model"] = pads.provenance().method;
    r.csv_rows.push_back({"monte-carlo", num(block_bits), num(used), num(cfg.seed), num(m.i_xy),
                          num(m.i_xy - m.i_xy_half_width), num(m.i_xy + m.i_xy_half_width), num(m.i_xystar),
                          num(m.i_xystar - m.i_xystar_half_width), num(m.i_xystar + m.i_xystar_half_width),
                          num(m.i_xy - slack)});
    return r;
}

ResultRecord cmd_parse_agreement(const ExperimentConfig& cfg) {
    ResultRecord r = start_record(ExperimentKind::ParseAgreement, cfg);
    const ChannelSpec spec = cfg.channel();
    const double beta = channel_stats(spec).beta;
    const std::vector<int> sweep = cfg.n0_values.empty() ? std::vector<int>{cfg.n0} : cfg.n0_values;

    r.csv_header = {"seed",         "n",        "n0",       "h",        "trials",         "matched",
                    "match_rate",   "ci_low",   "ci_high",  "flags_1a", "flags_4a",       "flags_7a",
                    "early_stop",   "overrun",  "misplaced_midpoint",   "parse_failures", "unflagged_mismatches",
                    "derived_rhos", "rho_chi2_p"};
    std::vector<Metric> rates;
    for (int n0 : sweep) {
        const GuardConfig guards(cfg.n, n0, cfg.xi);
        const int h = guards.window_length(beta);
        std::uint64_t matched = 0, unflagged = 0;
        CouplingFlags with_flag;  // trials with at least one event of each kind
        std::vector<std::uint64_t> rho_counts(static_cast<std::size_t>(h), 0);
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            RandomSource rng = RandomSource::for_trial(cfg.seed, t);
            const BitString x = random_bits(guards.N(), rng);
            const CoupledTrialReport rep = run_coupled_trial(spec, x, guards, rng);
            matched += rep.matched;
            if (!rep.matched && rep.flags.total() == 0) ++unflagged;
            with_flag.short_ones += rep.flags.short_ones > 0;
            with_flag.first_window_fell_off += rep.flags.first_window_fell_off > 0;
            with_flag.second_window_fell_off += rep.flags.second_window_fell_off > 0;
            with_flag.early_stop += rep.flags.early_stop > 0;
            with_flag.overrun += rep.flags.overrun > 0;
            with_flag.misplaced_midpoint += rep.flags.misplaced_midpoint > 0;
            with_flag.parse_failure += rep.flags.parse_failure > 0;
            for (const auto& d : rep.dithers)
                if (d.derived) ++rho_counts[static_cast<std::size_t>(d.genie_rho - 1)];
        }
        std::uint64_t derived = 0;
        for (auto c : rho_counts) derived += c;
        const double p_value = chi_square_uniform_p(rho_counts);
        const std::string tag = "[n0=" + std::to_string(n0) + "]";
        Metric rate = proportion_metric("match_rate" + tag, matched, cfg.trials, cfg.seed);
        rates.push_back(rate);
        r.metrics.push_back(rate);
        r.metrics.push_back(proportion_metric("flag_rate_1a" + tag, with_flag.short_ones, cfg.trials, cfg.seed));
        r.metrics.push_back(
            proportion_metric("flag_rate_4a" + tag, with_flag.first_window_fell_off, cfg.trials, cfg.seed));
        r.metrics.push_back(
            proportion_metric("flag_rate_7a" + tag, with_flag.second_window_fell_off, cfg.trials, cfg.seed));
        r.metrics.push_back(proportion_metric("early_stop_rate" + tag, with_flag.early_stop, cfg.trials, cfg.seed));
        r.metrics.push_back(proportion_metric("overrun_rate" + tag, with_flag.overrun, cfg.trials, cfg.seed));
        r.metrics.push_back(
            proportion_metric("misplaced_midpoint_rate" + tag, with_flag.misplaced_midpoint, cfg.trials, cfg.seed));
        r.metrics.push_back(
            proportion_metric("parse_failure_rate" + tag, with_flag.parse_failure, cfg.trials, cfg.seed));
        r.checks.push_back({"every mismatch carries a flag " + tag, unflagged == 0,
                            std::to_string(unflagged) + " unflagged mismatches"});
        r.checks.push_back({"derived genie dithers uniform " + tag, p_value >= 1e-4,
                            "chi-square p = " + num(p_value) + " over " + std::to_string(derived) + " dithers"});
        r.extra["rho_counts" + tag] = rho_counts;
        r.csv_rows.push_back({num(cfg.seed), num(cfg.n), num(n0), num(h), num(cfg.trials), num(matched),
                              num(rate.value), num(rate.ci_low), num(rate.ci_high), num(with_flag.short_ones),
                              num(with_flag.first_window_fell_off), num(with_flag.second_window_fell_off),
                              num(with_flag.early_stop), num(with_flag.overrun), num(with_flag.misplaced_midpoint),
                              num(with_flag.parse_failure), num(unflagged), num(derived), num(p_value)});
    }
    for (std::size_t i = 1; i < rates.size(); ++i) {
        // Nondecreasing within CIs: a later rate may fall below an earlier one only if the intervals overlap.
        const bool ok = rates[i].ci_high >= rates[i - 1].ci_low;
        r.checks.push_back({"match rate nondecreasing " + rates[i - 1].name + " -> " + rates[i].name, ok,
                            num(rates[i - 1].value) + " -> " + num(rates[i].value)});
    }
    return r;
}

ResultRecord cmd_e2e(const ExperimentConfig& cfg) {
    ResultRecord r = start_record(ExperimentKind::E2e, cfg);
    const ChannelSpec spec = cfg.channel();
    const double beta = channel_stats(spec).beta;
    const std::vector<int> sweep = cfg.n_values.empty() ? std::vector<int>{cfg.n} : cfg.n_values;

    double rate = cfg.target_rate;
    if (cfg.rate_rule == "mi-proxy") {
        const double proxy = mi_rate_proxy(spec, cfg.xi);
        rate = cfg.rate_fraction * proxy;
        r.metrics.push_back(exact_metric("mi_proxy_bits_per_symbol", proxy));
    }
    r.metrics.push_back(exact_metric("rate_requested", rate));

    r.csv_header = {"seed",      "n",         "n0",        "N",          "information_bits", "rate",
                    "trials",    "fer_genie", "fer_genie_ci_low", "fer_genie_ci_high", "fer_aladdin",
                    "fer_aladdin_ci_low", "fer_aladdin_ci_high", "ber_genie", "ber_aladdin", "mismatches",
                    "mismatch_rate", "errors_with_mismatch"};
    struct Point {
        int n;
        std::uint64_t genie_errors;
        std::uint64_t trials;
    };
    std::vector<Point> points;
    for (int n : sweep) {
        const GuardConfig guards(n, cfg.n0, cfg.xi);
        const PadContext ctx = pad_context(cfg, guards, beta);
        const PadModel pads = pads_for(spec, ctx, cfg.pad_trials, cfg.seed ^ kPadStream);
        const CodeConstruction built =
            construct_code(spec, guards, pads, rate, cfg.construction_trials, cfg.seed ^ kConstructionStream);
        const PolarConfig& code = built.code;

        std::uint64_t fer_g = 0, fer_a = 0, mismatches = 0, errors_with_mismatch = 0, bit_g = 0, bit_a = 0;
        const std::size_t k = code.information_size();
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            RandomSource rng = RandomSource::for_trial(cfg.seed, t);
            const BitString message = random_bits(k, rng);
            const BitString u = code.embed(message);
            const CoupledTrialReport rep = run_coupled_trial(spec, polar_encode(u), guards, rng);

            const BitString genie_msg = code.extract(sc_decode(y_star_strings(rep.genie_blocks), code, spec, pads));
            BitString aladdin_msg;
            if (rep.matched) {
                aladdin_msg = genie_msg;
            } else if (!rep.aladdin.failed) {
                aladdin_msg = code.extract(sc_decode(rep.aladdin.blocks, code, spec, pads));
            }
            const bool genie_wrong = genie_msg != message;
            const bool aladdin_wrong = aladdin_msg.size() != k || aladdin_msg != message;
            fer_g += genie_wrong;
            fer_a += aladdin_wrong;
            mismatches += !rep.matched;
            errors_with_mismatch += aladdin_wrong && !rep.matched;
            for (std::size_t i = 0; i < k; ++i) {
                bit_g += genie_msg[i] != message[i];
                bit_a += aladdin_msg.size() != k || aladdin_msg[i] != message[i];
            }
        }
        const std::string tag = "[n=" + std::to_string(n) + "]";
        const Metric mg = proportion_metric("fer_genie" + tag, fer_g, cfg.trials, cfg.seed);
        const Metric ma = proportion_metric("fer_aladdin" + tag, fer_a, cfg.trials, cfg.seed);
        const Metric mm = proportion_metric("mismatch_rate" + tag, mismatches, cfg.trials, cfg.seed);
        const std::uint64_t bits = k * cfg.trials;
        r.metrics.push_back(mg);
        r.metrics.push_back(ma);
        r.metrics.push_back(mm);
        r.metrics.push_back(proportion_metric("ber_genie" + tag, bit_g, bits, cfg.seed));
        r.metrics.push_back(proportion_metric("ber_aladdin" + tag, bit_a, bits, cfg.seed));
        r.metrics.push_back(proportion_metric("aladdin_errors_with_mismatch" + tag, errors_with_mismatch,
                                              std::max<std::uint64_t>(fer_a, 1), cfg.seed));
        r.metrics.push_back(exact_metric("rate" + tag, code.rate()));

        // Per trial a genie error without a mismatch is an Aladdin error too, so the counts obey this exactly.
        r.checks.push_back({"FER(genie) <= FER(aladdin) + mismatch rate " + tag, fer_g <= fer_a + mismatches,
                            num(mg.value) + " <= " + num(ma.value) + " + " + num(mm.value)});
        const double se = std::sqrt(mg.value * (1 - mg.value) / static_cast<double>(cfg.trials) +
                                    ma.value * (1 - ma.value) / static_cast<double>(cfg.trials));
        const double gap = std::abs(ma.value - mg.value);
        r.checks.push_back({"|FER(aladdin) - FER(genie)| <= mismatch rate + CI " + tag,
                            gap <= mm.value + kZ95 * se,
                            num(gap) + " <= " + num(mm.value) + " + " + num(kZ95 * se)});
        r.csv_rows.push_back({num(cfg.seed), num(n), num(cfg.n0), num(static_cast<std::uint64_t>(guards.N())),
                              num(static_cast<std::uint64_t>(k)), num(code.rate()), num(cfg.trials), num(mg.value),
                              num(mg.ci_low), num(mg.ci_high), num(ma.value), num(ma.ci_low), num(ma.ci_high),
                              num(bits ? static_cast<double>(bit_g) / static_cast<double>(bits) : 0.0),
                              num(bits ? static_cast<double>(bit_a) / static_cast<double>(bits) : 0.0),
                              num(mismatches), num(mm.value), num(errors_with_mismatch)});
        r.extra["code" + tag] = code.to_json();
        r.extra["pad_model" + tag] = pads.provenance().method;
        points.push_back({n, fer_g, cfg.trials});
    }
    // Trend over the sweep: no significant rise between neighbours and a
    // significant drop from the first size to the last.
    auto fer = [](const Point& pt) { return static_cast<double>(pt.genie_errors) / static_cast<double>(pt.trials); };
    auto margin = [&](const Point& a, const Point& b) {
        const double fa = fer(a), fb = fer(b);
        return kZ95 * std::sqrt(fa * (1 - fa) / static_cast<double>(a.trials) + fb * (1 - fb) / static_cast<double>(b.trials));
    };
    for (std::size_t i = 1; i < points.size(); ++i) {
        const Point& a = points[i - 1];
        const Point& b = points[i];
        r.checks.push_back({"FER(genie) does not rise n=" + std::to_string(a.n) + " -> n=" + std::to_string(b.n),
                            fer(b) - fer(a) <= margin(a, b),
                            num(fer(a)) + " -> " + num(fer(b)) + " (95% margin " + num(margin(a, b)) + ")"});
    }
    if (points.size() >= 2) {
        const Point& a = points.front();
        const Point& b = points.back();
        r.checks.push_back({"FER(genie) decreases n=" + std::to_string(a.n) + " -> n=" + std::to_string(b.n),
                            fer(a) - fer(b) > margin(a, b),
                            num(fer(a)) + " -> " + num(fer(b)) + " (95% margin " + num(margin(a, b)) + ")"});
    }
    return r;
}

ResultRecord cmd_pad_model(const ExperimentConfig& cfg) {
    ResultRecord r = start_record(ExperimentKind::PadModel, cfg);
    const ChannelSpec spec = cfg.channel();
    const GuardConfig guards(cfg.n, cfg.n0, cfg.xi);
    const PadContext ctx = pad_context(cfg, guards, channel_stats(spec).beta);
    const PadModel estimated = estimate_pad_model(spec, ctx, cfg.trials, cfg.seed);
    r.extra["pad_model"] = estimated.to_json();
    r.extra["pad_context"] = {{"zero_len", ctx.zero_len}, {"ones_len", ctx.ones_len}, {"h", ctx.h}};

    auto length_pmf = [&](bool left) {
        std::vector<double> pmf(2 * ctx.zero_len + 1, 0.0);
        if (estimated.form() == PadModel::Form::Table) {
            for (const auto& [s, p] : left ? estimated.left_table() : estimated.right_table()) pmf[s.size()] += p;
        } else {
            const auto& lengths = estimated.to_json().at(left ? "left_lengths" : "right_lengths");
            for (std::size_t i = 0; i < lengths.size() && i < pmf.size(); ++i) pmf[i] = lengths[i].get<double>();
        }
        return pmf;
    };
    r.csv_header = {"side", "length", "probability"};
    for (bool left : {true, false}) {
        const auto pmf = length_pmf(left);
        double mean = 0;
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            mean += static_cast<double>(i) * pmf[i];
            r.csv_rows.push_back({left ? "left" : "right", std::to_string(i), num(pmf[i])});
        }
        const std::string side = left ? "left" : "right";
        const auto empty_hits = static_cast<std::uint64_t>(std::llround(pmf[0] * static_cast<double>(cfg.trials)));
        r.metrics.push_back(proportion_metric("p_empty_" + side, empty_hits, cfg.trials, cfg.seed));
        double var = 0;
        for (std::size_t i = 0; i < pmf.size(); ++i) var += pmf[i] * (static_cast<double>(i) - mean) * (static_cast<double>(i) - mean);
        const double hw = kZ95 * std::sqrt(var / static_cast<double>(cfg.trials));
        r.metrics.push_back({"mean_length_" + side, mean, mean - hw, mean + hw, cfg.trials, cfg.seed});
    }
    if (ctx.zero_len <= kMaxExactPadZeros && estimated.form() == PadModel::Form::Table) {
        const PadModel exact = exact_pad_model(spec, ctx);
        const double tv_left = total_variation(exact.left_table(), estimated.left_table());
        const double tv_right = total_variation(exact.right_table(), estimated.right_table());
        r.metrics.push_back(exact_metric("tv_exact_vs_empirical_left", tv_left));
        r.metrics.push_back(exact_metric("tv_exact_vs_empirical_right", tv_right));
        r.extra["exact_pad_model"] = exact.to_json();
    }
    return r;
}

ResultRecord run_experiment(ExperimentKind kind, const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    ResultRecord r;
    switch (kind) {
        case ExperimentKind::Stats: r = cmd_stats(cfg); break;
        case ExperimentKind::Lemma1: r = cmd_lemma1(cfg); break;
        case ExperimentKind::Mi: r = cmd_mi(cfg); break;
        case ExperimentKind::ParseAgreement: r = cmd_parse_agreement(cfg); break;
        case ExperimentKind::E2e: r = cmd_e2e(cfg); break;
        case ExperimentKind::PadModel: r = cmd_pad_model(cfg); break;
    }
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace idspolar
