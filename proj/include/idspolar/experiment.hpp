#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "idspolar/aladdin.hpp"
#include "idspolar/information.hpp"
#include "idspolar/polar.hpp"

namespace idspolar {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Stats, Lemma1, Mi, ParseAgreement, E2e, PadModel };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Everything an experiment reads. Loaded from a key = value file; unknown
/// keys are rejected.
struct ExperimentConfig {
    double p_insert = 0.01;
    double p_delete = 0.01;
    double p_substitute = 0.01;
    int n = 10;
    int n0 = 5;
    double xi = 0.2;
    double target_rate = 0.5;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    std::filesystem::path out = "results";

    /// Sweeps; empty means the single value of n or n0.
    std::vector<int> n_values;
    std::vector<int> n0_values;

    /// lemma1: window lengths; empty means ceil(h0) and ceil(2 h0).
    std::vector<long long> h_values;
    bool allow_short_windows = false;

    /// mi: "auto", "exact" or "monte-carlo".
    std::string mi_mode = "auto";
    /// Explicit pad context; unset fields follow the guard configuration.
    std::optional<std::size_t> pad_zero_len;
    std::optional<std::size_t> pad_ones_len;
    std::optional<int> pad_window;
    std::uint64_t pad_trials = 200000;

    /// e2e: "fixed" uses target_rate; "mi-proxy" uses rate_fraction times the
    /// exact per-bit I(X;Y*) of a 4-bit block.
    std::string rate_rule = "fixed";
    double rate_fraction = 0.5;
    std::uint64_t construction_trials = 500;

    ChannelSpec channel() const { return ChannelSpec(p_insert, p_delete, p_substitute); }

    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_string(const std::string& text);

    /// Throws ConfigError naming the offending key.
    void validate(ExperimentKind kind) const;
    nlohmann::json to_json() const;
};

struct Metric {
    std::string name;
    double value = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::uint64_t trials = 0;  // 0 for analytic values
    std::uint64_t seed = 0;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ResultRecord {
    static constexpr int kSchemaVersion = 1;

    std::string experiment;
    nlohmann::json parameters;
    std::vector<Metric> metrics;
    std::vector<CheckResult> checks;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    nlohmann::json extra = nlohmann::json::object();
    /// Reported on the console only, so output files stay reproducible.
    double wall_clock_seconds = 0;

    bool passed() const;
    const Metric* metric(const std::string& name) const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Writes <dir>/<experiment>.csv and <dir>/<experiment>.json.
void write_outputs(const ResultRecord& record, const std::filesystem::path& dir);

/// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Per-bit I(X;Y*) of a 4-bit block with the exact pad law of its guards.
double mi_rate_proxy(const ChannelSpec& spec, double xi);

ResultRecord cmd_stats(const ExperimentConfig& cfg);
ResultRecord cmd_lemma1(const ExperimentConfig& cfg);
ResultRecord cmd_mi(const ExperimentConfig& cfg);
ResultRecord cmd_parse_agreement(const ExperimentConfig& cfg);
ResultRecord cmd_e2e(const ExperimentConfig& cfg);
ResultRecord cmd_pad_model(const ExperimentConfig& cfg);

ResultRecord run_experiment(ExperimentKind kind, const ExperimentConfig& cfg);

}  // namespace idspolar
