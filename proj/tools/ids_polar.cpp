#include "idspolar/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace idspolar;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> out;
};

void print(const ResultRecord& r, const std::filesystem::path& dir) {
    std::printf("experiment: %s\n", r.experiment.c_str());
    for (const auto& m : r.metrics) {
        if (m.trials == 0)
            std::printf("  %-48s %.10g\n", m.name.c_str(), m.value);
        else
            std::printf("  %-48s %.10g  [%.6g, %.6g]  trials=%llu\n", m.name.c_str(), m.value, m.ci_low, m.ci_high,
                        static_cast<unsigned long long>(m.trials));
    }
    for (const auto& c : r.checks)
        std::printf("  %s  %s  (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    std::printf("wall_clock_seconds: %.3f\n", r.wall_clock_seconds);
    std::printf("results: %s\n", dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IDS channel polar coding experiments"};
    app.require_subcommand(1);
    Options opt;
    const char* names[] = {"stats", "lemma1", "mi", "parse-agreement", "e2e", "pad-model"};
    const char* blurbs[] = {"channel statistics and window-test constants",
                            "majority-test misclassification versus its exponential bound",
                            "mutual information with and without genie pads",
                            "agreement between Aladdin and genie parses",
                            "end-to-end polar decoding over the IDS channel",
                            "estimate (and, when possible, compare against exact) pad laws"};
    for (std::size_t i = 0; i < std::size(names); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", opt.config, "INI file with key = value lines")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override the configured seed");
        sub->add_option("--trials", opt.trials, "override the configured trial count");
        sub->add_option("--out", opt.out, "output directory for <experiment>.csv and <experiment>.json");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentKind kind = parse_experiment_kind(app.get_subcommands().front()->get_name());
        ExperimentConfig cfg = ExperimentConfig::from_file(opt.config);
        if (opt.seed) cfg.seed = *opt.seed;
        if (opt.trials) cfg.trials = *opt.trials;
        if (opt.out) cfg.out = *opt.out;
        const ResultRecord r = run_experiment(kind, cfg);
        write_outputs(r, cfg.out);
        print(r, cfg.out);
        return r.passed() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
