#include <doctest.h>

#include <cmath>

#include "idspolar/channel.hpp"
#include "oracles.hpp"

using namespace idspolar;

TEST_CASE("symbol output pmf lists the five outcomes") {
    const ChannelSpec spec(0.05, 0.05, 0.05);
    const SymbolOutputPmf pmf = symbol_output_pmf(spec, 0);
    CHECK(pmf.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pmf.probability_of(BitString{}) == doctest::Approx(0.05));
    CHECK(pmf.probability_of(BitString::parse("0")) == doctest::Approx(0.85));
    CHECK(pmf.probability_of(BitString::parse("1")) == doctest::Approx(0.05));
    CHECK(pmf.probability_of(BitString::parse("00")) == doctest::Approx(0.025));
    CHECK(pmf.probability_of(BitString::parse("10")) == doctest::Approx(0.025));
    CHECK(pmf.probability_of(BitString::parse("01")) == 0.0);
    CHECK(pmf.probability_of(BitString::parse("000")) == 0.0);

    const SymbolOutputPmf clean = symbol_output_pmf(ChannelSpec(0, 0, 0), 1);
    CHECK(clean.probability_of(BitString::parse("1")) == 1.0);

    const SymbolOutputPmf del = symbol_output_pmf(ChannelSpec(0, 0.1, 0), 0);
    CHECK(del.probability_of(BitString{}) == doctest::Approx(0.1));
    CHECK(del.probability_of(BitString::parse("0")) == doctest::Approx(0.9));
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(ChannelSpec(-0.1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(ChannelSpec(0.5, 0.4, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(ChannelSpec(0, 0, 0.5), AdvantageViolation);
    CHECK_THROWS_AS(ChannelSpec(0, 1, 0), AdvantageViolation);
    CHECK_NOTHROW(ChannelSpec(0.05, 0.05, 0.05));
}

TEST_CASE("channel statistics match enumeration") {
    const ChannelStats s = channel_stats(ChannelSpec(0.05, 0.05, 0.05));
    // Expected symbol counts from the outcome list, summed by hand.
    const oracle::P p{0.05, 0.05, 0.05};
    double zeros_from_0 = 0, ones_from_0 = 0;
    for (const auto& [o, q] : oracle::symbol(p, '0'))
        for (char c : o) (c == '0' ? zeros_from_0 : ones_from_0) += q;
    CHECK(s.alpha_0_given_0 == doctest::Approx(zeros_from_0).epsilon(1e-14));
    CHECK(s.alpha_1_given_0 == doctest::Approx(ones_from_0).epsilon(1e-14));
    CHECK(std::abs(s.alpha_0_given_0 - 0.925) < 1e-12);
    CHECK(std::abs(s.alpha_1_given_0 - 0.075) < 1e-12);
    CHECK(std::abs(s.beta - 1.0) < 1e-12);
    CHECK(std::abs(s.gamma - 0.425) < 1e-12);

    const ChannelStats d = channel_stats(ChannelSpec(0, 0.1, 0));
    CHECK(d.alpha_0_given_0 == doctest::Approx(0.9));
    CHECK(d.alpha_1_given_0 == 0.0);
    CHECK(d.beta == doctest::Approx(0.9));
    CHECK(d.gamma == doctest::Approx(0.45));

    const ChannelStats c = channel_stats(ChannelSpec(0, 0, 0));
    CHECK(c.beta == 1.0);
    CHECK(c.gamma == 0.5);
}

TEST_CASE("window constants") {
    const Lemma1Constants k = lemma1_constants(channel_stats(ChannelSpec(0.05, 0.05, 0.05)));
    CHECK(k.delta == doctest::Approx(0.22972972972972971).epsilon(1e-12));
    CHECK(k.h0_prime == doctest::Approx(16.411764705882355).epsilon(1e-12));
    CHECK(k.c0_prime == doctest::Approx(0.006485872271665651).epsilon(1e-12));
    CHECK(k.c0_double_prime == doctest::Approx(0.02931195175438596).epsilon(1e-12));
    CHECK(k.c0 == doctest::Approx(0.0032429361358328255).epsilon(1e-12));
    CHECK(k.h0 == doctest::Approx(427.4812401644392).epsilon(1e-12));
    CHECK(k.h0 >= k.h0_prime);
    CHECK(k.c0 > 0);

    const Lemma1Constants del = lemma1_constants(channel_stats(ChannelSpec(0, 0.1, 0)));
    CHECK(del.delta == doctest::Approx(0.25));
}

TEST_CASE("majority test and bound") {
    CHECK(window_majority_test(BitString::parse("0000")) == 0);
    CHECK(window_majority_test(BitString::parse("0011")) == 0);
    CHECK(window_majority_test(BitString::parse("0111")) == 1);
    CHECK(window_majority_test(BitString::parse("011")) == 1);

    const Lemma1Constants k = lemma1_constants(channel_stats(ChannelSpec(0.05, 0.05, 0.05)));
    CHECK(misclassification_bound(k, 428) == doctest::Approx(0.24957977731633246).epsilon(1e-12));
    CHECK_THROWS_AS(misclassification_bound(k, 427), WindowTooShort);
    double previous = 1.0;
    for (long long h = 428; h < 5000; h += 200) {
        const double b = misclassification_bound(k, h);
        CHECK(b < previous);
        previous = b;
    }
}

TEST_CASE("transmit") {
    RandomSource rng(7);
    const BitString x = BitString::parse("0110");
    for (int t = 0; t < 20; ++t) CHECK(transmit(ChannelSpec(0, 0, 0), x, rng) == x);

    const ChannelSpec spec(0.05, 0.05, 0.05);
    const int trials = 1'000'000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) hits += transmit(spec, BitString::parse("0"), rng) == BitString::parse("0");
    const double sigma = std::sqrt(0.85 * 0.15 / trials);
    CHECK(std::abs(static_cast<double>(hits) / trials - 0.85) < 3 * sigma);
}

TEST_CASE("transmit is reproducible per seed") {
    const ChannelSpec spec(0.1, 0.1, 0.1);
    const BitString x = BitString::parse("0110100110010110");
    RandomSource a = RandomSource::for_trial(11, 3), b = RandomSource::for_trial(11, 3);
    CHECK(transmit(spec, x, a) == transmit(spec, x, b));
    CHECK(a.draws() == x.size());
}

TEST_CASE("sample window") {
    RandomSource rng(3);
    const ChannelSpec spec(0.05, 0.05, 0.05);
    for (int t = 0; t < 50; ++t) {
        CHECK(sample_window(spec, 0, 37, false, rng).size() == 37);
        CHECK(sample_window(spec, 1, 37, true, rng).size() == 37);
    }
    CHECK(sample_window(ChannelSpec(0, 0, 0), 1, 9, true, rng) == BitString::ones(9));
}
