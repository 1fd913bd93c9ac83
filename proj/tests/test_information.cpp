#include <doctest.h>

#include <cmath>

#include "idspolar/information.hpp"

using namespace idspolar;

TEST_CASE("noiseless block carries all its bits") {
    const ChannelSpec clean(0, 0, 0);
    const ExactInformation e = exact_information(clean, PadModel::empty_pads(), 4);
    CHECK(e.i_xy == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(e.i_xystar == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(e.y_support == 16);
}

TEST_CASE("padding loses at most two log2 N0 bits") {
    const ChannelSpec spec(0, 0.1, 0);
    const PadContext ctx{4, 8, 1};
    CHECK(ctx.h == GuardConfig(5, 4, 0.2).window_length(channel_stats(spec).beta));
    const PadModel pads = exact_pad_model(spec, ctx);
    const ExactInformation e = exact_information(spec, pads, 4);
    CHECK(e.i_xystar <= e.i_xy + 1e-9);
    CHECK(e.i_xy - 2 * std::log2(4.0) <= e.i_xystar + 1e-9);
    CHECK(e.i_xy < 4.0);
    CHECK(e.i_xystar > 0.0);
}

TEST_CASE("exact mode guards") {
    const ChannelSpec spec(0.05, 0.05, 0.05);
    CHECK_THROWS_AS(exact_information(spec, PadModel::empty_pads(), 5), ExactModeUnavailable);
    const PadModel f = estimate_pad_model(spec, PadContext{8, 16, 2}, 500, 1);
    CHECK_THROWS_AS(exact_information(spec, f, 2), ExactModeUnavailable);
}

TEST_CASE("Monte-Carlo estimates bracket the exact values") {
    const ChannelSpec spec(0.05, 0.05, 0.05);
    const PadContext ctx{2, 4, 1};
    const PadModel pads = exact_pad_model(spec, ctx);
    const ExactInformation e = exact_information(spec, pads, 3);
    const MonteCarloInformation m = monte_carlo_information(spec, pads, ctx, 3, 40000, 9);
    CHECK(m.unsupported == 0);
    CHECK(std::abs(m.i_xy - e.i_xy) <= 1.5 * m.i_xy_half_width);
    CHECK(std::abs(m.i_xystar - e.i_xystar) <= 1.5 * m.i_xystar_half_width);
    CHECK(m.gap + m.gap_half_width >= 0.0);
    CHECK(m.i_xystar <= m.i_xy + m.i_xy_half_width + m.i_xystar_half_width);
}

TEST_CASE("Monte-Carlo estimates are reproducible") {
    const ChannelSpec spec(0.02, 0.02, 0.02);
    const PadContext ctx{8, 16, 2};
    const PadModel pads = estimate_pad_model(spec, ctx, 5000, 2);
    const MonteCarloInformation a = monte_carlo_information(spec, pads, ctx, 6, 300, 4);
    const MonteCarloInformation b = monte_carlo_information(spec, pads, ctx, 6, 300, 4);
    CHECK(a.i_xy == b.i_xy);
    CHECK(a.i_xystar == b.i_xystar);
}
