#include <doctest.h>

#include <cmath>

#include "nkma/rng.hpp"
#include "nkma/stats.hpp"

using namespace nkma;

TEST_CASE("mid_ranks: ties share the average rank") {
    const auto ranks = stats::mid_ranks({3.0, 1.0, 3.0, 2.0});
    CHECK(ranks[0] == 3.5);
    CHECK(ranks[1] == 1.0);
    CHECK(ranks[2] == 3.5);
    CHECK(ranks[3] == 2.0);
}

TEST_CASE("dunn_holm: two identical groups give p = 1") {
    const auto pairs =
        stats::dunn_holm({{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].p_raw == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pairs[0].p_adjusted == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dunn_holm: all-equal samples degenerate to p = 1") {
    const auto pairs =
        stats::dunn_holm({{5.0, 5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}});
    for (const auto& pair : pairs) {
        CHECK(pair.p_raw == 1.0);
        CHECK(pair.p_adjusted == 1.0);
    }
}

TEST_CASE("dunn_holm: three separated groups match the manual computation") {
    // Ranks are 1..9 with no ties; z and p computed by hand from the Dunn
    // formula before implementation and frozen here.
    const auto pairs = stats::dunn_holm(
        {{1.0, 2.0, 3.0}, {101.0, 102.0, 103.0}, {201.0, 202.0, 203.0}});
    REQUIRE(pairs.size() == 3);
    auto find_pair = [&](std::size_t a, std::size_t b) {
        for (const auto& p : pairs) {
            if (p.group_a == a && p.group_b == b) return p;
        }
        FAIL("pair not found");
        return pairs[0];
    };
    const auto p01 = find_pair(0, 1);
    const auto p02 = find_pair(0, 2);
    const auto p12 = find_pair(1, 2);
    CHECK(p01.z == doctest::Approx(1.34164078649987).epsilon(1e-10));
    CHECK(p02.z == doctest::Approx(2.68328157299975).epsilon(1e-10));
    CHECK(p12.z == doctest::Approx(1.34164078649987).epsilon(1e-10));
    CHECK(p01.p_raw == doctest::Approx(0.179712494879).epsilon(1e-9));
    CHECK(p02.p_raw == doctest::Approx(0.00729035809153564).epsilon(1e-9));
    CHECK(p01.p_adjusted == doctest::Approx(0.359424989758).epsilon(1e-9));
    CHECK(p02.p_adjusted ==
          doctest::Approx(0.0218710742746069).epsilon(1e-9));
    CHECK(p12.p_adjusted == doctest::Approx(0.359424989758).epsilon(1e-9));
}

TEST_CASE("dunn_holm: reference mode compares only against the reference") {
    const auto pairs = stats::dunn_holm(
        {{1.0, 2.0, 3.0}, {101.0, 102.0, 103.0}, {201.0, 202.0, 203.0}}, 0);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].group_a == 0);
    CHECK(pairs[1].group_a == 0);
    // Holm over two pairs only: smaller p doubled, larger kept
    CHECK(pairs[1].p_adjusted ==
          doctest::Approx(2.0 * 0.00729035809153564).epsilon(1e-9));
}

TEST_CASE("dunn_holm: rejects undersized input") {
    CHECK_THROWS(stats::dunn_holm({{1.0, 2.0}}));
    CHECK_THROWS(stats::dunn_holm({{1.0}, {2.0, 3.0}}));
    CHECK_THROWS(stats::dunn_holm({{1.0, 2.0}, {2.0, 3.0}}, 5));
}

TEST_CASE("holm_adjust: worked example") {
    const auto adjusted = stats::holm_adjust({0.01, 0.04});
    CHECK(adjusted[0] == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(adjusted[1] == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("holm_adjust: monotone and >= raw on random p-vectors") {
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.index(8);
        std::vector<double> raw(m);
        for (double& p : raw) p = rng.unit_real();
        const auto adjusted = stats::holm_adjust(raw);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(adjusted[i] >= raw[i]);
            CHECK(adjusted[i] <= 1.0);
        }
        // step-down ordering: sort raw ascending, adjusted must follow
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return raw[a] < raw[b];
        });
        for (std::size_t i = 1; i < m; ++i) {
            CHECK(adjusted[order[i]] >= adjusted[order[i - 1]]);
        }
    }
}

TEST_CASE("significance_stars: exact thresholds") {
    CHECK(stats::significance_stars(0.0005) == "***");
    CHECK(stats::significance_stars(0.001) == "**");
    CHECK(stats::significance_stars(0.009) == "**");
    CHECK(stats::significance_stars(0.01) == "*");
    CHECK(stats::significance_stars(0.049) == "*");
    CHECK(stats::significance_stars(0.05) == "");
    CHECK(stats::significance_stars(0.5) == "");
}

TEST_CASE("kruskal_wallis: separated groups are significant") {
    const auto result = stats::kruskal_wallis(
        {{1.0, 2.0, 3.0, 4.0, 5.0}, {101.0, 102.0, 103.0, 104.0, 105.0}});
    CHECK(result.p_value < 0.05);
    const auto same = stats::kruskal_wallis(
        {{1.0, 2.0, 3.0, 4.0, 5.0}, {1.0, 2.0, 3.0, 4.0, 5.0}});
    CHECK(same.p_value > 0.5);
}

TEST_CASE("normal_sf and chi_square_sf sanity") {
    CHECK(stats::normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stats::normal_sf(1.959963984540054) ==
          doctest::Approx(0.025).epsilon(1e-9));
    // chi-square with 2 dof is exponential(1/2)
    CHECK(stats::chi_square_sf(2.0, 2.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}
