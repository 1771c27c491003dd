#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hbrd/errors.hpp"
#include "hbrd/rate_region.hpp"
#include "support.hpp"

using namespace hbrd;

TEST_CASE("scheme rates validation") {
    CHECK_NOTHROW((SchemeRates{1, 1, 0.5, 1, 1}.validate()));
    CHECK_THROWS_AS((SchemeRates{1, 0.5, 1, 0, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SchemeRates{1, 0, 0, 0.5, 1}.validate()), DomainError);
    CHECK_THROWS_AS((SchemeRates{-0.1, 0, 0, 0, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SchemeRates{NAN, 0, 0, 0, 0}.validate()), DomainError);
    CHECK(SchemeRates{1, 2, 0.5, 3, 0.25}.total() == doctest::Approx(1.75));
}

TEST_CASE("example 1 single-letter quantities with U0 = X3") {
    const auto src = testing::example1_source();
    const auto ch = testing::example1_channel(2, 1, testing::x3_of, [](std::size_t) { return std::size_t{0}; });
    const SingleLetter q = single_letter(src, ch);
    CHECK(q.i_u0_s1_g_s2 == doctest::Approx(1.0));
    CHECK(q.i_u0_y2_g_s2 == doctest::Approx(1.0));
    CHECK(q.i_u0_y1_g_s2 == doctest::Approx(0.0));
    CHECK(q.h_s2_g_y1 == doctest::Approx(0.0));
    CHECK(q.h_s2_g_y2 == doctest::Approx(2.0));
    CHECK(lp_min_total_rate(q) == doctest::Approx(2.0).epsilon(1e-12));

    const SchemeRates r = rates_with_margin(q, 0.5, false);
    CHECK(r.R0 == doctest::Approx(1.5));
    CHECK(r.R0p == doctest::Approx(1.5));
    CHECK(r.R2 == doctest::Approx(1.5));
    CHECK(r.total() == doctest::Approx(3.0));
    CHECK(violated_constraints(q, r).empty());
}

TEST_CASE("violations are named") {
    const auto src = testing::example1_source();
    const auto ch = testing::example1_channel(2, 1, testing::x3_of, [](std::size_t) { return std::size_t{0}; });
    const SingleLetter q = single_letter(src, ch);
    SchemeRates r = rates_with_margin(q, 0.5, false);
    r.R0 = r.R0p = 0.5;
    const auto v = violated_constraints(q, r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("cover U0") != std::string::npos);

    r = rates_with_margin(q, 0.5, false);
    r.R2 = 0.9;
    const auto w = violated_constraints(q, r);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("decoder 2 joint") != std::string::npos);
}

TEST_CASE("LP minimum equals the eliminated expression on random channels") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 30; ++k) {
        const auto src = testing::random_source(2, 3, 2, 2, rng);
        const auto ch = testing::random_channel(ChannelKind::OneDistortion, 2, 3, 3, 2, 1, rng);
        const SingleLetter q = single_letter(src, ch);
        const double direct = testing::eliminated_from_joint(src, ch);
        CHECK(lp_min_total_rate(q) == doctest::Approx(direct).epsilon(1e-9));
        CHECK(eliminated_total_rate(q) == doctest::Approx(direct).epsilon(1e-9));

        const SchemeRates tight = rates_with_margin(q, 0.0, true);
        CHECK(tight.total() == doctest::Approx(direct).epsilon(1e-9));
        CHECK(violated_constraints(q, tight, 1e-9).empty());
        const SchemeRates loose = rates_with_margin(q, 0.5, true);
        CHECK(violated_constraints(q, loose).empty());
        CHECK(loose.total() >= direct);
    }
}

TEST_CASE("no feasible point beats the LP minimum") {
    std::mt19937_64 rng(12);
    const auto src = testing::random_source(2, 2, 2, 2, rng);
    const auto ch = testing::random_channel(ChannelKind::OneDistortion, 2, 2, 2, 2, 1, rng);
    const SingleLetter q = single_letter(src, ch);
    const double lp = lp_min_total_rate(q);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    int feasible = 0;
    for (int k = 0; k < 20000; ++k) {
        SchemeRates r{u(rng), u(rng), 0, u(rng), 0};
        // gaps up to 20% past what the decoders can resolve
        const double g0 = 1.2 * std::min(q.i_u0_y1_g_s2, q.i_u0_y2_g_s2), g1 = 1.2 * q.i_u1_y1_g_u0s2;
        r.R0p = std::max(r.R0 - std::uniform_real_distribution<double>(0.0, g0)(rng), 0.0);
        r.R1p = std::max(r.R1 - std::uniform_real_distribution<double>(0.0, g1)(rng), 0.0);
        if (!violated_constraints(q, r).empty()) continue;
        ++feasible;
        CHECK(r.total() >= lp - 1e-12);
    }
    CHECK(feasible > 100);
}
