#include <doctest.h>

#include <cmath>
#include <random>

#include "hbrd/errors.hpp"
#include "hbrd/model.hpp"
#include "support.hpp"

using namespace hbrd;
using testing::random_channel;
using testing::random_source;

TEST_CASE("source and channel validation") {
    CHECK_THROWS_AS(JointSourcePmf(Pmf({Axis("S1", 2), Axis("S2", 1), Axis("Y2", 1), Axis("Y1", 1)}, {0.5, 0.5})),
                    DomainError);
    CHECK_THROWS_AS(DistortionTable(2, 2, {0, 1, -1, 0}), DomainError);
    CHECK_THROWS_AS(AuxChannel::one_distortion(2, 2, 2, 1, {1, 0, 1, 0, 1, 0}), DomainError);
    CHECK(DistortionTable::hamming(3)(2, 1) == 1.0);
    CHECK(DistortionTable::hamming(3)(2, 2) == 0.0);
}

TEST_CASE("compose keeps the source marginal and the Markov chain") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const auto src = random_source(2, 3, 2, 2, rng);
        const auto ch = random_channel(t % 2 ? ChannelKind::CommonReconstruction : ChannelKind::OneDistortion, 2,
                                       3, 2, 3, 2, rng);
        const FullJoint j = compose(src, ch);
        const Pmf m = marginalize(j.pmf(), {"S1", "S2", "Y1", "Y2"});
        for (std::size_t i = 0; i < m.cell_count(); ++i)
            CHECK(std::abs(m.probs()[i] - src.pmf().probs()[i]) < 1e-12);
        Labels u = {"U0", "U1"};
        if (ch.kind() == ChannelKind::CommonReconstruction) u.push_back("S2hat");
        CHECK(mutual_information(j.pmf(), u, {"Y1", "Y2"}, {"S1", "S2"}) < 1e-10);
    }
}

TEST_CASE("compose corner cases") {
    const auto src = testing::example1_source();
    const auto constant = testing::example1_channel(1, 1, [](auto) { return 0; }, [](auto) { return 0; });
    const Pmf m = marginalize(compose(src, constant).pmf(), {"S1", "S2", "Y1", "Y2"});
    for (std::size_t i = 0; i < m.cell_count(); ++i) CHECK(m.probs()[i] == src.pmf().probs()[i]);

    const auto copy = testing::example1_channel(4, 1, [](auto s) { return s; }, [](auto) { return 0; });
    const Pmf us = marginalize(compose(src, copy).pmf(), {"U0", "S1"});
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) CHECK(us.at({a, b}) == (a == b ? 0.25 : 0.0));

    const auto x3 = testing::example1_channel(2, 1, testing::x3_of, [](auto) { return 0; });
    CHECK(mutual_information(compose(src, x3).pmf(), {"U0"}, {"Y2"}) == doctest::Approx(1.0));

    const auto wrong = AuxChannel::one_distortion(2, 2, 1, 1, {1, 1, 1, 1});
    CHECK_THROWS_AS(compose(src, wrong), DomainError);
}

TEST_CASE("optimal phi basics") {
    const auto src = testing::example1_source();
    const auto d1 = DistortionTable::hamming(4);
    const auto copy = testing::example1_channel(1, 4, [](auto) { return 0; }, [](auto s) { return s; });
    CHECK(optimal_phi(compose(src, copy), d1).distortion == 0.0);

    // S1 a fair bit independent of everything the decoder sees.
    std::vector<double> p(16, 0.0);
    for (unsigned a = 0; a < 2; ++a)
        for (unsigned b = 0; b < 2; ++b) p[((a * 2 + b) * 2 + 0) * 2 + 0] = 0.25;
    const JointSourcePmf coin(2, 2, 2, 2, p);
    const auto constant = AuxChannel::one_distortion(2, 2, 1, 1, {1, 1, 1, 1});
    const PhiResult r = optimal_phi(compose(coin, constant), DistortionTable::hamming(2));
    CHECK(r.distortion == doctest::Approx(0.5));
    for (auto v : r.map.table()) CHECK(v == 0);
}

TEST_CASE("optimal phi beats every map on tiny instances") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        const auto src = random_source(2, 2, 2, 1, rng);
        const auto ch = random_channel(ChannelKind::OneDistortion, 2, 2, 2, 1, 1, rng);
        const auto d1 = DistortionTable(2, 2, testing::random_simplex(4, rng));
        const FullJoint j = compose(src, ch);
        const PhiResult best = optimal_phi(j, d1);
        // Exhaustive over all 2^(2*1*2*2) maps indexed (u0,u1,s2,y1).
        double brute = 1e300;
        for (unsigned mask = 0; mask < 256; ++mask) {
            std::vector<std::size_t> table(8);
            for (unsigned k = 0; k < 8; ++k) table[k] = mask >> k & 1;
            brute = std::min(brute, expected_d1(j, d1, ReconstructionMap({2, 1, 2, 2}, table)));
        }
        CHECK(best.distortion == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("optimal phi against random maps and relabelings") {
    std::mt19937_64 rng(13);
    const auto src = random_source(3, 2, 2, 2, rng);
    const auto d1 = DistortionTable(3, 3, testing::random_simplex(9, rng));
    const auto ch = random_channel(ChannelKind::OneDistortion, 3, 2, 3, 2, 1, rng);
    const FullJoint j = compose(src, ch);
    const double best = optimal_phi(j, d1).distortion;
    std::uniform_int_distribution<std::size_t> sym(0, 2);
    for (int k = 0; k < 100; ++k) {
        std::vector<std::size_t> table(3 * 2 * 2 * 2);
        for (auto& v : table) v = sym(rng);
        CHECK(best <= expected_d1(j, d1, ReconstructionMap({3, 2, 2, 2}, table)) + 1e-15);
    }
    // Swap U0 symbols 0 and 2.
    std::vector<double> swapped(ch.cond().probs().begin(), ch.cond().probs().end());
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t u1 = 0; u1 < 2; ++u1) std::swap(swapped[c * 6 + 0 * 2 + u1], swapped[c * 6 + 2 * 2 + u1]);
    const auto relabeled = AuxChannel::one_distortion(3, 2, 3, 2, swapped);
    CHECK(optimal_phi(compose(src, relabeled), d1).distortion == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("expected d2") {
    const auto src = testing::comp_delivery_source();
    const auto copy = AuxChannel::deterministic(ChannelKind::CommonReconstruction, 2, 2, 1, 1, 2,
                                                [](std::size_t, std::size_t s2) -> AuxChannel::Outputs {
                                                    return {0, 0, s2};
                                                });
    CHECK(expected_d2(compose(src, copy), DistortionTable::hamming(2)) == 0.0);
    const auto indep = AuxChannel::common_reconstruction(2, 2, 1, 1, 2, std::vector<double>(8, 0.5));
    CHECK(expected_d2(compose(src, indep), DistortionTable::hamming(2)) == doctest::Approx(0.5));
    const auto one = AuxChannel::one_distortion(2, 2, 1, 1, {1, 1, 1, 1});
    CHECK_THROWS_AS(expected_d2(compose(src, one), DistortionTable::hamming(2)), DomainError);

    std::mt19937_64 rng(4);
    const auto s = random_source(2, 3, 2, 2, rng);
    const auto ch = random_channel(ChannelKind::CommonReconstruction, 2, 3, 1, 1, 2, rng);
    const DistortionTable d2(3, 2, testing::random_simplex(6, rng));
    double direct = 0.0;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t h = 0; h < 2; ++h) {
                double ps = 0.0;
                for (std::size_t y = 0; y < 4; ++y) ps += s.pmf().probs()[(a * 3 + b) * 4 + y];
                direct += ps * ch.at(a, b, h) * d2(b, h);
            }
    CHECK(expected_d2(compose(s, ch), d2) == doctest::Approx(direct).epsilon(1e-12));
}
