#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "hbrd/errors.hpp"
#include "hbrd/prob.hpp"
#include "support.hpp"

using namespace hbrd;

namespace {

Pmf random_pmf(std::size_t a, std::size_t b, std::size_t c, std::mt19937_64& rng) {
    return Pmf({Axis("A", a), Axis("B", b), Axis("C", c)}, testing::random_simplex(a * b * c, rng));
}

// Entropy of a keyed histogram, computed without the library.
double entropy_by_keys(const Pmf& p, const std::function<std::size_t(std::size_t)>& key) {
    std::map<std::size_t, double> mass;
    for (std::size_t i = 0; i < p.cell_count(); ++i) mass[key(i)] += p.probs()[i];
    double h = 0.0;
    for (auto& [k, m] : mass)
        if (m > 0) h -= m * std::log2(m);
    return h;
}

}  // namespace

TEST_CASE("pmf validation") {
    CHECK_THROWS_AS(Alphabet(0), DomainError);
    CHECK_THROWS_AS(Pmf({Axis("A", 2)}, {0.5, 0.4}), DomainError);
    CHECK_THROWS_AS(Pmf({Axis("A", 2)}, {1.5, -0.5}), DomainError);
    CHECK_THROWS_AS(Pmf({Axis("A", 2)}, {1.0}), DomainError);
    CHECK_THROWS_AS(Pmf({Axis("A", 1), Axis("A", 1)}, {1.0}), DomainError);
    CHECK_NOTHROW(Pmf({Axis("A", 2)}, {0.25, 0.75}));
}

TEST_CASE("marginalize") {
    const Pmf u({Axis("A", 2), Axis("B", 2)}, {0.25, 0.25, 0.25, 0.25});
    const Pmf a = marginalize(u, {"A"});
    CHECK(a.rank() == 1);
    CHECK(a.probs()[0] == doctest::Approx(0.5));

    const Pmf single({Axis("A", 3)}, {0.2, 0.3, 0.5});
    CHECK(marginalize(single, {"A"}).probs()[2] == 0.5);

    CHECK_THROWS_AS(marginalize(u, {"Z"}), DomainError);

    // Keeps the original axis order regardless of the order requested.
    std::mt19937_64 rng(3);
    const Pmf p = random_pmf(2, 3, 2, rng);
    const Pmf m = marginalize(p, {"C", "A"});
    REQUIRE(m.axes()[0].name == "A");
    for (std::size_t a0 = 0; a0 < 2; ++a0)
        for (std::size_t c0 = 0; c0 < 2; ++c0) {
            double s = 0.0;
            for (std::size_t b0 = 0; b0 < 3; ++b0) s += p.at({a0, b0, c0});
            CHECK(m.at({a0, c0}) == doctest::Approx(s).epsilon(1e-14));
        }
}

TEST_CASE("example 1 source marginals and measures") {
    const Pmf src = testing::example1_source().pmf();
    const Pmf s1 = marginalize(src, {"S1"});
    for (double v : s1.probs()) CHECK(v == doctest::Approx(0.25));
    CHECK(entropy(src, {"S2"}, {"Y1"}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(entropy(src, {"S1", "S2"}) == doctest::Approx(4.0));
    CHECK(entropy(src, {"S1", "S2"}, {"Y1"}) == doctest::Approx(1.0));
    CHECK(entropy(src, {"S1", "S2"}, {"Y2"}) == doctest::Approx(3.0));
}

TEST_CASE("entropy and mutual information basics") {
    const Pmf coin({Axis("A", 2)}, {0.5, 0.5});
    CHECK(entropy(coin, {"A"}) == doctest::Approx(1.0));
    const Pmf point({Axis("A", 3), Axis("B", 2)}, {0, 0, 0, 1, 0, 0});
    CHECK(entropy(point, {"A"}) == 0.0);
    CHECK(entropy(point, {"A"}, {"B"}) == 0.0);
    const Pmf indep({Axis("A", 2), Axis("B", 2)}, {0.25, 0.25, 0.25, 0.25});
    CHECK(mutual_information(indep, {"A"}, {"B"}) == doctest::Approx(0.0));
    const Pmf copy({Axis("A", 2), Axis("B", 2)}, {0.5, 0, 0, 0.5});
    CHECK(mutual_information(copy, {"A"}, {"B"}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(entropy(copy, {"A"}, {"A"}), DomainError);
    CHECK_THROWS_AS(mutual_information(copy, {"A"}, {"A", "B"}), DomainError);
}

TEST_CASE("entropy matches a direct histogram oracle") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const Pmf p = random_pmf(3, 2, 4, rng);
        // cell index i = (a*2 + b)*4 + c
        const double h_ab = entropy_by_keys(p, [](std::size_t i) { return i / 4; });
        const double h_b = entropy_by_keys(p, [](std::size_t i) { return (i / 4) % 2; });
        const double h_bc = entropy_by_keys(p, [](std::size_t i) { return ((i / 4) % 2) * 4 + i % 4; });
        const double h_all = entropy_by_keys(p, [](std::size_t i) { return i; });
        const double h_c = entropy_by_keys(p, [](std::size_t i) { return i % 4; });
        CHECK(entropy(p, {"A"}, {"B"}) == doctest::Approx(h_ab - h_b).epsilon(1e-12));
        CHECK(entropy(p, {"B", "A"}) == doctest::Approx(h_ab).epsilon(1e-12));
        CHECK(mutual_information(p, {"A"}, {"C"}, {"B"}) ==
              doctest::Approx(h_ab + h_bc - h_all - h_b).epsilon(1e-12));
        CHECK(mutual_information(p, {"C"}, {"A", "B"}) == doctest::Approx(h_c + h_ab - h_all).epsilon(1e-12));
    }
}

TEST_CASE("information identities on random pmfs") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        std::uniform_int_distribution<std::size_t> card(1, 4);
        const Pmf p = random_pmf(card(rng), card(rng), card(rng), rng);
        const double chain = entropy(p, {"A"}, {"C"}) + entropy(p, {"B"}, {"A", "C"});
        CHECK(std::abs(entropy(p, {"A", "B"}, {"C"}) - chain) < 1e-10);
        CHECK(entropy(p, {"A"}, {"B", "C"}) <= entropy(p, {"A"}, {"C"}) + 1e-10);
        CHECK(entropy(p, {"A", "C"}) >= 0.0);
        CHECK(mutual_information(p, {"A"}, {"B"}, {"C"}) >= 0.0);
        const Pmf m = marginalize(p, {"A", "C"});
        CHECK(std::abs(entropy(m, {"A"}, {"C"}) - entropy(p, {"A"}, {"C"})) < 1e-12);
    }
}

TEST_CASE("condpmf rows") {
    CHECK_THROWS_AS(CondPmf({Axis("G", 2)}, {Axis("O", 2)}, {0.5, 0.5, 0.3, 0.6}), DomainError);
    const CondPmf c({Axis("G", 2)}, {Axis("O", 2)}, {0.5, 0.5, 0.25, 0.75});
    CHECK(c.at(1, 1) == 0.75);
    CHECK(c.row(0).size() == 2);
}

TEST_CASE("reordering preserves every cell") {
    std::mt19937_64 rng(9);
    const Pmf p = random_pmf(2, 3, 4, rng);
    const Pmf r = p.reordered({"C", "A", "B"});
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t c = 0; c < 4; ++c) CHECK(r.at({c, a, b}) == p.at({a, b, c}));
}
