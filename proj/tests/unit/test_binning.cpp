#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "hbrd/binning.hpp"
#include "hbrd/errors.hpp"
#include "support.hpp"

using namespace hbrd;

namespace {

std::size_t zero(std::size_t) { return 0; }

BinningScheme example1_scheme(std::size_t u0_card, std::size_t (*u0)(std::size_t), std::size_t u1_card,
                              std::size_t (*u1)(std::size_t), double epsilon = 0.2) {
    return BinningScheme(testing::example1_source(), testing::example1_channel(u0_card, u1_card, u0, u1),
                         DistortionTable::hamming(4), epsilon);
}

// S2 uniform on {0,1,2}, Y2 = S2, S1 a noisy copy of S2, Y1 = S1.
JointSourcePmf genie_source() {
    std::vector<double> p(2 * 3 * 2 * 3, 0.0);
    for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t a = 0; a < 2; ++a) p[((a * 3 + b) * 2 + a) * 3 + b] = (a == (b & 1) ? 0.8 : 0.2) / 3;
    return JointSourcePmf(2, 3, 2, 3, std::move(p));
}

AuxChannel constant_channel(std::size_t s1, std::size_t s2) {
    return AuxChannel::deterministic(ChannelKind::OneDistortion, s1, s2, 1, 1, 1,
                                     [](std::size_t, std::size_t) -> AuxChannel::Outputs { return {0, 0, 0}; });
}

}  // namespace

TEST_CASE("typicality test") {
    const TypicalityTest t({0.5, 0.3, 0.2, 0.0}, 0.15);
    const std::uint32_t good[] = {0, 0, 0, 1, 1, 2, 0, 1, 2, 0};
    CHECK(t(good, 10));
    const std::uint32_t zero_cell[] = {0, 0, 0, 1, 1, 2, 0, 1, 2, 3};
    CHECK_FALSE(t(zero_cell, 10));
    const std::uint32_t skewed[] = {0, 0, 0, 0, 0, 0, 0, 0, 1, 2};
    CHECK_FALSE(t(skewed, 10));
    // cell 0 has probability above epsilon, so it must occur
    const std::uint32_t missing[] = {1, 1, 1, 2, 2};
    CHECK_FALSE(t(missing, 5));
    // with epsilon 0.2 cell 2 no longer has to occur
    const TypicalityTest loose({0.5, 0.3, 0.2, 0.0}, 0.2);
    const std::uint32_t no_rare[] = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(loose(no_rare, 10));
    CHECK_FALSE(t(no_rare, 10));
    CHECK(t.in_support(2));
    CHECK_FALSE(t.in_support(3));
    // counters are reset between calls
    CHECK(t(good, 10));
}

TEST_CASE("index widths are ceil(nR) and total rate is their sum over n") {
    const SchemeRates r{1.5, 1.25, 0.3, 0.7, 0.2};
    const IndexWidths w = IndexWidths::from(r, 8);
    CHECK(w.w2 == 12);
    CHECK(w.w0 == 10);
    CHECK(w.w0p == 3);
    CHECK(w.w1 == 6);
    CHECK(w.w1p == 2);
    CHECK(w.total_rate(8) == doctest::Approx(17.0 / 8));
    const IndexWidths z = IndexWidths::from(SchemeRates{}, 12);
    CHECK(z.total_rate(12) == 0.0);
}

TEST_CASE("S2 bins partition the sequence space") {
    const BinningScheme sc(genie_source(), constant_channel(2, 3), DistortionTable::hamming(2), 0.2);
    for (unsigned w2 : {0u, 3u, 5u, 8u, 9u}) {
        IndexWidths w;
        w.w2 = w2;
        const Codebooks cb(sc, 5, w, 77);
        std::set<std::uint64_t> seen;
        std::uint64_t min_size = UINT64_MAX, max_size = 0;
        for (std::uint64_t bin = 0; bin < (std::uint64_t{1} << w2); ++bin) {
            std::uint64_t size = 0;
            for (std::uint64_t k = 0; k < cb.s2_bin_size(); ++k) {
                const auto idx = cb.s2_bin_member(bin, k);
                if (!idx) break;
                CHECK(cb.s2_bin(*idx) == bin);
                seen.insert(*idx);
                ++size;
            }
            min_size = std::min(min_size, size);
            max_size = std::max(max_size, size);
        }
        CHECK(seen.size() == 243);
        CHECK(*seen.rbegin() == 242);
        CHECK(max_size - min_size <= 1);
        CHECK(max_size == cb.s2_bin_size());
    }
    IndexWidths w;
    const Codebooks cb(sc, 5, w, 77);
    for (std::uint64_t i = 0; i < 243; ++i) CHECK(cb.s2_index(cb.s2_sequence(i)) == i);
}

TEST_CASE("codeword symbols follow the channel-induced conditional") {
    // U0 = X3 given S2 is a fair bit independent of S2; check frequencies within 4 sigma
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    IndexWidths w;
    w.w0 = 12;
    const Codebooks cb(sc, 6, w, 5);
    const Sequence s2 = {0, 1, 2, 3, 0, 1};
    Sequence u0;
    std::uint64_t ones = 0, total = 0;
    for (std::uint64_t w0 = 0; w0 < cb.u0_count(); ++w0) {
        cb.u0_codeword(cb.s2_index(s2), s2, w0, u0);
        for (auto v : u0) ones += v;
        total += u0.size();
    }
    const double sigma = std::sqrt(0.25 / total);
    CHECK(std::abs(double(ones) / total - 0.5) < 4 * sigma);

    // a skewed conditional: P(U0=1|S2) = 0.8 for the genie source's noisy copy
    const auto genie = genie_source();
    const auto copy = AuxChannel::deterministic(ChannelKind::OneDistortion, 2, 3, 2, 1, 1,
                                                [](std::size_t a, std::size_t) -> AuxChannel::Outputs {
                                                    return {a, 0, 0};
                                                });
    const BinningScheme sk(genie, copy, DistortionTable::hamming(2), 0.2);
    const Codebooks cb2(sk, 4, w, 6);
    const Sequence odd = {1, 1, 1, 1};
    ones = total = 0;
    for (std::uint64_t w0 = 0; w0 < cb2.u0_count(); ++w0) {
        cb2.u0_codeword(cb2.s2_index(odd), odd, w0, u0);
        for (auto v : u0) ones += v;
        total += u0.size();
    }
    CHECK(std::abs(double(ones) / total - 0.8) < 4 * std::sqrt(0.16 / total));
}

TEST_CASE("deterministic source with copy channels encodes at the first index") {
    // S1 = S2 = Y1 = Y2 = 0 always; U0 = U1 = 0
    std::vector<double> p(2 * 2 * 2 * 2, 0.0);
    p[0] = 1.0;
    const BinningScheme sc(JointSourcePmf(2, 2, 2, 2, p), constant_channel(2, 2), DistortionTable::hamming(2), 0.2);
    const auto cb = generate_codebooks(sc, 2, SchemeRates{1, 1, 1, 1, 1}, 3);
    const EncodeResult e = encode(cb, {0, 0}, {0, 0});
    REQUIRE_FALSE(e.failure);
    CHECK(e.w0 == 0);
    CHECK(e.w1 == 0);
    const auto d1 = decode1(cb, e.w2, e.w0p, e.w1p, {0, 0});
    REQUIRE_FALSE(d1.error);
    CHECK(d1.s1hat == Sequence{0, 0});
}

TEST_CASE("non-typical S2 is an encode failure") {
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    const auto cb = generate_codebooks(sc, 8, SchemeRates{2, 2, 2, 0, 0}, 1);
    const EncodeResult e = encode(cb, Sequence(8, 0), Sequence(8, 0));
    REQUIRE(e.failure);
    CHECK(*e.failure == EncodeFailure::NonTypicalS2);
}

TEST_CASE("genie bins: Y2 = S2 with singleton bins never misdecodes S2") {
    const BinningScheme sc(genie_source(), constant_channel(2, 3), DistortionTable::hamming(2), 0.25);
    SimulationOptions o;
    o.trials = 2000;
    const TrialStats s = run_trials(sc, 6, SchemeRates{2, 0, 0, 0, 0}, o);
    CHECK(s.decode2_errors == 0);
    CHECK(s.errors == s.encode_failures + s.decode1_errors);
    CHECK(s.encode_failures < s.trials);
}

TEST_CASE("zero rates on a nondegenerate source give Pe near 1") {
    const BinningScheme sc = example1_scheme(1, zero, 1, zero);
    SimulationOptions o;
    o.trials = 2000;
    const TrialStats s = run_trials(sc, 6, SchemeRates{}, o);
    CHECK(s.empirical_Pe > 0.99);
}

TEST_CASE("identical seeds give identical statistics, regardless of threads") {
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    const SchemeRates r{1.5, 1.5, 1.5, 0, 0};
    SimulationOptions o;
    o.trials = 600;
    o.seed = 9;
    o.regenerate_every = 7;
    const TrialStats a = run_trials(sc, 8, r, o);
    o.threads = 3;
    const TrialStats b = run_trials(sc, 8, r, o);
    CHECK(a.errors == b.errors);
    CHECK(a.encode_failures == b.encode_failures);
    CHECK(a.decode1_errors == b.decode1_errors);
    CHECK(a.decode2_errors == b.decode2_errors);
    CHECK(a.avg_d1 == b.avg_d1);
    o.seed = 10;
    const TrialStats c = run_trials(sc, 8, r, o);
    CHECK((c.errors != a.errors || c.avg_d1 != a.avg_d1));
}

TEST_CASE("budget guards") {
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    SimulationOptions o;
    o.trials = 1;
    CHECK_THROWS_AS(run_trials(sc, 12, SchemeRates{1.5, 1.5, 0, 0, 0}, o), BudgetError);
    CHECK_THROWS_AS(run_trials(sc, 21, SchemeRates{}, o), DomainError);
    CHECK_NOTHROW(run_trials(sc, 12, SchemeRates{1.5, 1.0, 0, 0, 0}, o));
    o.candidate_budget = 1e8;
    const auto cb = generate_codebooks(sc, 12, SchemeRates{1.5, 1.5, 0, 0, 0}, 1);
    CHECK(candidate_bound(cb) == doctest::Approx(64.0 * 262144.0 * 2.0));
}

TEST_CASE("covering below I(U0;S1|S2) fails more often than above it") {
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    SimulationOptions o;
    o.trials = 2000;
    const TrialStats below = run_trials(sc, 12, SchemeRates{3, 0.5, 0.5, 0, 0}, o);
    const TrialStats above = run_trials(sc, 12, SchemeRates{3, 1.5, 1.5, 0, 0}, o);
    CHECK(below.encode_failures > above.encode_failures);
}

TEST_CASE("decoder 2 fails more often below its joint constraint than above it") {
    // U0 = X3 makes the decoder 2 joint constraint R2 + R0' - R0 >= 1
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    SimulationOptions o;
    o.trials = 2000;
    const TrialStats below = run_trials(sc, 8, SchemeRates{0.5, 1.5, 1.5, 0, 0}, o);
    const TrialStats above = run_trials(sc, 8, SchemeRates{1.5, 1.5, 1.5, 0, 0}, o);
    CHECK(below.errors > above.errors);
    CHECK(below.decode2_errors > above.decode2_errors);
}

TEST_CASE("example 1 lossless scheme: decoder 1 output equals S1 whenever it decodes") {
    // U0 = X3, U1 = X1 at the single-letter rates plus 0.5 bits, n = 8
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 2, testing::x1_of, 0.4);
    const SchemeRates r = rates_with_margin(single_letter(sc.source(), sc.channel()), 0.5, true);
    const unsigned n = 8;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int encoded = 0, decoded = 0, trials = 2000;
    for (int t = 0; t < trials; ++t) {
        const auto cb = generate_codebooks(sc, n, r, rng());
        Sequence s1(n), s2(n), y1(n), y2(n);
        for (unsigned i = 0; i < n; ++i) {
            const auto x = sc.draw_source(u(rng));
            s1[i] = x[0];
            s2[i] = x[1];
            y1[i] = x[2];
            y2[i] = x[3];
        }
        const EncodeResult e = encode(cb, s1, s2);
        if (e.failure) continue;
        ++encoded;
        const auto d1 = decode1(cb, e.w2, e.w0p, e.w1p, y1);
        if (d1.error || d1.s2 != s2) continue;
        ++decoded;
        CHECK(d1.s1hat == s1);
    }
    CHECK(encoded > 0.9 * trials);
    CHECK(decoded > 0);
}

TEST_CASE("Y2 pins U0 = X3, so decoder 2 recovers u0 whenever it recovers s2") {
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    const SchemeRates r{1.5, 1.5, 1.5, 0, 0};
    const unsigned n = 8;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int audited = 0;
    for (int t = 0; t < 500; ++t) {
        const auto cb = generate_codebooks(sc, n, r, rng());
        Sequence s1(n), s2(n), y2(n);
        for (unsigned i = 0; i < n; ++i) {
            const auto x = sc.draw_source(u(rng));
            s1[i] = x[0];
            s2[i] = x[1];
            y2[i] = x[3];
        }
        const EncodeResult e = encode(cb, s1, s2);
        if (e.failure) continue;
        const auto d2 = decode2(cb, e.w2, e.w0p, y2);
        if (d2.error || d2.s2 != s2) continue;
        ++audited;
        Sequence sent;
        cb.u0_codeword(cb.s2_index(s2), s2, e.w0, sent);
        CHECK(d2.u0 == sent);
        CHECK(d2.u0 == y2);
    }
    CHECK(audited > 0);
}

TEST_CASE("simulation trend on example 1 at margin 0.5") {
    const BinningScheme sc = example1_scheme(2, testing::x3_of, 1, zero);
    const SchemeRates r = rates_with_margin(single_letter(sc.source(), sc.channel()), 0.5, false);
    SimulationOptions o;
    o.trials = 1000;
    const TrialStats n4 = run_trials(sc, 4, r, o);
    const TrialStats n8 = run_trials(sc, 8, r, o);
    CHECK(n4.empirical_Pe > n8.empirical_Pe);
}

TEST_CASE("csv row") {
    SimulationRow row{8, 3.0, 1.5, 1.5, 0.0, 0.2, {}};
    row.stats.trials = 100;
    row.stats.empirical_Pe = 0.25;
    row.stats.avg_d1 = 0.125;
    CHECK(to_csv(row) == "8,3.000000,1.500000,1.500000,0.000000,0.2,100,0.250000,0.125000");
    CHECK(std::string(kSimulationCsvHeader).find("Pe") != std::string::npos);
}
