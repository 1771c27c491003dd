#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hbrd/model.hpp"

namespace hbrd::testing {

// Four independent fair bits X1..X4 with S1 = (X1,X3), S2 = (X2,X4), Y1 = (X1,X2,X4), Y2 = X3.
inline JointSourcePmf example1_source() {
    std::vector<double> p(4 * 4 * 8 * 2, 0.0);
    for (unsigned x = 0; x < 16; ++x) {
        const unsigned x1 = x >> 3 & 1, x2 = x >> 2 & 1, x3 = x >> 1 & 1, x4 = x & 1;
        const unsigned s1 = x1 * 2 + x3, s2 = x2 * 2 + x4, y1 = x1 * 4 + x2 * 2 + x4, y2 = x3;
        p[((s1 * 4 + s2) * 8 + y1) * 2 + y2] += 1.0 / 16;
    }
    return JointSourcePmf(4, 4, 8, 2, std::move(p));
}

// Independent fair bits S1, S2 with Y1 = S2 and Y2 = S1.
inline JointSourcePmf comp_delivery_source() {
    std::vector<double> p(16, 0.0);
    for (unsigned a = 0; a < 2; ++a)
        for (unsigned b = 0; b < 2; ++b) p[((a * 2 + b) * 2 + b) * 2 + a] = 0.25;
    return JointSourcePmf(2, 2, 2, 2, std::move(p));
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(n);
    double t = 0.0;
    for (auto& x : v) t += (x = e(rng));
    for (auto& x : v) x /= t;
    return v;
}

inline JointSourcePmf random_source(std::size_t s1, std::size_t s2, std::size_t y1, std::size_t y2,
                                    std::mt19937_64& rng) {
    return JointSourcePmf(s1, s2, y1, y2, random_simplex(s1 * s2 * y1 * y2, rng));
}

// Y2 drawn from Y1 through a random channel, so Y2 - Y1 - (S1,S2).
inline JointSourcePmf random_degraded_source(std::size_t s1, std::size_t s2, std::size_t y1, std::size_t y2,
                                             std::mt19937_64& rng) {
    const auto base = random_simplex(s1 * s2 * y1, rng);
    std::vector<std::vector<double>> ch;
    for (std::size_t a = 0; a < y1; ++a) ch.push_back(random_simplex(y2, rng));
    std::vector<double> p(s1 * s2 * y1 * y2);
    for (std::size_t i = 0; i < s1 * s2 * y1; ++i)
        for (std::size_t b = 0; b < y2; ++b) p[i * y2 + b] = base[i] * ch[i % y1][b];
    return JointSourcePmf(s1, s2, y1, y2, std::move(p));
}

inline AuxChannel random_channel(ChannelKind kind, std::size_t s1, std::size_t s2, std::size_t u0,
                                 std::size_t u1, std::size_t hat, std::mt19937_64& rng) {
    const std::size_t outs = u0 * u1 * (kind == ChannelKind::CommonReconstruction ? hat : 1);
    std::vector<double> probs;
    for (std::size_t c = 0; c < s1 * s2; ++c) {
        const auto row = random_simplex(outs, rng);
        probs.insert(probs.end(), row.begin(), row.end());
    }
    if (kind == ChannelKind::CommonReconstruction)
        return AuxChannel::common_reconstruction(s1, s2, u0, u1, hat, std::move(probs));
    return AuxChannel::one_distortion(s1, s2, u0, u1, std::move(probs));
}

// Example 1 channels over (U0, U1); u0 and u1 are functions of the S1 symbol (x1, x3).
inline AuxChannel example1_channel(std::size_t u0_card, std::size_t u1_card,
                                   const std::function<std::size_t(std::size_t)>& u0,
                                   const std::function<std::size_t(std::size_t)>& u1) {
    return AuxChannel::deterministic(ChannelKind::OneDistortion, 4, 4, u0_card, u1_card, 1,
                                     [&](std::size_t s1, std::size_t) -> AuxChannel::Outputs {
                                         return {u0(s1), u1(s1), 0};
                                     });
}

// max_j { I(U0; S1 | S2 Yj) + H(S2 | Yj) } + I(U1; S1 | U0 S2 Y1), straight from the composed joint.
inline double eliminated_from_joint(const JointSourcePmf& source, const AuxChannel& channel) {
    using namespace axis;
    const Pmf p = compose(source, channel).pmf();
    const double d1 = mutual_information(p, {U0}, {S1}, {S2, Y1}) + entropy(p, {S2}, {Y1});
    const double d2 = mutual_information(p, {U0}, {S1}, {S2, Y2}) + entropy(p, {S2}, {Y2});
    return std::max(d1, d2) + mutual_information(p, {U1}, {S1}, {U0, S2, Y1});
}

inline std::size_t x1_of(std::size_t s1) { return s1 >> 1; }
inline std::size_t x3_of(std::size_t s1) { return s1 & 1; }

}  // namespace hbrd::testing
