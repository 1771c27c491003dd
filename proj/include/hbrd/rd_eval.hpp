#pragma once

// Rate expressions evaluated at a fixed auxiliary channel.

#include <optional>
#include <utility>

#include "hbrd/model.hpp"
#include "hbrd/prob.hpp"

namespace hbrd {

/// Slack allowed when comparing a realized distortion against its target.
inline constexpr double kDistortionSlack = 1e-12;

/// rate = max(term_decoder1, term_decoder2) + individual_layer.
struct RateBreakdown {
    double rate = 0.0;
    double term_decoder1 = 0.0;
    double term_decoder2 = 0.0;
    double individual_layer = 0.0;
    double distortion1 = 0.0;
    std::optional<double> distortion2;
    bool feasible = false;
};

/// One-distortion rate in the common/individual split:
/// terms I(U0 S2; S1 S2 | Yj), layer I(U1; S1 | U0 S2 Y1).
RateBreakdown eval_theorem1(const JointSourcePmf& source, const AuxChannel& channel,
                            const DistortionTable& d1, double D1);

/// The same rate computed two ways: {per-decoder sums, common max + layer}.
std::pair<double, double> eval_theorem1_forms(const JointSourcePmf& source, const AuxChannel& channel);

/// Lossless rate for a channel P(U0 | S1, S2); the channel must have |U1| = 1.
double eval_corollary1(const JointSourcePmf& source, const AuxChannel& channel);

/// Common-reconstruction rate: terms I(U0 S2hat; S1 S2 | Yj), layer I(U1; S1 S2 | Y1 S2hat U0).
RateBreakdown eval_theorem3(const JointSourcePmf& source, const AuxChannel& channel,
                            const DistortionTable& d1, const DistortionTable& d2, double D1, double D2);

struct PointRate {
    double rate = 0.0;
    double distortion = 0.0;
    bool feasible = false;
};

/// Single-decoder side-information rate I(V; S | Y) with decoder estimate phi(V, Y).
/// `source` has axes (S, Y); `channel` is P(V | S).
PointRate eval_wyner_ziv(const Pmf& source, const CondPmf& channel, const DistortionTable& d, double D);

/// Single-decoder common-reconstruction rate I(Shat; S | Y); the estimate ignores Y.
/// `source` has axes (S, Y); `channel` is P(Shat | S).
PointRate eval_common_reconstruction(const Pmf& source, const CondPmf& channel, const DistortionTable& d,
                                     double D);

}  // namespace hbrd
