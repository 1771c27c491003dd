#include "hbrd/rd_eval.hpp"

#include <algorithm>
#include <limits>

#include "hbrd/errors.hpp"

namespace hbrd {

using namespace axis;

namespace {

// I(a; b | given) where a and b may share axes: H(b | given) - H(b \ a | a, given).
double overlapping_information(const Pmf& p, const Labels& a, const Labels& b, const Labels& given) {
    Labels cond = a;
    cond.insert(cond.end(), given.begin(), given.end());
    Labels rest;
    for (const auto& l : b)
        if (std::find(cond.begin(), cond.end(), l) == cond.end()) rest.push_back(l);
    return std::max(entropy(p, b, given) - entropy(p, rest, cond), 0.0);
}

void require_kind(const AuxChannel& channel, ChannelKind kind, const char* who) {
    if (channel.kind() != kind)
        throw DomainError(std::string(who) + " requires a " + to_string(kind) + " channel");
}

}  // namespace

RateBreakdown eval_theorem1(const JointSourcePmf& source, const AuxChannel& channel,
                            const DistortionTable& d1, double D1) {
    require_kind(channel, ChannelKind::OneDistortion, "eval_theorem1");
    const FullJoint joint = compose(source, channel);
    const Pmf& p = joint.pmf();

    RateBreakdown out;
    out.term_decoder1 = overlapping_information(p, {U0, S2}, {S1, S2}, {Y1});
    out.term_decoder2 = overlapping_information(p, {U0, S2}, {S1, S2}, {Y2});
    out.individual_layer = mutual_information(p, {U1}, {S1}, {U0, S2, Y1});
    out.rate = std::max(out.term_decoder1, out.term_decoder2) + out.individual_layer;
    out.distortion1 = optimal_phi(joint, d1).distortion;
    out.feasible = out.distortion1 <= D1 + kDistortionSlack;
    return out;
}

std::pair<double, double> eval_theorem1_forms(const JointSourcePmf& source, const AuxChannel& channel) {
    require_kind(channel, ChannelKind::OneDistortion, "eval_theorem1_forms");
    const Pmf p = compose(source, channel).pmf();

    const double layer = mutual_information(p, {U1}, {S1}, {U0, S2, Y1});
    const double decoder1 = entropy(p, {S2}, {Y1}) + mutual_information(p, {U0, U1}, {S1}, {S2, Y1});
    const double decoder2 = entropy(p, {S2}, {Y2}) + mutual_information(p, {U0}, {S1}, {S2, Y2}) + layer;
    const double per_decoder = std::max(decoder1, decoder2);

    const double common = std::max(overlapping_information(p, {U0, S2}, {S1, S2}, {Y1}),
                                   overlapping_information(p, {U0, S2}, {S1, S2}, {Y2}));
    return {per_decoder, common + layer};
}

double eval_corollary1(const JointSourcePmf& source, const AuxChannel& channel) {
    require_kind(channel, ChannelKind::OneDistortion, "eval_corollary1");
    if (channel.u1_size() != 1) throw DomainError("eval_corollary1 expects a channel with |U1| = 1");
    const Pmf p = compose(source, channel).pmf();
    const double first = entropy(p, {S1, S2}, {Y1});
    const double second =
        entropy(p, {S1, S2}, {Y2}) + entropy(p, {S1}, {Y1, S2, U0}) - entropy(p, {S1}, {Y2, S2, U0});
    return std::max(first, second);
}

RateBreakdown eval_theorem3(const JointSourcePmf& source, const AuxChannel& channel,
                            const DistortionTable& d1, const DistortionTable& d2, double D1, double D2) {
    require_kind(channel, ChannelKind::CommonReconstruction, "eval_theorem3");
    const FullJoint joint = compose(source, channel);
    const Pmf& p = joint.pmf();

    RateBreakdown out;
    out.term_decoder1 = mutual_information(p, {U0, S2hat}, {S1, S2}, {Y1});
    out.term_decoder2 = mutual_information(p, {U0, S2hat}, {S1, S2}, {Y2});
    out.individual_layer = mutual_information(p, {U1}, {S1, S2}, {Y1, S2hat, U0});
    out.rate = std::max(out.term_decoder1, out.term_decoder2) + out.individual_layer;
    out.distortion1 = optimal_phi(joint, d1).distortion;
    out.distortion2 = expected_d2(joint, d2);
    out.feasible = out.distortion1 <= D1 + kDistortionSlack && *out.distortion2 <= D2 + kDistortionSlack;
    return out;
}

namespace {

// P(v, s, y) from P(s, y) and P(v | s), with axes (V, S, Y).
Pmf point_joint(const Pmf& source, const CondPmf& channel, const char* who) {
    if (source.rank() != 2) throw DomainError(std::string(who) + ": source must have axes (S, Y)");
    if (channel.given_axes().size() != 1 || channel.output_axes().size() != 1)
        throw DomainError(std::string(who) + ": channel must map one source axis to one output axis");
    const std::size_t s = source.axes()[0].size(), y = source.axes()[1].size();
    if (channel.given_axes()[0].size() != s)
        throw DomainError(std::string(who) + ": channel input alphabet does not match the source");
    const std::size_t v = channel.output_axes()[0].size();
    std::vector<double> probs(v * s * y);
    for (std::size_t a = 0; a < v; ++a)
        for (std::size_t b = 0; b < s; ++b)
            for (std::size_t c = 0; c < y; ++c)
                probs[(a * s + b) * y + c] = channel.at(b, a) * source.probs()[b * y + c];
    return Pmf::normalized({Axis("V", v), Axis("S", s), Axis("Y", y)}, std::move(probs));
}

}  // namespace

PointRate eval_wyner_ziv(const Pmf& source, const CondPmf& channel, const DistortionTable& d, double D) {
    const Pmf p = point_joint(source, channel, "eval_wyner_ziv");
    const std::size_t v = p.axes()[0].size(), s = p.axes()[1].size(), y = p.axes()[2].size();
    if (d.source_size() != s) throw DomainError("eval_wyner_ziv: distortion rows do not match |S|");

    PointRate out;
    out.rate = mutual_information(p, {"V"}, {"S"}, {"Y"});
    for (std::size_t a = 0; a < v; ++a)
        for (std::size_t c = 0; c < y; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < d.recon_size(); ++r) {
                double cost = 0.0;
                for (std::size_t b = 0; b < s; ++b) cost += p.probs()[(a * s + b) * y + c] * d(b, r);
                best = std::min(best, cost);
            }
            out.distortion += best;
        }
    out.feasible = out.distortion <= D + kDistortionSlack;
    return out;
}

PointRate eval_common_reconstruction(const Pmf& source, const CondPmf& channel, const DistortionTable& d,
                                     double D) {
    const Pmf p = point_joint(source, channel, "eval_common_reconstruction");
    const std::size_t v = p.axes()[0].size(), s = p.axes()[1].size(), y = p.axes()[2].size();
    if (d.source_size() != s || d.recon_size() != v)
        throw DomainError("eval_common_reconstruction: distortion table must cover S x Shat");

    PointRate out;
    out.rate = mutual_information(p, {"V"}, {"S"}, {"Y"});
    for (std::size_t a = 0; a < v; ++a)
        for (std::size_t b = 0; b < s; ++b)
            for (std::size_t c = 0; c < y; ++c) out.distortion += p.probs()[(a * s + b) * y + c] * d(b, a);
    out.feasible = out.distortion <= D + kDistortionSlack;
    return out;
}

}  // namespace hbrd
