#include "hbrd/closed_form.hpp"

#include <algorithm>

#include "hbrd/errors.hpp"

namespace hbrd {

using namespace axis;

namespace {

struct Row {
    CaseTag tag;
    const char* name;
    bool lossy;
};

constexpr Row kRows[] = {
    {CaseTag::Degraded, "Degraded", true},
    {CaseTag::DegradedLossless, "DegradedLossless", false},
    {CaseTag::ReverseDegraded, "ReverseDegraded", true},
    {CaseTag::ReverseDegradedLossless, "ReverseDegradedLossless", false},
    {CaseTag::Y2Absent, "Y2Absent", false},
    {CaseTag::Y1Absent, "Y1Absent", false},
    {CaseTag::FuncY2Lossy, "FuncY2Lossy", true},
    {CaseTag::FuncY2Lossless, "FuncY2Lossless", false},
    {CaseTag::FuncY1Lossless, "FuncY1Lossless", false},
    {CaseTag::CompDelivery, "CompDelivery", false},
};

const Row& row(CaseTag tag) {
    for (const auto& r : kRows)
        if (r.tag == tag) return r;
    throw DomainError("unknown case tag");
}

HypothesisCheck check(std::string name, double value) {
    return {std::move(name), value, value < kHypothesisTolerance};
}

AuxChannel constant_u0_copy_u1(const JointSourcePmf& src) {
    return AuxChannel::deterministic(ChannelKind::OneDistortion, src.s1_size(), src.s2_size(), 1, src.s1_size(), 1,
                                     [](std::size_t s1, std::size_t) -> AuxChannel::Outputs { return {0, s1, 0}; });
}

AuxChannel copy_u0(const JointSourcePmf& src) {
    return AuxChannel::deterministic(ChannelKind::OneDistortion, src.s1_size(), src.s2_size(), src.s1_size(), 1, 1,
                                     [](std::size_t s1, std::size_t) -> AuxChannel::Outputs { return {s1, 0, 0}; });
}

}  // namespace

const char* to_string(CaseTag tag) noexcept {
    for (const auto& r : kRows)
        if (r.tag == tag) return r.name;
    return "?";
}

std::optional<CaseTag> parse_case(std::string_view name) {
    for (const auto& r : kRows)
        if (name == r.name) return r.tag;
    return std::nullopt;
}

bool is_lossy(CaseTag tag) noexcept {
    return tag == CaseTag::Degraded || tag == CaseTag::ReverseDegraded || tag == CaseTag::FuncY2Lossy;
}

std::vector<HypothesisCheck> hypothesis_checks(const JointSourcePmf& source, CaseTag tag) {
    const Pmf& p = source.pmf();
    switch (tag) {
        case CaseTag::Degraded:
        case CaseTag::DegradedLossless:
            return {check("I(Y2;S1S2|Y1) = 0", mutual_information(p, {Y2}, {S1, S2}, {Y1}))};
        case CaseTag::ReverseDegraded:
        case CaseTag::ReverseDegradedLossless:
            return {check("I(Y1;S1S2|Y2) = 0", mutual_information(p, {Y1}, {S1, S2}, {Y2}))};
        case CaseTag::Y2Absent: return {check("I(Y2;S1S2Y1) = 0", mutual_information(p, {Y2}, {S1, S2, Y1}))};
        case CaseTag::Y1Absent: return {check("I(Y1;S1S2Y2) = 0", mutual_information(p, {Y1}, {S1, S2, Y2}))};
        case CaseTag::FuncY2Lossy:
        case CaseTag::FuncY2Lossless: return {check("H(Y2|S2) = 0", entropy(p, {Y2}, {S2}))};
        case CaseTag::FuncY1Lossless: return {check("H(Y1|S2) = 0", entropy(p, {Y1}, {S2}))};
        case CaseTag::CompDelivery:
            return {check("H(Y2|S1) = 0", entropy(p, {Y2}, {S1})), check("H(S1|Y2) = 0", entropy(p, {S1}, {Y2})),
                    check("H(Y1|S2) = 0", entropy(p, {Y1}, {S2})), check("H(S2|Y1) = 0", entropy(p, {S2}, {Y1}))};
    }
    throw DomainError("unknown case tag");
}

void require_hypothesis(const JointSourcePmf& source, CaseTag tag) {
    for (const auto& c : hypothesis_checks(source, tag))
        if (!c.holds)
            throw PreconditionError(c.name, std::string(to_string(tag)) + " requires " + c.name + ", but it is " +
                                                std::to_string(c.value));
}

InnerSearch InnerSearch::defaults_for(const JointSourcePmf& source) {
    InnerSearch s;
    s.config.u0_card = 1;
    s.config.u1_card = source.s1_size() * source.s2_size() + 1;
    return s;
}

ClosedFormResult closed_form(const JointSourcePmf& source, CaseTag tag) {
    return closed_form(source, tag, DistortionTable::hamming(source.s1_size()), 0.0,
                       InnerSearch::defaults_for(source));
}

ClosedFormResult closed_form(const JointSourcePmf& source, CaseTag tag, const DistortionTable& d1, double D1,
                             const InnerSearch& inner) {
    require_hypothesis(source, tag);
    const Pmf& p = source.pmf();
    const double h2_y1 = entropy(p, {S2}, {Y1});
    const double h2_y2 = entropy(p, {S2}, {Y2});
    const double h1_s2y1 = entropy(p, {S1}, {S2, Y1});

    auto lossless = [&](double common, double individual, AuxChannel channel) {
        return ClosedFormResult{tag, common + individual, common, individual, std::move(channel), std::nullopt};
    };

    switch (tag) {
        case CaseTag::DegradedLossless: return lossless(h2_y2, h1_s2y1, constant_u0_copy_u1(source));
        case CaseTag::ReverseDegradedLossless: return lossless(h2_y1, h1_s2y1, constant_u0_copy_u1(source));
        case CaseTag::Y2Absent: return lossless(entropy(p, {S2}), h1_s2y1, constant_u0_copy_u1(source));
        case CaseTag::Y1Absent: return lossless(entropy(p, {S2}), entropy(p, {S1}, {S2}), constant_u0_copy_u1(source));
        case CaseTag::FuncY2Lossless: {
            const double value = std::max(entropy(p, {S1, S2}, {Y1}), h2_y2 + h1_s2y1);
            return lossless(value - h1_s2y1, h1_s2y1, constant_u0_copy_u1(source));
        }
        case CaseTag::FuncY1Lossless:
            return lossless(std::max(entropy(p, {S1, S2}, {Y1}), entropy(p, {S1, S2}, {Y2})), 0.0, copy_u0(source));
        case CaseTag::CompDelivery:
            return lossless(std::max(entropy(p, {S2}, {S1}), entropy(p, {S1}, {S2})), 0.0, copy_u0(source));
        default: break;
    }

    // Lossy: the S2 part is fixed and U0 is constant, so the one-distortion
    // objective reduces to max_j H(S2|Yj) + I(U1; S1 | S2 Y1).
    const double common = tag == CaseTag::Degraded          ? h2_y2
                          : tag == CaseTag::ReverseDegraded ? h2_y1
                                                            : std::max(h2_y1, h2_y2);
    Problem problem{source, Objective::Theorem1, d1, std::nullopt, D1, 0.0};
    SearchConfig cfg = inner.config;
    cfg.u0_card = 1;
    OptimizeResult r =
        inner.strategy == Strategy::GridOracle ? grid_oracle(problem, cfg) : heuristic_search(problem, cfg);
    if (!r.feasible)
        throw DomainError("no auxiliary channel on the search lattice meets D1 = " + std::to_string(D1));
    const double individual = r.best.individual_layer;
    AuxChannel channel = r.channel;
    return ClosedFormResult{tag, common + individual, common, individual, std::move(channel), std::move(r)};
}

double lossless_rate_without_common(const JointSourcePmf& source) {
    const AuxChannel constant = AuxChannel::one_distortion(source.s1_size(), source.s2_size(), 1, 1,
                                                           std::vector<double>(source.s1_size() * source.s2_size(), 1.0));
    return eval_corollary1(source, constant);
}

}  // namespace hbrd
