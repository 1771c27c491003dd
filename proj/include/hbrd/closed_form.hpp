#pragma once

// Special cases in which the one-distortion rate has an explicit form.
// Lossy cases keep a minimization over P(U1 | S1, S2) alone, delegated to the
// optimizer with U0 held constant.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hbrd/optimizer.hpp"

namespace hbrd {

enum class CaseTag {
    Degraded,                 ///< Y2 - Y1 - (S1,S2), lossy
    DegradedLossless,         ///< Y2 - Y1 - (S1,S2)
    ReverseDegraded,          ///< Y1 - Y2 - (S1,S2), lossy
    ReverseDegradedLossless,  ///< Y1 - Y2 - (S1,S2)
    Y2Absent,                 ///< Y2 independent of (S1,S2,Y1)
    Y1Absent,                 ///< Y1 independent of (S1,S2,Y2)
    FuncY2Lossy,              ///< Y2 = f(S2), lossy
    FuncY2Lossless,           ///< Y2 = f(S2)
    FuncY1Lossless,           ///< Y1 = f(S2)
    CompDelivery,             ///< Y1 = S2 and Y2 = S1 up to relabeling
};

inline constexpr CaseTag kAllCases[] = {
    CaseTag::Degraded,       CaseTag::DegradedLossless, CaseTag::ReverseDegraded, CaseTag::ReverseDegradedLossless,
    CaseTag::Y2Absent,       CaseTag::Y1Absent,         CaseTag::FuncY2Lossy,     CaseTag::FuncY2Lossless,
    CaseTag::FuncY1Lossless, CaseTag::CompDelivery,
};

const char* to_string(CaseTag tag) noexcept;
std::optional<CaseTag> parse_case(std::string_view name);
bool is_lossy(CaseTag tag) noexcept;

inline constexpr double kHypothesisTolerance = 1e-9;

struct HypothesisCheck {
    std::string name;  ///< e.g. "I(Y2;S1S2|Y1) = 0"
    double value;
    bool holds;
};

std::vector<HypothesisCheck> hypothesis_checks(const JointSourcePmf& source, CaseTag tag);

/// Throws PreconditionError naming the first violated check.
void require_hypothesis(const JointSourcePmf& source, CaseTag tag);

struct InnerSearch {
    SearchConfig config;
    Strategy strategy = Strategy::Heuristic;

    /// Heuristic over |U1| = |S1||S2| + 1.
    static InnerSearch defaults_for(const JointSourcePmf& source);
};

struct ClosedFormResult {
    CaseTag tag;
    double value = 0.0;
    /// Rate spent on S2 (and any common part of S1).
    double common_rate = 0.0;
    /// Rate of the individual description of S1 to decoder 1.
    double individual_rate = 0.0;
    /// A one-distortion channel attaining `value` (U0 as fixed by the case).
    AuxChannel channel;
    std::optional<OptimizeResult> inner;
};

/// Lossless cases ignore d1, D1 and the inner search.
ClosedFormResult closed_form(const JointSourcePmf& source, CaseTag tag, const DistortionTable& d1, double D1,
                             const InnerSearch& inner);
ClosedFormResult closed_form(const JointSourcePmf& source, CaseTag tag);

/// Lossless rate with no common description (U0 constant, U1 = S1).
double lossless_rate_without_common(const JointSourcePmf& source);

}  // namespace hbrd
