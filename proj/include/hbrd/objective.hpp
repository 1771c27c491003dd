#pragma once

// Allocation-free evaluation of the minimized objectives for a channel given
// as a dense [s1 s2][output] probability array. The optimizer calls this
// millions of times; rd_eval provides the term-by-term reference.

#include <optional>
#include <span>
#include <vector>

#include "hbrd/model.hpp"
#include "hbrd/rd_eval.hpp"

namespace hbrd {

enum class Objective {
    Theorem1,    ///< one distortion, channel P(U0, U1 | S1, S2)
    Corollary1,  ///< lossless, channel P(U0 | S1, S2), U1 := S1 implied
    Theorem3,    ///< common reconstruction, channel P(U0, U1, S2hat | S1, S2)
};

const char* to_string(Objective objective) noexcept;
ChannelKind channel_kind(Objective objective) noexcept;

struct Problem {
    JointSourcePmf source;
    Objective objective = Objective::Theorem1;
    DistortionTable d1;
    std::optional<DistortionTable> d2;
    double D1 = 0.0;
    double D2 = 0.0;

    /// Hamming distortions on S1 (and S2 for Theorem3) with zero targets.
    static Problem lossless(JointSourcePmf source, Objective objective);
};

struct Evaluation {
    double term_decoder1 = 0.0;
    double term_decoder2 = 0.0;
    double individual_layer = 0.0;
    double distortion1 = 0.0;
    double distortion2 = 0.0;

    double rate() const noexcept;
};

class ObjectiveEvaluator {
public:
    /// For Corollary1 `u1` must be 1; `s2hat` is ignored unless the objective is Theorem3.
    ObjectiveEvaluator(const Problem& problem, std::size_t u0, std::size_t u1, std::size_t s2hat);

    std::size_t column_count() const noexcept { return s_count_; }
    std::size_t output_count() const noexcept { return out_count_; }
    const Problem& problem() const noexcept { return *problem_; }

    Evaluation evaluate(std::span<const double> channel) const;

    /// Sum of squared distortion excesses over the targets.
    double excess(const Evaluation& e) const noexcept;
    bool feasible(const Evaluation& e) const noexcept;

    AuxChannel to_channel(std::span<const double> channel) const;
    RateBreakdown reference(const AuxChannel& channel) const;

private:
    const Problem* problem_;
    std::size_t s1_, s2_, y1_, y2_;
    std::size_t u0_, u1_, hat_;
    std::size_t s_count_, out_count_;
    std::vector<double> p_s_;
    std::vector<double> p_sy1_;
    std::vector<double> p_sy2_;
    double h_sy1_ = 0.0, h_sy2_ = 0.0;
    double h_s_given_y1_ = 0.0, h_s_given_y2_ = 0.0;

    mutable std::vector<double> scratch_common_;
    mutable std::vector<double> scratch_t1_;
    mutable std::vector<double> scratch_t2_;
    mutable std::vector<double> scratch_v_;
    mutable std::vector<double> scratch_w_;
};

}  // namespace hbrd
