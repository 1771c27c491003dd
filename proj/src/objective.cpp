#include "hbrd/objective.hpp"

#include <algorithm>
#include <limits>

#include "hbrd/errors.hpp"

namespace hbrd {

namespace {

double table_entropy(const std::vector<double>& t) {
    double h = 0.0;
    for (double x : t) h += neg_xlogx(x);
    return h;
}

double row_entropy(const double* row, std::size_t n) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) h += neg_xlogx(row[i]);
    return h;
}

}  // namespace

const char* to_string(Objective objective) noexcept {
    switch (objective) {
        case Objective::Theorem1: return "theorem1";
        case Objective::Corollary1: return "corollary1";
        case Objective::Theorem3: return "theorem3";
    }
    return "?";
}

ChannelKind channel_kind(Objective objective) noexcept {
    return objective == Objective::Theorem3 ? ChannelKind::CommonReconstruction : ChannelKind::OneDistortion;
}

Problem Problem::lossless(JointSourcePmf source, Objective objective) {
    DistortionTable d1 = DistortionTable::hamming(source.s1_size());
    std::optional<DistortionTable> d2;
    if (objective == Objective::Theorem3) d2 = DistortionTable::hamming(source.s2_size());
    return Problem{std::move(source), objective, std::move(d1), std::move(d2), 0.0, 0.0};
}

double Evaluation::rate() const noexcept {
    return std::max(term_decoder1, term_decoder2) + individual_layer;
}

ObjectiveEvaluator::ObjectiveEvaluator(const Problem& problem, std::size_t u0, std::size_t u1,
                                       std::size_t s2hat)
    : problem_(&problem),
      s1_(problem.source.s1_size()),
      s2_(problem.source.s2_size()),
      y1_(problem.source.y1_size()),
      y2_(problem.source.y2_size()),
      u0_(u0),
      u1_(u1),
      hat_(problem.objective == Objective::Theorem3 ? s2hat : 1) {
    if (u0_ == 0 || u1_ == 0 || hat_ == 0) throw DomainError("auxiliary cardinalities must be at least 1");
    if (problem.objective == Objective::Corollary1 && u1_ != 1)
        throw DomainError("the lossless objective optimizes P(U0 | S1, S2) only; |U1| must be 1");
    if (problem.d1.source_size() != s1_) throw DomainError("d1 rows do not match |S1|");
    if (problem.objective == Objective::Theorem3) {
        if (!problem.d2) throw DomainError("the common-reconstruction objective needs a d2 table");
        if (problem.d2->source_size() != s2_ || problem.d2->recon_size() != hat_)
            throw DomainError("d2 must cover S2 x S2hat");
    }

    s_count_ = s1_ * s2_;
    out_count_ = u0_ * u1_ * hat_;

    const auto src = problem.source.pmf().probs();
    p_s_.assign(s_count_, 0.0);
    p_sy1_.assign(s_count_ * y1_, 0.0);
    p_sy2_.assign(s_count_ * y2_, 0.0);
    for (std::size_t s = 0; s < s_count_; ++s)
        for (std::size_t a = 0; a < y1_; ++a)
            for (std::size_t b = 0; b < y2_; ++b) {
                const double v = src[(s * y1_ + a) * y2_ + b];
                p_s_[s] += v;
                p_sy1_[s * y1_ + a] += v;
                p_sy2_[s * y2_ + b] += v;
            }
    h_sy1_ = table_entropy(p_sy1_);
    h_sy2_ = table_entropy(p_sy2_);
    std::vector<double> py1(y1_, 0.0), py2(y2_, 0.0);
    for (std::size_t s = 0; s < s_count_; ++s) {
        for (std::size_t a = 0; a < y1_; ++a) py1[a] += p_sy1_[s * y1_ + a];
        for (std::size_t b = 0; b < y2_; ++b) py2[b] += p_sy2_[s * y2_ + b];
    }
    h_s_given_y1_ = std::max(h_sy1_ - table_entropy(py1), 0.0);
    h_s_given_y2_ = std::max(h_sy2_ - table_entropy(py2), 0.0);

    const bool cr = problem.objective == Objective::Theorem3;
    const std::size_t common = u0_ * (cr ? hat_ : s2_);
    scratch_common_.resize(u0_ * hat_);
    scratch_t1_.resize(common * y1_);
    scratch_t2_.resize(common * y2_);
    const std::size_t layer_keys = cr ? out_count_ : out_count_ * s2_;
    scratch_v_.resize(layer_keys * y1_);
    scratch_w_.resize(layer_keys * y1_ * s1_);
}

Evaluation ObjectiveEvaluator::evaluate(std::span<const double> channel) const {
    const bool cr = problem_->objective == Objective::Theorem3;
    const bool lossless = problem_->objective == Objective::Corollary1;
    const std::size_t ck = u0_ * hat_;

    std::fill(scratch_t1_.begin(), scratch_t1_.end(), 0.0);
    std::fill(scratch_t2_.begin(), scratch_t2_.end(), 0.0);
    std::fill(scratch_w_.begin(), scratch_w_.end(), 0.0);

    double h_common_rows = 0.0;  // sum_s P(s) H(C-part of channel | s)
    double h_rows = 0.0;         // sum_s P(s) H(channel | s)
    double d2 = 0.0;
    for (std::size_t s = 0; s < s_count_; ++s) {
        const double* row = channel.data() + s * out_count_;
        const std::size_t a1 = s / s2_, a2 = s % s2_;

        std::fill(scratch_common_.begin(), scratch_common_.end(), 0.0);
        for (std::size_t o = 0; o < out_count_; ++o) {
            const std::size_t u0 = o / (u1_ * hat_), h = o % hat_;
            scratch_common_[u0 * hat_ + h] += row[o];
        }
        h_common_rows += p_s_[s] * row_entropy(scratch_common_.data(), ck);
        h_rows += p_s_[s] * row_entropy(row, out_count_);

        for (std::size_t k = 0; k < ck; ++k) {
            const double c = scratch_common_[k];
            if (c == 0.0) continue;
            const std::size_t key = cr ? k : (k / hat_) * s2_ + a2;
            for (std::size_t y = 0; y < y1_; ++y) scratch_t1_[key * y1_ + y] += c * p_sy1_[s * y1_ + y];
            for (std::size_t y = 0; y < y2_; ++y) scratch_t2_[key * y2_ + y] += c * p_sy2_[s * y2_ + y];
        }

        if (!lossless) {
            for (std::size_t o = 0; o < out_count_; ++o) {
                const double c = row[o];
                if (c == 0.0) continue;
                const std::size_t key = cr ? o : o * s2_ + a2;
                for (std::size_t y = 0; y < y1_; ++y)
                    scratch_w_[(key * y1_ + y) * s1_ + a1] += c * p_sy1_[s * y1_ + y];
                if (cr) d2 += c * p_s_[s] * (*problem_->d2)(a2, o % hat_);
            }
        }
    }

    Evaluation e;
    const double h_s_c_y1 = std::max(h_sy1_ + h_common_rows - table_entropy(scratch_t1_), 0.0);
    const double h_s_c_y2 = std::max(h_sy2_ + h_common_rows - table_entropy(scratch_t2_), 0.0);
    e.term_decoder1 = std::max(h_s_given_y1_ - h_s_c_y1, 0.0);
    e.term_decoder2 = std::max(h_s_given_y2_ - h_s_c_y2, 0.0);

    if (lossless) {
        e.individual_layer = h_s_c_y1;
        return e;
    }

    const std::size_t keys = scratch_v_.size() / y1_;
    const auto& d1 = problem_->d1;
    double h_v = 0.0;
    double dist = 0.0;
    for (std::size_t t = 0; t < keys * y1_; ++t) {
        const double* w = scratch_w_.data() + t * s1_;
        double mass = 0.0;
        for (std::size_t a = 0; a < s1_; ++a) mass += w[a];
        if (mass <= 0.0) continue;
        h_v += neg_xlogx(mass);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < d1.recon_size(); ++r) {
            double cost = 0.0;
            for (std::size_t a = 0; a < s1_; ++a) cost += w[a] * d1(a, r);
            best = std::min(best, cost);
        }
        dist += best;
    }
    const double h_s_u_y1 = std::max(h_sy1_ + h_rows - h_v, 0.0);
    e.individual_layer = std::max(h_s_c_y1 - h_s_u_y1, 0.0);
    e.distortion1 = dist;
    e.distortion2 = d2;
    return e;
}

double ObjectiveEvaluator::excess(const Evaluation& e) const noexcept {
    if (problem_->objective == Objective::Corollary1) return 0.0;
    const double x1 = std::max(e.distortion1 - problem_->D1, 0.0);
    double x = x1 * x1;
    if (problem_->objective == Objective::Theorem3) {
        const double x2 = std::max(e.distortion2 - problem_->D2, 0.0);
        x += x2 * x2;
    }
    return x;
}

bool ObjectiveEvaluator::feasible(const Evaluation& e) const noexcept {
    switch (problem_->objective) {
        case Objective::Corollary1: return true;
        case Objective::Theorem1: return e.distortion1 <= problem_->D1 + kDistortionSlack;
        case Objective::Theorem3:
            return e.distortion1 <= problem_->D1 + kDistortionSlack &&
                   e.distortion2 <= problem_->D2 + kDistortionSlack;
    }
    return false;
}

AuxChannel ObjectiveEvaluator::to_channel(std::span<const double> channel) const {
    std::vector<double> probs(channel.begin(), channel.end());
    if (problem_->objective == Objective::Theorem3)
        return AuxChannel::common_reconstruction(s1_, s2_, u0_, u1_, hat_, std::move(probs));
    return AuxChannel::one_distortion(s1_, s2_, u0_, u1_, std::move(probs));
}

RateBreakdown ObjectiveEvaluator::reference(const AuxChannel& channel) const {
    const auto& p = *problem_;
    switch (p.objective) {
        case Objective::Theorem1: return eval_theorem1(p.source, channel, p.d1, p.D1);
        case Objective::Theorem3: return eval_theorem3(p.source, channel, p.d1, *p.d2, p.D1, p.D2);
        case Objective::Corollary1: {
            // Lossless layer: U1 carries S1 itself.
            const Pmf joint = compose(p.source, channel).pmf();
            RateBreakdown out;
            const double h1 = entropy(joint, {axis::S1, axis::S2}, {axis::Y1});
            const double h2 = entropy(joint, {axis::S1, axis::S2}, {axis::Y2});
            out.individual_layer = entropy(joint, {axis::S1}, {axis::U0, axis::S2, axis::Y1});
            out.term_decoder1 = std::max(h1 - out.individual_layer, 0.0);
            out.term_decoder2 = std::max(h2 - entropy(joint, {axis::S1}, {axis::U0, axis::S2, axis::Y2}), 0.0);
            out.rate = eval_corollary1(p.source, channel);
            out.distortion1 = 0.0;
            out.feasible = true;
            return out;
        }
    }
    throw DomainError("unknown objective");
}

}  // namespace hbrd
