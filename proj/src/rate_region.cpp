#include "hbrd/rate_region.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hbrd/errors.hpp"

namespace hbrd {

using namespace axis;

void SchemeRates::validate() const {
    for (double r : {R2, R0, R0p, R1, R1p})
        if (!std::isfinite(r) || r < 0.0) throw DomainError("scheme rates must be finite and nonnegative");
    if (R0p > R0) throw DomainError("R0' must not exceed R0");
    if (R1p > R1) throw DomainError("R1' must not exceed R1");
}

SingleLetter single_letter(const JointSourcePmf& source, const AuxChannel& channel) {
    if (channel.kind() != ChannelKind::OneDistortion) throw DomainError("the binning scheme needs a one-distortion channel");
    const Pmf p = compose(source, channel).pmf();
    SingleLetter q;
    q.i_u0_s1_g_s2 = mutual_information(p, {U0}, {S1}, {S2});
    q.i_u1_s1_g_u0s2 = mutual_information(p, {U1}, {S1}, {U0, S2});
    q.i_u0_y1_g_s2 = mutual_information(p, {U0}, {Y1}, {S2});
    q.i_u0_y2_g_s2 = mutual_information(p, {U0}, {Y2}, {S2});
    q.i_u1_y1_g_u0s2 = mutual_information(p, {U1}, {Y1}, {U0, S2});
    q.h_s2_g_y1 = entropy(p, {S2}, {Y1});
    q.h_s2_g_y2 = entropy(p, {S2}, {Y2});
    return q;
}

std::vector<RateConstraint> scheme_constraints(const SingleLetter& q) {
    // x = (R2, R0, R0', R1, R1')
    return {
        {"cover U0: R0 >= I(U0;S1|S2)", {0, 1, 0, 0, 0}, q.i_u0_s1_g_s2},
        {"cover U1: R1 >= I(U1;S1|U0S2)", {0, 0, 0, 1, 0}, q.i_u1_s1_g_u0s2},
        {"decoder 2 U0: R0 - R0' <= I(U0;Y2|S2)", {0, -1, 1, 0, 0}, -q.i_u0_y2_g_s2},
        {"decoder 2 joint: R0 - R0' - R2 <= I(U0;Y2|S2) - H(S2|Y2)", {1, -1, 1, 0, 0},
         q.h_s2_g_y2 - q.i_u0_y2_g_s2},
        {"decoder 1 U0: R0 - R0' <= I(U0;Y1|S2)", {0, -1, 1, 0, 0}, -q.i_u0_y1_g_s2},
        {"decoder 1 joint: R0 - R0' - R2 <= I(U0;Y1|S2) - H(S2|Y1)", {1, -1, 1, 0, 0},
         q.h_s2_g_y1 - q.i_u0_y1_g_s2},
        {"decoder 1 U1: R1 - R1' <= I(U1;Y1|U0S2)", {0, 0, 0, -1, 1}, -q.i_u1_y1_g_u0s2},
    };
}

std::vector<std::string> violated_constraints(const SingleLetter& q, const SchemeRates& r, double slack) {
    const std::array<double, 5> x = {r.R2, r.R0, r.R0p, r.R1, r.R1p};
    std::vector<std::string> out;
    for (const auto& c : scheme_constraints(q)) {
        double lhs = 0.0;
        for (int i = 0; i < 5; ++i) lhs += c.coeffs[i] * x[i];
        if (lhs < c.rhs - slack) out.push_back(c.name);
    }
    return out;
}

double eliminated_total_rate(const SingleLetter& q) {
    const double layer = std::max(q.i_u1_s1_g_u0s2 - q.i_u1_y1_g_u0s2, 0.0);
    const double d1 = q.i_u0_s1_g_s2 - q.i_u0_y1_g_s2 + q.h_s2_g_y1;
    const double d2 = q.i_u0_s1_g_s2 - q.i_u0_y2_g_s2 + q.h_s2_g_y2;
    return std::max(d1, d2) + layer;
}

double lp_min_total_rate(const SingleLetter& q) {
    std::vector<RateConstraint> rows = scheme_constraints(q);
    for (int i = 0; i < 5; ++i) {
        std::array<double, 5> e{};
        e[i] = 1.0;
        rows.push_back({"nonnegative", e, 0.0});
    }
    rows.push_back({"R0' <= R0", {0, 1, -1, 0, 0}, 0.0});
    rows.push_back({"R1' <= R1", {0, 0, 0, 1, -1}, 0.0});

    const std::size_t m = rows.size();
    const double tol = 1e-10;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick = {0, 1, 2, 3, 4};
    Eigen::Matrix<double, 5, 5> A;
    Eigen::Matrix<double, 5, 1> b;
    while (true) {
        for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 5; ++c) A(r, c) = rows[pick[r]].coeffs[c];
            b(r) = rows[pick[r]].rhs;
        }
        const Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(A);
        if (lu.isInvertible()) {
            const Eigen::Matrix<double, 5, 1> x = lu.solve(b);
            bool feasible = true;
            for (const auto& row : rows) {
                double lhs = 0.0;
                for (int c = 0; c < 5; ++c) lhs += row.coeffs[c] * x(c);
                if (lhs < row.rhs - tol) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) best = std::min(best, x(0) + x(2) + x(4));
        }
        // next 5-subset in lexicographic order
        int i = 4;
        while (i >= 0 && pick[i] == m - 5 + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < 5; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!std::isfinite(best)) throw DomainError("rate constraints are infeasible");
    return best;
}

SchemeRates rates_with_margin(const SingleLetter& q, double margin, bool has_u1) {
    SchemeRates r;
    r.R0 = q.i_u0_s1_g_s2 + margin;
    const double min_side = std::min(q.i_u0_y1_g_s2, q.i_u0_y2_g_s2);
    r.R0p = std::clamp(r.R0 - min_side + margin, 0.0, r.R0);
    if (has_u1) {
        r.R1 = q.i_u1_s1_g_u0s2 + margin;
        r.R1p = std::clamp(r.R1 - q.i_u1_y1_g_u0s2 + margin, 0.0, r.R1);
    }
    const double binned = r.R0 - r.R0p;
    r.R2 = std::max({q.h_s2_g_y1 - q.i_u0_y1_g_s2, q.h_s2_g_y2 - q.i_u0_y2_g_s2}) + binned + margin;
    r.R2 = std::max(r.R2, 0.0);
    return r;
}

}  // namespace hbrd
