#pragma once

// Rate constraints of the binning scheme for a fixed one-distortion channel.
// Rates are ordered (R2, R0, R0', R1, R1') throughout.

#include <array>
#include <string>
#include <vector>

#include "hbrd/model.hpp"

namespace hbrd {

struct SchemeRates {
    double R2 = 0.0;
    double R0 = 0.0;
    double R0p = 0.0;
    double R1 = 0.0;
    double R1p = 0.0;

    double total() const noexcept { return R2 + R0p + R1p; }
    /// Throws DomainError unless all rates are finite, nonnegative, R0' <= R0 and R1' <= R1.
    void validate() const;
};

struct SingleLetter {
    double i_u0_s1_g_s2 = 0.0;    ///< I(U0; S1 | S2)
    double i_u1_s1_g_u0s2 = 0.0;  ///< I(U1; S1 | U0 S2)
    double i_u0_y1_g_s2 = 0.0;    ///< I(U0; Y1 | S2)
    double i_u0_y2_g_s2 = 0.0;    ///< I(U0; Y2 | S2)
    double i_u1_y1_g_u0s2 = 0.0;  ///< I(U1; Y1 | U0 S2)
    double h_s2_g_y1 = 0.0;       ///< H(S2 | Y1)
    double h_s2_g_y2 = 0.0;       ///< H(S2 | Y2)
};

SingleLetter single_letter(const JointSourcePmf& source, const AuxChannel& channel);

/// coeffs . (R2, R0, R0', R1, R1') >= rhs
struct RateConstraint {
    std::string name;
    std::array<double, 5> coeffs;
    double rhs;
};

/// Covering (encoder), decoder-2 and decoder-1 constraints, without the box constraints.
std::vector<RateConstraint> scheme_constraints(const SingleLetter& q);

/// Names of the scheme constraints violated by more than `slack`.
std::vector<std::string> violated_constraints(const SingleLetter& q, const SchemeRates& r, double slack = 1e-12);

/// max_j { I(U0; S1 | S2 Yj) + H(S2 | Yj) } + I(U1; S1 | U0 S2 Y1)
double eliminated_total_rate(const SingleLetter& q);

/// min R2 + R0' + R1' over the scheme constraints, 0 <= R0' <= R0, 0 <= R1' <= R1, R2 >= 0,
/// solved by enumerating the vertices of the polyhedron.
double lp_min_total_rate(const SingleLetter& q);

/// Rates meeting every scheme constraint with slack `margin` where the box constraints allow it.
/// A constant U1 (|U1| = 1) gets R1 = R1' = 0.
SchemeRates rates_with_margin(const SingleLetter& q, double margin, bool has_u1);

}  // namespace hbrd
