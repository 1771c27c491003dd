#pragma once

// Problem data model: the four-source, distortion tables, auxiliary channels,
// their composition into a full joint, and optimal reconstruction maps.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hbrd/prob.hpp"

namespace hbrd {

namespace axis {
inline const std::string S1 = "S1";
inline const std::string S2 = "S2";
inline const std::string Y1 = "Y1";
inline const std::string Y2 = "Y2";
inline const std::string U0 = "U0";
inline const std::string U1 = "U1";
inline const std::string S2hat = "S2hat";
}  // namespace axis

/// P(s1, s2, y1, y2) with axes in exactly that order.
class JointSourcePmf {
public:
    explicit JointSourcePmf(Pmf pmf);
    JointSourcePmf(std::size_t s1, std::size_t s2, std::size_t y1, std::size_t y2,
                   std::vector<double> probs);

    const Pmf& pmf() const noexcept { return pmf_; }
    std::size_t s1_size() const noexcept { return pmf_.axes()[0].size(); }
    std::size_t s2_size() const noexcept { return pmf_.axes()[1].size(); }
    std::size_t y1_size() const noexcept { return pmf_.axes()[2].size(); }
    std::size_t y2_size() const noexcept { return pmf_.axes()[3].size(); }

    double at(std::size_t s1, std::size_t s2, std::size_t y1, std::size_t y2) const {
        return pmf_.probs()[((s1 * s2_size() + s2) * y1_size() + y1) * y2_size() + y2];
    }

private:
    Pmf pmf_;
};

/// Nonnegative distortion d(s, r) over source x reconstruction alphabets, row-major.
class DistortionTable {
public:
    DistortionTable(std::size_t source_size, std::size_t recon_size, std::vector<double> values);
    static DistortionTable hamming(std::size_t size);

    std::size_t source_size() const noexcept { return rows_; }
    std::size_t recon_size() const noexcept { return cols_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator()(std::size_t s, std::size_t r) const { return values_[s * cols_ + r]; }
    double max_value() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

struct DistortionSpec {
    DistortionTable d1;
    std::optional<DistortionTable> d2;
};

enum class ChannelKind { OneDistortion, CommonReconstruction };

const char* to_string(ChannelKind kind) noexcept;

/// P(u0, u1 | s1, s2) or P(u0, u1, s2hat | s1, s2).
class AuxChannel {
public:
    AuxChannel(ChannelKind kind, CondPmf cond);

    static AuxChannel one_distortion(std::size_t s1, std::size_t s2, std::size_t u0, std::size_t u1,
                                     std::vector<double> probs);
    static AuxChannel common_reconstruction(std::size_t s1, std::size_t s2, std::size_t u0,
                                            std::size_t u1, std::size_t s2hat,
                                            std::vector<double> probs);

    using Outputs = std::array<std::size_t, 3>;
    /// Channel putting all mass on f(s1, s2) = {u0, u1, s2hat}; s2hat is ignored for OneDistortion.
    static AuxChannel deterministic(ChannelKind kind, std::size_t s1, std::size_t s2, std::size_t u0,
                                    std::size_t u1, std::size_t s2hat,
                                    const std::function<Outputs(std::size_t, std::size_t)>& f);

    ChannelKind kind() const noexcept { return kind_; }
    const CondPmf& cond() const noexcept { return cond_; }
    std::size_t s1_size() const noexcept { return cond_.given_axes()[0].size(); }
    std::size_t s2_size() const noexcept { return cond_.given_axes()[1].size(); }
    std::size_t u0_size() const noexcept { return cond_.output_axes()[0].size(); }
    std::size_t u1_size() const noexcept { return cond_.output_axes()[1].size(); }
    /// 1 for OneDistortion channels.
    std::size_t s2hat_size() const noexcept {
        return kind_ == ChannelKind::CommonReconstruction ? cond_.output_axes()[2].size() : 1;
    }
    std::size_t output_count() const noexcept { return cond_.output_count(); }

    /// P(u0, u1[, s2hat] | s1, s2) with output flattened u0-major.
    double at(std::size_t s1, std::size_t s2, std::size_t out) const {
        return cond_.at(s1 * s2_size() + s2, out);
    }

private:
    ChannelKind kind_;
    CondPmf cond_;
};

/// Embeds a one-distortion channel into the common-reconstruction family with S2hat := S2.
AuxChannel with_copied_s2(const AuxChannel& channel);

/// Joint over (U0, U1[, S2hat], S1, S2, Y1, Y2) built as P(u|s1,s2) P(s1,s2,y1,y2).
class FullJoint {
public:
    FullJoint(ChannelKind kind, Pmf pmf) : kind_(kind), pmf_(std::move(pmf)) {}

    ChannelKind kind() const noexcept { return kind_; }
    const Pmf& pmf() const noexcept { return pmf_; }

    /// Label of the common-layer companion of U0: S2 or S2hat.
    const std::string& common_label() const noexcept {
        return kind_ == ChannelKind::OneDistortion ? axis::S2 : axis::S2hat;
    }

private:
    ChannelKind kind_;
    Pmf pmf_;
};

FullJoint compose(const JointSourcePmf& source, const AuxChannel& channel);

/// Deterministic decoder-1 estimate indexed by (u0, u1, m, y1), m = s2 or s2hat.
class ReconstructionMap {
public:
    ReconstructionMap(std::array<std::size_t, 4> dims, std::vector<std::size_t> table);

    const std::array<std::size_t, 4>& dims() const noexcept { return dims_; }
    const std::vector<std::size_t>& table() const noexcept { return table_; }
    std::size_t operator()(std::size_t u0, std::size_t u1, std::size_t m, std::size_t y1) const {
        return table_[((u0 * dims_[1] + u1) * dims_[2] + m) * dims_[3] + y1];
    }

private:
    std::array<std::size_t, 4> dims_;
    std::vector<std::size_t> table_;
};

struct PhiResult {
    ReconstructionMap map;
    double distortion;
};

/// Pointwise conditional-expectation argmin; ties go to the smallest index,
/// zero-mass tuples map to symbol 0.
PhiResult optimal_phi(const FullJoint& joint, const DistortionTable& d1);

/// E d1(S1, map(U0, U1, M, Y1)) for an arbitrary map.
double expected_d1(const FullJoint& joint, const DistortionTable& d1, const ReconstructionMap& map);

/// E d2(S2, S2hat); only defined for common-reconstruction joints.
double expected_d2(const FullJoint& joint, const DistortionTable& d2);

}  // namespace hbrd
