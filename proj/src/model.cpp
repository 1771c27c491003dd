#include "hbrd/model.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "hbrd/errors.hpp"

namespace hbrd {

namespace {

std::vector<Axis> source_axes(std::size_t s1, std::size_t s2, std::size_t y1, std::size_t y2) {
    return {Axis(axis::S1, s1), Axis(axis::S2, s2), Axis(axis::Y1, y1), Axis(axis::Y2, y2)};
}

std::vector<Axis> channel_outputs(ChannelKind kind, std::size_t u0, std::size_t u1, std::size_t s2hat) {
    std::vector<Axis> out{Axis(axis::U0, u0), Axis(axis::U1, u1)};
    if (kind == ChannelKind::CommonReconstruction) out.emplace_back(axis::S2hat, s2hat);
    return out;
}

void expect_axis(const Axis& a, const std::string& name, const char* where) {
    if (a.name != name) {
        std::ostringstream os;
        os << where << ": expected axis '" << name << "', found '" << a.name << "'";
        throw DomainError(os.str());
    }
}

}  // namespace

JointSourcePmf::JointSourcePmf(Pmf pmf) : pmf_(std::move(pmf)) {
    if (pmf_.rank() != 4) throw DomainError("source pmf must have exactly the axes S1, S2, Y1, Y2");
    expect_axis(pmf_.axes()[0], axis::S1, "source pmf");
    expect_axis(pmf_.axes()[1], axis::S2, "source pmf");
    expect_axis(pmf_.axes()[2], axis::Y1, "source pmf");
    expect_axis(pmf_.axes()[3], axis::Y2, "source pmf");
}

JointSourcePmf::JointSourcePmf(std::size_t s1, std::size_t s2, std::size_t y1, std::size_t y2,
                               std::vector<double> probs)
    : JointSourcePmf(Pmf(source_axes(s1, s2, y1, y2), std::move(probs))) {}

DistortionTable::DistortionTable(std::size_t source_size, std::size_t recon_size,
                                 std::vector<double> values)
    : rows_(source_size), cols_(recon_size), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0) throw DomainError("distortion table alphabets must be nonempty");
    if (values_.size() != rows_ * cols_) {
        std::ostringstream os;
        os << "distortion table has " << values_.size() << " entries, expected " << rows_ * cols_;
        throw DomainError(os.str());
    }
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("distortion entries must be finite and nonnegative");
}

DistortionTable DistortionTable::hamming(std::size_t size) {
    std::vector<double> v(size * size, 1.0);
    for (std::size_t i = 0; i < size; ++i) v[i * size + i] = 0.0;
    return DistortionTable(size, size, std::move(v));
}

double DistortionTable::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

const char* to_string(ChannelKind kind) noexcept {
    return kind == ChannelKind::OneDistortion ? "OneDistortion" : "CommonReconstruction";
}

AuxChannel::AuxChannel(ChannelKind kind, CondPmf cond) : kind_(kind), cond_(std::move(cond)) {
    const auto& g = cond_.given_axes();
    const auto& o = cond_.output_axes();
    if (g.size() != 2) throw DomainError("auxiliary channel must be conditioned on (S1, S2)");
    expect_axis(g[0], axis::S1, "auxiliary channel");
    expect_axis(g[1], axis::S2, "auxiliary channel");
    const std::size_t outputs = kind_ == ChannelKind::OneDistortion ? 2 : 3;
    if (o.size() != outputs)
        throw DomainError(std::string("auxiliary channel of kind ") + to_string(kind_) + " must output " +
                          (outputs == 2 ? "(U0, U1)" : "(U0, U1, S2hat)"));
    expect_axis(o[0], axis::U0, "auxiliary channel");
    expect_axis(o[1], axis::U1, "auxiliary channel");
    if (outputs == 3) expect_axis(o[2], axis::S2hat, "auxiliary channel");
}

AuxChannel AuxChannel::one_distortion(std::size_t s1, std::size_t s2, std::size_t u0, std::size_t u1,
                                      std::vector<double> probs) {
    return AuxChannel(ChannelKind::OneDistortion,
                      CondPmf({Axis(axis::S1, s1), Axis(axis::S2, s2)},
                              channel_outputs(ChannelKind::OneDistortion, u0, u1, 1), std::move(probs)));
}

AuxChannel AuxChannel::common_reconstruction(std::size_t s1, std::size_t s2, std::size_t u0,
                                             std::size_t u1, std::size_t s2hat,
                                             std::vector<double> probs) {
    return AuxChannel(ChannelKind::CommonReconstruction,
                      CondPmf({Axis(axis::S1, s1), Axis(axis::S2, s2)},
                              channel_outputs(ChannelKind::CommonReconstruction, u0, u1, s2hat),
                              std::move(probs)));
}

AuxChannel AuxChannel::deterministic(ChannelKind kind, std::size_t s1, std::size_t s2, std::size_t u0,
                                     std::size_t u1, std::size_t s2hat,
                                     const std::function<Outputs(std::size_t, std::size_t)>& f) {
    const bool cr = kind == ChannelKind::CommonReconstruction;
    const std::size_t m = cr ? s2hat : 1;
    const std::size_t outputs = u0 * u1 * m;
    std::vector<double> probs(s1 * s2 * outputs, 0.0);
    for (std::size_t a = 0; a < s1; ++a)
        for (std::size_t b = 0; b < s2; ++b) {
            const auto out = f(a, b);
            const std::size_t h = cr ? out[2] : 0;
            if (out[0] >= u0 || out[1] >= u1 || h >= m)
                throw DomainError("deterministic channel map produced an out-of-range symbol");
            probs[(a * s2 + b) * outputs + (out[0] * u1 + out[1]) * m + h] = 1.0;
        }
    return cr ? common_reconstruction(s1, s2, u0, u1, s2hat, std::move(probs))
              : one_distortion(s1, s2, u0, u1, std::move(probs));
}

AuxChannel with_copied_s2(const AuxChannel& channel) {
    if (channel.kind() != ChannelKind::OneDistortion)
        throw DomainError("with_copied_s2 expects a one-distortion channel");
    const std::size_t s1 = channel.s1_size(), s2 = channel.s2_size();
    const std::size_t u0 = channel.u0_size(), u1 = channel.u1_size();
    const std::size_t u = u0 * u1;
    std::vector<double> probs(s1 * s2 * u * s2, 0.0);
    for (std::size_t a = 0; a < s1; ++a)
        for (std::size_t b = 0; b < s2; ++b)
            for (std::size_t k = 0; k < u; ++k) probs[(a * s2 + b) * u * s2 + k * s2 + b] = channel.at(a, b, k);
    return AuxChannel::common_reconstruction(s1, s2, u0, u1, s2, std::move(probs));
}

FullJoint compose(const JointSourcePmf& source, const AuxChannel& channel) {
    if (channel.s1_size() != source.s1_size() || channel.s2_size() != source.s2_size()) {
        std::ostringstream os;
        os << "channel is conditioned on |S1|=" << channel.s1_size() << ", |S2|=" << channel.s2_size()
           << " but the source has |S1|=" << source.s1_size() << ", |S2|=" << source.s2_size();
        throw DomainError(os.str());
    }
    const std::size_t y = source.y1_size() * source.y2_size();
    const std::size_t s_count = source.s1_size() * source.s2_size();
    const std::size_t u_count = channel.output_count();
    const auto src = source.pmf().probs();

    std::vector<double> probs(u_count * s_count * y);
    for (std::size_t u = 0; u < u_count; ++u)
        for (std::size_t s = 0; s < s_count; ++s) {
            const double c = channel.cond().at(s, u);
            for (std::size_t k = 0; k < y; ++k) probs[(u * s_count + s) * y + k] = c * src[s * y + k];
        }

    std::vector<Axis> axes = channel.cond().output_axes();
    for (const auto& a : source.pmf().axes()) axes.push_back(a);
    return FullJoint(channel.kind(), Pmf::normalized(std::move(axes), std::move(probs)));
}

ReconstructionMap::ReconstructionMap(std::array<std::size_t, 4> dims, std::vector<std::size_t> table)
    : dims_(dims), table_(std::move(table)) {
    if (table_.size() != dims_[0] * dims_[1] * dims_[2] * dims_[3])
        throw DomainError("reconstruction map size does not match its domain");
}

namespace {

// P(u0, u1, m, y1, s1) ordered exactly that way.
Pmf decoder1_view(const FullJoint& joint) {
    const Labels order{axis::U0, axis::U1, joint.common_label(), axis::Y1, axis::S1};
    return marginalize(joint.pmf(), order).reordered(order);
}

}  // namespace

PhiResult optimal_phi(const FullJoint& joint, const DistortionTable& d1) {
    const Pmf view = decoder1_view(joint);
    const auto& ax = view.axes();
    const std::size_t s1 = ax[4].size();
    if (d1.source_size() != s1) throw DomainError("d1 rows do not match |S1|");

    const std::array<std::size_t, 4> dims{ax[0].size(), ax[1].size(), ax[2].size(), ax[3].size()};
    const std::size_t tuples = dims[0] * dims[1] * dims[2] * dims[3];
    const auto p = view.probs();

    std::vector<std::size_t> table(tuples, 0);
    double total = 0.0;
    for (std::size_t t = 0; t < tuples; ++t) {
        const double* row = p.data() + t * s1;
        double mass = 0.0;
        for (std::size_t a = 0; a < s1; ++a) mass += row[a];
        if (mass <= 0.0) continue;
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t r = 0; r < d1.recon_size(); ++r) {
            double cost = 0.0;
            for (std::size_t a = 0; a < s1; ++a) cost += row[a] * d1(a, r);
            if (cost < best) {
                best = cost;
                arg = r;
            }
        }
        table[t] = arg;
        total += best;
    }
    return {ReconstructionMap(dims, std::move(table)), total};
}

double expected_d1(const FullJoint& joint, const DistortionTable& d1, const ReconstructionMap& map) {
    const Pmf view = decoder1_view(joint);
    const std::size_t s1 = view.axes()[4].size();
    if (d1.source_size() != s1) throw DomainError("d1 rows do not match |S1|");
    const auto p = view.probs();
    const std::size_t tuples = p.size() / s1;
    if (map.table().size() != tuples) throw DomainError("reconstruction map domain does not match the joint");
    double total = 0.0;
    for (std::size_t t = 0; t < tuples; ++t) {
        const std::size_t r = map.table()[t];
        if (r >= d1.recon_size()) throw DomainError("reconstruction symbol out of range");
        for (std::size_t a = 0; a < s1; ++a) total += p[t * s1 + a] * d1(a, r);
    }
    return total;
}

double expected_d2(const FullJoint& joint, const DistortionTable& d2) {
    if (joint.kind() != ChannelKind::CommonReconstruction)
        throw DomainError("expected_d2 requires a common-reconstruction joint");
    const Pmf view = marginalize(joint.pmf(), {axis::S2hat, axis::S2}).reordered({axis::S2, axis::S2hat});
    const std::size_t s2 = view.axes()[0].size(), h = view.axes()[1].size();
    if (d2.source_size() != s2 || d2.recon_size() != h) throw DomainError("d2 does not cover S2 x S2hat");
    double total = 0.0;
    for (std::size_t a = 0; a < s2; ++a)
        for (std::size_t b = 0; b < h; ++b) total += view.probs()[a * h + b] * d2(a, b);
    return total;
}

}  // namespace hbrd
