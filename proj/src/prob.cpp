#include "hbrd/prob.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "hbrd/errors.hpp"

namespace hbrd {

namespace {

// Flat projection of p onto the axes listed (by index) in `order`.
std::vector<double> project(const Pmf& p, const std::vector<std::size_t>& order) {
    const auto& axes = p.axes();
    const std::size_t rank = axes.size();

    std::vector<std::size_t> target_stride(rank, 0);
    std::size_t out_size = 1;
    for (std::size_t k = order.size(); k-- > 0;) {
        target_stride[order[k]] = out_size;
        out_size *= axes[order[k]].size();
    }

    std::vector<double> out(out_size, 0.0);
    std::vector<std::size_t> idx(rank, 0);
    std::size_t target = 0;
    const auto probs = p.probs();
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        out[target] += probs[flat];
        // odometer, last axis fastest
        for (std::size_t a = rank; a-- > 0;) {
            if (++idx[a] < axes[a].size()) {
                target += target_stride[a];
                break;
            }
            target -= target_stride[a] * (axes[a].size() - 1);
            idx[a] = 0;
        }
    }
    return out;
}

std::vector<std::size_t> resolve(const Pmf& p, const Labels& labels) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        const std::size_t i = p.axis_index(l);
        if (std::find(out.begin(), out.end(), i) != out.end())
            throw DomainError("axis '" + l + "' listed twice");
        out.push_back(i);
    }
    return out;
}

void require_disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                      const Pmf& p) {
    for (auto i : a)
        if (std::find(b.begin(), b.end(), i) != b.end())
            throw DomainError("axis sets overlap on '" + p.axes()[i].name + "'");
}

std::size_t product_of_sizes(const Pmf& p, const std::vector<std::size_t>& idx) {
    std::size_t n = 1;
    for (auto i : idx) n *= p.axes()[i].size();
    return n;
}

// H(of | given) from a projection ordered (given..., of...).
double conditional_entropy(const std::vector<double>& joint, std::size_t given_count) {
    const std::size_t of_count = joint.size() / given_count;
    double h = 0.0;
    for (std::size_t g = 0; g < given_count; ++g) {
        const double* row = joint.data() + g * of_count;
        double mass = 0.0;
        for (std::size_t o = 0; o < of_count; ++o) mass += row[o];
        if (mass <= 0.0) continue;
        for (std::size_t o = 0; o < of_count; ++o)
            if (row[o] > 0.0) h -= row[o] * std::log2(row[o] / mass);
    }
    return std::max(h, 0.0);
}

}  // namespace

Alphabet::Alphabet(std::size_t size) : size_(size) {
    if (size == 0) throw DomainError("alphabet size must be at least 1");
}

std::size_t cell_count(std::span<const Axis> axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
}

Pmf::Pmf(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        for (std::size_t j = i + 1; j < axes_.size(); ++j)
            if (axes_[i].name == axes_[j].name)
                throw DomainError("duplicate axis label '" + axes_[i].name + "'");
    if (probs_.size() != hbrd::cell_count(axes_)) {
        std::ostringstream os;
        os << "pmf has " << probs_.size() << " entries but axes require " << hbrd::cell_count(axes_);
        throw DomainError(os.str());
    }
    double total = 0.0;
    for (double v : probs_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("pmf entries must be finite and nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "pmf sums to " << total << ", not 1";
        throw DomainError(os.str());
    }
}

Pmf Pmf::normalized(std::vector<Axis> axes, std::vector<double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("pmf weights must have positive total mass");
    for (auto& w : weights) w /= total;
    return Pmf(std::move(axes), std::move(weights));
}

bool Pmf::has_axis(std::string_view name) const noexcept {
    return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
}

std::size_t Pmf::axis_index(std::string_view name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return i;
    throw DomainError("unknown axis label '" + std::string(name) + "'");
}

Labels Pmf::labels() const {
    Labels out;
    for (const auto& a : axes_) out.push_back(a.name);
    return out;
}

double Pmf::at(std::span<const std::size_t> index) const {
    if (index.size() != axes_.size()) throw DomainError("index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (index[a] >= axes_[a].size()) throw DomainError("index out of range on '" + axes_[a].name + "'");
        flat = flat * axes_[a].size() + index[a];
    }
    return probs_[flat];
}

Pmf Pmf::reordered(const Labels& order) const {
    if (order.size() != axes_.size()) throw DomainError("reorder must name every axis exactly once");
    const auto idx = resolve(*this, order);
    std::vector<Axis> axes;
    for (auto i : idx) axes.push_back(axes_[i]);
    auto probs = project(*this, idx);
    return Pmf(std::move(axes), std::move(probs));
}

Pmf marginalize(const Pmf& p, const Labels& keep) {
    auto idx = resolve(p, keep);
    std::sort(idx.begin(), idx.end());
    std::vector<Axis> axes;
    for (auto i : idx) axes.push_back(p.axes()[i]);
    auto probs = project(p, idx);
    // Summation drift is far below kNormTolerance for the alphabets used here.
    return Pmf(std::move(axes), std::move(probs));
}

double entropy(const Pmf& p, const Labels& of, const Labels& given) {
    const auto of_idx = resolve(p, of);
    const auto given_idx = resolve(p, given);
    require_disjoint(of_idx, given_idx, p);
    if (of_idx.empty()) return 0.0;

    std::vector<std::size_t> order = given_idx;
    order.insert(order.end(), of_idx.begin(), of_idx.end());
    const auto joint = project(p, order);
    return conditional_entropy(joint, product_of_sizes(p, given_idx));
}

double mutual_information(const Pmf& p, const Labels& a, const Labels& b, const Labels& given) {
    const auto a_idx = resolve(p, a);
    const auto b_idx = resolve(p, b);
    const auto g_idx = resolve(p, given);
    require_disjoint(a_idx, b_idx, p);
    require_disjoint(a_idx, g_idx, p);
    require_disjoint(b_idx, g_idx, p);

    Labels bg = b;
    bg.insert(bg.end(), given.begin(), given.end());
    const double v = entropy(p, a, given) - entropy(p, a, bg);
    return std::max(v, 0.0);
}

CondPmf::CondPmf(std::vector<Axis> given_axes, std::vector<Axis> output_axes, std::vector<double> probs)
    : given_(std::move(given_axes)), output_(std::move(output_axes)), probs_(std::move(probs)) {
    given_count_ = cell_count(given_);
    output_count_ = cell_count(output_);
    for (const auto& g : given_)
        for (const auto& o : output_)
            if (g.name == o.name) throw DomainError("axis '" + g.name + "' is both given and output");
    if (probs_.size() != given_count_ * output_count_) {
        std::ostringstream os;
        os << "conditional pmf has " << probs_.size() << " entries but axes require "
           << given_count_ * output_count_;
        throw DomainError(os.str());
    }
    for (std::size_t g = 0; g < given_count_; ++g) {
        double total = 0.0;
        for (std::size_t o = 0; o < output_count_; ++o) {
            const double v = probs_[g * output_count_ + o];
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DomainError("conditional pmf entries must be finite and nonnegative");
            total += v;
        }
        if (std::abs(total - 1.0) > kNormTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "conditional pmf row " << g << " sums to " << total << ", not 1";
            throw DomainError(os.str());
        }
    }
}

}  // namespace hbrd
