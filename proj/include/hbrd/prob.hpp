#pragma once

// Dense finite-alphabet probability tensors and exact information measures.
// All logarithms are base 2; values are in bits.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hbrd {

inline constexpr double kNormTolerance = 1e-12;

class Alphabet {
public:
    explicit Alphabet(std::size_t size);

    std::size_t size() const noexcept { return size_; }
    bool operator==(const Alphabet&) const = default;

private:
    std::size_t size_;
};

struct Axis {
    std::string name;
    Alphabet alphabet;

    Axis(std::string n, std::size_t size) : name(std::move(n)), alphabet(size) {}
    std::size_t size() const noexcept { return alphabet.size(); }
};

using Labels = std::vector<std::string>;

/// Row-major dense joint pmf. The last axis varies fastest.
class Pmf {
public:
    /// Validates shape, nonnegativity and normalization (within kNormTolerance).
    Pmf(std::vector<Axis> axes, std::vector<double> probs);

    /// Divides `weights` by their sum; throws if the sum is not positive.
    static Pmf normalized(std::vector<Axis> axes, std::vector<double> weights);

    const std::vector<Axis>& axes() const noexcept { return axes_; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t rank() const noexcept { return axes_.size(); }
    std::size_t cell_count() const noexcept { return probs_.size(); }

    bool has_axis(std::string_view name) const noexcept;
    std::size_t axis_index(std::string_view name) const;
    std::size_t axis_size(std::string_view name) const { return axes_[axis_index(name)].size(); }
    Labels labels() const;

    double at(std::span<const std::size_t> index) const;
    double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    /// Same distribution with its axes permuted into `order` (must name every axis once).
    Pmf reordered(const Labels& order) const;

private:
    std::vector<Axis> axes_;
    std::vector<double> probs_;
};

/// Sums out every axis not in `keep`; the result keeps p's axis order.
Pmf marginalize(const Pmf& p, const Labels& keep);

/// H(of | given) in bits. `of` and `given` must be disjoint.
double entropy(const Pmf& p, const Labels& of, const Labels& given = {});

/// I(a; b | given) in bits, clamped at zero.
double mutual_information(const Pmf& p, const Labels& a, const Labels& b, const Labels& given = {});

/// Conditional pmf P(output | given), stored given-major: probs[g * output_count + o].
class CondPmf {
public:
    CondPmf(std::vector<Axis> given_axes, std::vector<Axis> output_axes, std::vector<double> probs);

    const std::vector<Axis>& given_axes() const noexcept { return given_; }
    const std::vector<Axis>& output_axes() const noexcept { return output_; }
    std::span<const double> probs() const noexcept { return probs_; }

    std::size_t given_count() const noexcept { return given_count_; }
    std::size_t output_count() const noexcept { return output_count_; }

    std::span<const double> row(std::size_t given_flat) const {
        return std::span<const double>(probs_).subspan(given_flat * output_count_, output_count_);
    }
    double at(std::size_t given_flat, std::size_t output_flat) const {
        return probs_[given_flat * output_count_ + output_flat];
    }

private:
    std::vector<Axis> given_;
    std::vector<Axis> output_;
    std::vector<double> probs_;
    std::size_t given_count_ = 1;
    std::size_t output_count_ = 1;
};

/// Product of axis sizes.
std::size_t cell_count(std::span<const Axis> axes);

/// -x log2 x with 0 log 0 = 0.
inline double neg_xlogx(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

}  // namespace hbrd
