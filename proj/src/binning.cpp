#include "hbrd/binning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "hbrd/errors.hpp"

namespace hbrd {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return mix(a ^ mix(b)); }
std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) { return mix(mix(a, b), c); }
std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix(mix(a, b, c), d);
}

double to_unit(std::uint64_t x) { return double(x >> 11) * 0x1p-53; }

enum : std::uint64_t { kTagPermutation = 1, kTagU0 = 2, kTagU1 = 3, kTagSource = 4, kTagBook = 5 };

std::uint8_t sample(const double* cdf, std::size_t n, double u) {
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (u < cdf[i]) return static_cast<std::uint8_t>(i);
    return static_cast<std::uint8_t>(n - 1);
}

// Row-wise cumulative distribution of `table` viewed as [rows][cols]; empty rows put all mass on 0.
std::vector<double> conditional_cdf(const std::vector<double>& table, std::size_t rows, std::size_t cols) {
    std::vector<double> cdf(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < cols; ++c) total += table[r * cols + c];
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += total > 0.0 ? table[r * cols + c] / total : (c == 0 ? 1.0 : 0.0);
            cdf[r * cols + c] = acc;
        }
        cdf[r * cols + cols - 1] = 1.0;
    }
    return cdf;
}

ReconstructionMap phi_for(const JointSourcePmf& source, const AuxChannel& channel, const DistortionTable& d1) {
    return optimal_phi(compose(source, channel), d1).map;
}

}  // namespace

IndexWidths IndexWidths::from(const SchemeRates& rates, unsigned n) {
    rates.validate();
    auto bits = [n](double r) {
        const double x = std::ceil(n * r - 1e-9);
        if (x > 62) throw DomainError("index width above 62 bits");
        return static_cast<unsigned>(std::max(x, 0.0));
    };
    IndexWidths w{bits(rates.R2), bits(rates.R0), bits(rates.R0p), bits(rates.R1), bits(rates.R1p)};
    w.w0p = std::min(w.w0p, w.w0);
    w.w1p = std::min(w.w1p, w.w1);
    return w;
}

TypicalityTest::TypicalityTest(std::vector<double> cell_probs, double epsilon)
    : probs_(std::move(cell_probs)), epsilon_(epsilon), counts_(probs_.size(), 0) {
    for (std::uint32_t c = 0; c < probs_.size(); ++c)
        if (probs_[c] > epsilon_) required_.push_back(c);
}

bool TypicalityTest::operator()(const std::uint32_t* cells, std::size_t n) const {
    touched_.clear();
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
        const std::uint32_t c = cells[i];
        if (probs_[c] <= 0.0) ok = false;
        if (counts_[c]++ == 0) touched_.push_back(c);
    }
    if (ok) {
        for (std::uint32_t c : touched_)
            if (std::abs(double(counts_[c]) / n - probs_[c]) > epsilon_) {
                ok = false;
                break;
            }
    }
    if (ok)
        for (std::uint32_t c : required_)
            if (counts_[c] == 0) {
                ok = false;
                break;
            }
    for (std::uint32_t c : touched_) counts_[c] = 0;
    return ok;
}

BinningScheme::BinningScheme(JointSourcePmf source, AuxChannel channel, DistortionTable d1, double epsilon)
    : source_(std::move(source)),
      channel_(std::move(channel)),
      d1_(std::move(d1)),
      epsilon_(epsilon),
      s1_(source_.s1_size()),
      s2_(source_.s2_size()),
      y1_(source_.y1_size()),
      y2_(source_.y2_size()),
      u0_(channel_.u0_size()),
      u1_(channel_.u1_size()),
      phi_(phi_for(source_, channel_, d1_)) {
    if (channel_.kind() != ChannelKind::OneDistortion)
        throw DomainError("the binning simulator needs a one-distortion channel");
    if (!(epsilon_ > 0.0)) throw DomainError("typicality epsilon must be positive");
    for (std::size_t a : {s1_, s2_, y1_, y2_, u0_, u1_})
        if (a > 255) throw DomainError("the simulator supports alphabets of at most 255 symbols");
    if (d1_.source_size() != s1_) throw DomainError("d1 rows do not match |S1|");

    const auto src = source_.pmf().probs();
    source_cdf_.resize(src.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) source_cdf_[i] = (acc += src[i]);
    source_cdf_.back() = 1.0;

    std::vector<double> p_s2(s2_, 0.0), p_s2y1(s2_ * y1_, 0.0), p_s2y2(s2_ * y2_, 0.0);
    std::vector<double> p_u0s2s1(u0_ * s2_ * s1_, 0.0), p_u0u1s2s1(u0_ * u1_ * s2_ * s1_, 0.0);
    std::vector<double> p_u0s2y2(u0_ * s2_ * y2_, 0.0), p_u0u1s2y1(u0_ * u1_ * s2_ * y1_, 0.0);
    std::vector<double> p_u0s2y1(u0_ * s2_ * y1_, 0.0), p_s1y1(s1_ * y1_, 0.0);
    std::vector<double> p_u0s2(u0_ * s2_, 0.0), p_u0s2u1(u0_ * s2_ * u1_, 0.0);

    for (std::size_t a = 0; a < s1_; ++a)
        for (std::size_t b = 0; b < s2_; ++b)
            for (std::size_t c = 0; c < y1_; ++c)
                for (std::size_t d = 0; d < y2_; ++d) {
                    const double q = source_.at(a, b, c, d);
                    if (q == 0.0) continue;
                    p_s2[b] += q;
                    p_s2y1[b * y1_ + c] += q;
                    p_s2y2[b * y2_ + d] += q;
                    p_s1y1[a * y1_ + c] += q;
                    for (std::size_t u = 0; u < u0_; ++u)
                        for (std::size_t v = 0; v < u1_; ++v) {
                            const double w = q * channel_.at(a, b, u * u1_ + v);
                            p_u0s2s1[(u * s2_ + b) * s1_ + a] += w;
                            p_u0u1s2s1[((u * u1_ + v) * s2_ + b) * s1_ + a] += w;
                            p_u0s2y2[(u * s2_ + b) * y2_ + d] += w;
                            p_u0u1s2y1[((u * u1_ + v) * s2_ + b) * y1_ + c] += w;
                            p_u0s2y1[(u * s2_ + b) * y1_ + c] += w;
                            p_u0s2[b * u0_ + u] += w;
                            p_u0s2u1[(u * s2_ + b) * u1_ + v] += w;
                        }
                }

    u0_cdf_ = conditional_cdf(p_u0s2, s2_, u0_);
    u1_cdf_ = conditional_cdf(p_u0s2u1, u0_ * s2_, u1_);

    fallback_.resize(y1_);
    for (std::size_t c = 0; c < y1_; ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < d1_.recon_size(); ++r) {
            double cost = 0.0;
            for (std::size_t a = 0; a < s1_; ++a) cost += p_s1y1[a * y1_ + c] * d1_(a, r);
            if (cost < best) {
                best = cost;
                fallback_[c] = static_cast<std::uint8_t>(r);
            }
        }
    }

    t_s2_ = TypicalityTest(p_s2, epsilon_);
    t_u0_s2_s1_ = TypicalityTest(p_u0s2s1, epsilon_);
    t_u0_u1_s2_s1_ = TypicalityTest(p_u0u1s2s1, epsilon_);
    t_u0_s2_y2_ = TypicalityTest(p_u0s2y2, epsilon_);
    t_u0_u1_s2_y1_ = TypicalityTest(p_u0u1s2y1, epsilon_);
    t_s2_y1_ = TypicalityTest(p_s2y1, epsilon_);
    t_s2_y2_ = TypicalityTest(p_s2y2, epsilon_);
    t_u0_s2_y1_ = TypicalityTest(p_u0s2y1, epsilon_);
}

std::array<std::uint8_t, 4> BinningScheme::draw_source(double uniform) const {
    const auto it = std::upper_bound(source_cdf_.begin(), source_cdf_.end(), uniform);
    std::size_t i = std::min<std::size_t>(it - source_cdf_.begin(), source_cdf_.size() - 1);
    // skip zero-mass cells that share a cdf value
    while (source_.pmf().probs()[i] == 0.0 && i + 1 < source_cdf_.size()) ++i;
    const std::uint8_t d = i % y2_;
    i /= y2_;
    const std::uint8_t c = i % y1_;
    i /= y1_;
    const std::uint8_t b = i % s2_;
    const std::uint8_t a = static_cast<std::uint8_t>(i / s2_);
    return {a, b, c, d};
}

std::uint8_t BinningScheme::draw_u0(std::uint8_t s2, double uniform) const {
    return sample(u0_cdf_.data() + s2 * u0_, u0_, uniform);
}

std::uint8_t BinningScheme::draw_u1(std::uint8_t u0, std::uint8_t s2, double uniform) const {
    return sample(u1_cdf_.data() + (u0 * s2_ + s2) * u1_, u1_, uniform);
}

Codebooks::Codebooks(const BinningScheme& scheme, unsigned n, const IndexWidths& widths, std::uint64_t seed)
    : scheme_(&scheme), n_(n), widths_(widths), seed_(seed) {
    if (n == 0 || n > kMaxBlocklength) throw DomainError("blocklength must be in [1, 20]");
    const double space = std::pow(double(scheme.s2()), double(n));
    if (space > std::ldexp(1.0, 62)) {
        std::ostringstream os;
        os << "|S2|^n = " << space << " sequences exceeds the 2^62 index space";
        throw BudgetError(space, std::ldexp(1.0, 62), os.str());
    }
    space_ = 1;
    for (unsigned i = 0; i < n; ++i) space_ *= scheme.s2();
    unsigned bits = 0;
    while ((std::uint64_t{1} << bits) < space_) ++bits;
    half_bits_ = std::max(1u, (bits + 1) / 2);
}

std::uint64_t Codebooks::s2_index(const Sequence& s2) const {
    std::uint64_t idx = 0;
    for (std::size_t i = s2.size(); i-- > 0;) idx = idx * scheme_->s2() + s2[i];
    return idx;
}

Sequence Codebooks::s2_sequence(std::uint64_t index) const {
    Sequence s(n_);
    for (unsigned i = 0; i < n_; ++i) {
        s[i] = static_cast<std::uint8_t>(index % scheme_->s2());
        index /= scheme_->s2();
    }
    return s;
}

std::uint64_t Codebooks::feistel(std::uint64_t x, bool forward) const {
    const std::uint64_t mask = (std::uint64_t{1} << half_bits_) - 1;
    std::uint64_t l = x >> half_bits_, r = x & mask;
    constexpr int kRounds = 6;
    const std::uint64_t key = mix(seed_, kTagPermutation);
    if (forward) {
        for (int k = 0; k < kRounds; ++k) {
            const std::uint64_t t = l ^ (mix(key, k, r) & mask);
            l = r;
            r = t;
        }
    } else {
        for (int k = kRounds; k-- > 0;) {
            const std::uint64_t t = r ^ (mix(key, k, l) & mask);
            r = l;
            l = t;
        }
    }
    return (l << half_bits_) | r;
}

// Cycle walking keeps the permutation inside [0, |S2|^n).
std::uint64_t Codebooks::permute(std::uint64_t x) const {
    do x = feistel(x, true);
    while (x >= space_);
    return x;
}

std::uint64_t Codebooks::unpermute(std::uint64_t x) const {
    do x = feistel(x, false);
    while (x >= space_);
    return x;
}

std::uint64_t Codebooks::s2_bin(std::uint64_t index) const {
    if (widths_.w2 >= 63) return permute(index);
    return permute(index) & ((std::uint64_t{1} << widths_.w2) - 1);
}

std::uint64_t Codebooks::s2_bin_size() const noexcept {
    if (widths_.w2 >= 63) return 1;
    const std::uint64_t bins = std::uint64_t{1} << widths_.w2;
    return (space_ + bins - 1) / bins;
}

std::optional<std::uint64_t> Codebooks::s2_bin_member(std::uint64_t bin, std::uint64_t k) const {
    const std::uint64_t y = widths_.w2 >= 63 ? bin : bin + (k << widths_.w2);
    if (y >= space_ || (widths_.w2 >= 63 && k > 0)) return std::nullopt;
    return unpermute(y);
}

void Codebooks::u0_codeword(std::uint64_t s2_index, const Sequence& s2, std::uint64_t w0, Sequence& out) const {
    out.resize(n_);
    const std::uint64_t h = mix(seed_, kTagU0, s2_index, w0);
    for (unsigned i = 0; i < n_; ++i) out[i] = scheme_->draw_u0(s2[i], to_unit(mix(h, i)));
}

void Codebooks::u1_codeword(std::uint64_t s2_index, const Sequence& s2, std::uint64_t w0, const Sequence& u0,
                            std::uint64_t w1, Sequence& out) const {
    out.resize(n_);
    const std::uint64_t h = mix(mix(seed_, kTagU1, s2_index, w0), w1);
    for (unsigned i = 0; i < n_; ++i) out[i] = scheme_->draw_u1(u0[i], s2[i], to_unit(mix(h, i)));
}

Codebooks generate_codebooks(const BinningScheme& scheme, unsigned n, const SchemeRates& rates, std::uint64_t seed) {
    return Codebooks(scheme, n, IndexWidths::from(rates, n), seed);
}

const char* to_string(EncodeFailure f) noexcept {
    switch (f) {
        case EncodeFailure::NonTypicalS2: return "non-typical s2";
        case EncodeFailure::NoU0Cover: return "no u0 cover";
        case EncodeFailure::NoU1Cover: return "no u1 cover";
    }
    return "?";
}

const char* to_string(DecodeError e) noexcept { return e == DecodeError::None ? "none" : "ambiguous"; }

namespace {

struct Cells {
    std::vector<std::uint32_t> v;
    explicit Cells(unsigned n) : v(n) {}
    std::uint32_t* data() { return v.data(); }
};

}  // namespace

EncodeResult encode(const Codebooks& cb, const Sequence& s1, const Sequence& s2) {
    const BinningScheme& sc = cb.scheme();
    const unsigned n = cb.n();
    if (s1.size() != n || s2.size() != n) throw DomainError("sequence length does not match the blocklength");
    EncodeResult out;
    Cells cells(n);
    for (unsigned i = 0; i < n; ++i) cells.v[i] = s2[i];
    if (!sc.t_s2()(cells.data(), n)) {
        out.failure = EncodeFailure::NonTypicalS2;
        return out;
    }
    const std::uint64_t idx = cb.s2_index(s2);
    out.w2 = cb.s2_bin(idx);

    Sequence u0(n), u1(n);
    bool found = false;
    for (std::uint64_t w0 = 0; w0 < cb.u0_count() && !found; ++w0) {
        cb.u0_codeword(idx, s2, w0, u0);
        for (unsigned i = 0; i < n; ++i) cells.v[i] = (u0[i] * sc.s2() + s2[i]) * sc.s1() + s1[i];
        if (sc.t_u0_s2_s1()(cells.data(), n)) {
            out.w0 = w0;
            found = true;
        }
    }
    if (!found) {
        out.failure = EncodeFailure::NoU0Cover;
        return out;
    }
    cb.u0_codeword(idx, s2, out.w0, u0);
    found = false;
    for (std::uint64_t w1 = 0; w1 < cb.u1_count() && !found; ++w1) {
        cb.u1_codeword(idx, s2, out.w0, u0, w1, u1);
        for (unsigned i = 0; i < n; ++i)
            cells.v[i] = ((u0[i] * sc.u1() + u1[i]) * sc.s2() + s2[i]) * sc.s1() + s1[i];
        if (sc.t_u0_u1_s2_s1()(cells.data(), n)) {
            out.w1 = w1;
            found = true;
        }
    }
    if (!found) {
        out.failure = EncodeFailure::NoU1Cover;
        return out;
    }
    out.w0p = cb.u0_bin(out.w0);
    out.w1p = cb.u1_bin(out.w1);
    return out;
}

double candidate_bound(const Codebooks& cb) {
    const auto& w = cb.widths();
    const double u0_per_bin = std::ldexp(1.0, int(w.w0 - w.w0p));
    const double u1_per_bin = std::ldexp(1.0, int(w.w1 - w.w1p));
    const double decode = double(cb.s2_bin_size()) * u0_per_bin * (1.0 + u1_per_bin);
    const double cover = std::ldexp(1.0, int(w.w0)) + std::ldexp(1.0, int(w.w1));
    return std::max(decode, cover);
}

namespace {

// Lists typical S2 sequences of bin w2 whose letters are compatible with y.
template <class F>
void for_each_candidate_s2(const Codebooks& cb, std::uint64_t w2, const Sequence& y, std::size_t y_card,
                           const TypicalityTest& s2y, F&& f) {
    const BinningScheme& sc = cb.scheme();
    const unsigned n = cb.n();
    std::vector<std::uint32_t> cells(n);
    for (std::uint64_t k = 0; k < cb.s2_bin_size(); ++k) {
        const auto idx = cb.s2_bin_member(w2, k);
        if (!idx) break;
        const Sequence s2 = cb.s2_sequence(*idx);
        bool ok = true;
        for (unsigned i = 0; i < n && ok; ++i) ok = s2y.in_support(s2[i] * y_card + y[i]);
        if (!ok) continue;
        for (unsigned i = 0; i < n; ++i) cells[i] = s2[i];
        if (!sc.t_s2()(cells.data(), n)) continue;
        if (!f(*idx, s2)) return;
    }
}

}  // namespace

Decode2Result decode2(const Codebooks& cb, std::uint64_t w2, std::uint64_t w0p, const Sequence& y2) {
    const BinningScheme& sc = cb.scheme();
    const unsigned n = cb.n();
    if (y2.size() != n) throw DomainError("sequence length does not match the blocklength");
    const auto& w = cb.widths();
    const std::uint64_t per_bin = std::uint64_t{1} << (w.w0 - w.w0p);

    Decode2Result out;
    int found = 0;
    Sequence u0(n);
    std::vector<std::uint32_t> cells(n);
    for_each_candidate_s2(cb, w2, y2, sc.y2(), sc.t_s2_y2(), [&](std::uint64_t idx, const Sequence& s2) {
        for (std::uint64_t j = 0; j < per_bin; ++j) {
            const std::uint64_t w0 = w0p | (j << w.w0p);
            cb.u0_codeword(idx, s2, w0, u0);
            for (unsigned i = 0; i < n; ++i) cells[i] = (u0[i] * sc.s2() + s2[i]) * sc.y2() + y2[i];
            if (!sc.t_u0_s2_y2()(cells.data(), n)) continue;
            if (++found == 1) {
                out.s2 = s2;
                out.u0 = u0;
            } else {
                return false;
            }
        }
        return true;
    });
    if (found == 0) out.error = DecodeError::None;
    if (found > 1) out.error = DecodeError::Ambiguous;
    return out;
}

Decode1Result decode1(const Codebooks& cb, std::uint64_t w2, std::uint64_t w0p, std::uint64_t w1p,
                      const Sequence& y1) {
    const BinningScheme& sc = cb.scheme();
    const unsigned n = cb.n();
    if (y1.size() != n) throw DomainError("sequence length does not match the blocklength");
    const auto& w = cb.widths();
    const std::uint64_t u0_per_bin = std::uint64_t{1} << (w.w0 - w.w0p);
    const std::uint64_t u1_per_bin = std::uint64_t{1} << (w.w1 - w.w1p);

    Decode1Result out;
    int found = 0;
    Sequence u0(n), u1(n), best_u0, best_u1;
    std::vector<std::uint32_t> cells(n);
    for_each_candidate_s2(cb, w2, y1, sc.y1(), sc.t_s2_y1(), [&](std::uint64_t idx, const Sequence& s2) {
        for (std::uint64_t j = 0; j < u0_per_bin; ++j) {
            const std::uint64_t w0 = w0p | (j << w.w0p);
            cb.u0_codeword(idx, s2, w0, u0);
            bool ok = true;
            for (unsigned i = 0; i < n && ok; ++i)
                ok = sc.t_u0_s2_y1().in_support((u0[i] * sc.s2() + s2[i]) * sc.y1() + y1[i]);
            if (!ok) continue;
            for (std::uint64_t k = 0; k < u1_per_bin; ++k) {
                const std::uint64_t w1 = w1p | (k << w.w1p);
                cb.u1_codeword(idx, s2, w0, u0, w1, u1);
                for (unsigned i = 0; i < n; ++i)
                    cells[i] = ((u0[i] * sc.u1() + u1[i]) * sc.s2() + s2[i]) * sc.y1() + y1[i];
                if (!sc.t_u0_u1_s2_y1()(cells.data(), n)) continue;
                if (++found == 1) {
                    out.s2 = s2;
                    best_u0 = u0;
                    best_u1 = u1;
                } else {
                    return false;
                }
            }
        }
        return true;
    });
    if (found == 0) out.error = DecodeError::None;
    if (found > 1) out.error = DecodeError::Ambiguous;
    if (found == 1) {
        out.s1hat.resize(n);
        for (unsigned i = 0; i < n; ++i) out.s1hat[i] = sc.phi(best_u0[i], best_u1[i], out.s2[i], y1[i]);
    }
    return out;
}

namespace {

struct TrialOutcome {
    bool encode_failure = false, decode1_error = false, decode2_error = false;
    double distortion = 0.0;
};

TrialOutcome run_one(const Codebooks& cb, std::uint64_t trial_seed) {
    const BinningScheme& sc = cb.scheme();
    const unsigned n = cb.n();
    Sequence s1(n), s2(n), y1(n), y2(n);
    for (unsigned i = 0; i < n; ++i) {
        const auto letter = sc.draw_source(to_unit(mix(trial_seed, kTagSource, i)));
        s1[i] = letter[0];
        s2[i] = letter[1];
        y1[i] = letter[2];
        y2[i] = letter[3];
    }

    TrialOutcome out;
    auto fallback_distortion = [&] {
        double d = 0.0;
        for (unsigned i = 0; i < n; ++i) d += sc.d1(s1[i], sc.fallback(y1[i]));
        return d / n;
    };

    const EncodeResult e = encode(cb, s1, s2);
    if (e.failure) {
        out.encode_failure = true;
        out.distortion = fallback_distortion();
        return out;
    }
    const Decode2Result d2 = decode2(cb, e.w2, e.w0p, y2);
    out.decode2_error = d2.error.has_value() || d2.s2 != s2;
    const Decode1Result d1 = decode1(cb, e.w2, e.w0p, e.w1p, y1);
    out.decode1_error = d1.error.has_value() || d1.s2 != s2;
    if (d1.error) {
        out.distortion = fallback_distortion();
    } else {
        double d = 0.0;
        for (unsigned i = 0; i < n; ++i) d += sc.d1(s1[i], d1.s1hat[i]);
        out.distortion = d / n;
    }
    return out;
}

}  // namespace

TrialStats run_trials(const BinningScheme& scheme, unsigned n, const SchemeRates& rates,
                      const SimulationOptions& options) {
    if (options.trials == 0) throw DomainError("trials must be positive");
    if (options.regenerate_every == 0) throw DomainError("regenerate_every must be positive");
    const IndexWidths widths = IndexWidths::from(rates, n);
    {
        const Codebooks probe(scheme, n, widths, options.seed);
        const double bound = candidate_bound(probe);
        if (bound > options.candidate_budget) {
            std::ostringstream os;
            os << "a single trial may examine " << bound << " candidates, above the budget of "
               << options.candidate_budget;
            throw BudgetError(bound, options.candidate_budget, os.str());
        }
    }

    std::vector<TrialOutcome> outcomes(options.trials);
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        std::optional<Codebooks> cb;
        std::uint64_t block = std::numeric_limits<std::uint64_t>::max();
        for (std::uint64_t t = begin; t < end; ++t) {
            const std::uint64_t b = t / options.regenerate_every;
            if (b != block) {
                cb.emplace(scheme, n, widths, mix(options.seed, kTagBook, b));
                block = b;
            }
            outcomes[t] = run_one(*cb, mix(options.seed, kTagSource, t, 0));
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, unsigned(options.trials)));
    if (threads == 1) {
        work(0, options.trials);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (options.trials + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::uint64_t b = k * chunk, e = std::min(options.trials, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) t.join();
    }

    TrialStats s;
    s.trials = options.trials;
    double dist = 0.0;
    for (const auto& o : outcomes) {
        s.encode_failures += o.encode_failure;
        s.decode1_errors += o.decode1_error;
        s.decode2_errors += o.decode2_error;
        s.errors += o.encode_failure || o.decode1_error || o.decode2_error;
        dist += o.distortion;
    }
    s.empirical_Pe = double(s.errors) / s.trials;
    s.avg_d1 = dist / s.trials;
    return s;
}

std::string to_csv(const SimulationRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%u,%.6f,%.6f,%.6f,%.6f,%.6g,%llu,%.6f,%.6f", row.n, row.R_total, row.R2, row.R0p,
                  row.R1p, row.epsilon, static_cast<unsigned long long>(row.stats.trials), row.stats.empirical_Pe,
                  row.stats.avg_d1);
    return buf;
}

}  // namespace hbrd
