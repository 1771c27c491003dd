#pragma once

// Monte-Carlo simulation of the layered binning scheme at small blocklength.
//
// S2 sequences are binned by a keyed permutation of [0, |S2|^n): the bin of a
// sequence is the low bits of its permuted index, so the members of a bin can
// be listed without storing a table. Codewords are never stored either; every
// symbol is drawn on demand from a counter-based hash of (seed, s2 sequence,
// codeword index, position), which gives the same ensemble as pre-generated
// i.i.d. codebooks. Since codewords are i.i.d., the bin of a codeword index is
// simply its low bits.
//
// Typicality is absolute: a tuple of sequences is typical for P when every
// cell's empirical frequency is within epsilon of P and no zero-probability
// cell occurs.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hbrd/model.hpp"
#include "hbrd/rate_region.hpp"

namespace hbrd {

using Sequence = std::vector<std::uint8_t>;

inline constexpr unsigned kMaxBlocklength = 20;

/// Index widths ceil(n R) in bits.
struct IndexWidths {
    unsigned w2 = 0, w0 = 0, w0p = 0, w1 = 0, w1p = 0;

    static IndexWidths from(const SchemeRates& rates, unsigned n);
    /// Transmitted bits per source symbol.
    double total_rate(unsigned n) const noexcept { return double(w2 + w0p + w1p) / n; }
};

/// Empirical-frequency test against a fixed pmf over a flattened product alphabet.
class TypicalityTest {
public:
    TypicalityTest() = default;
    TypicalityTest(std::vector<double> cell_probs, double epsilon);

    /// `cells[i]` is the flattened cell of position i.
    bool operator()(const std::uint32_t* cells, std::size_t n) const;
    bool in_support(std::uint32_t cell) const { return probs_[cell] > 0.0; }

private:
    std::vector<double> probs_;
    std::vector<std::uint32_t> required_;  // cells whose probability exceeds epsilon
    double epsilon_ = 0.0;
    mutable std::vector<std::uint32_t> counts_;
    mutable std::vector<std::uint32_t> touched_;
};

/// Source, channel and every derived table the scheme needs; independent of n.
class BinningScheme {
public:
    BinningScheme(JointSourcePmf source, AuxChannel channel, DistortionTable d1, double epsilon);

    const JointSourcePmf& source() const noexcept { return source_; }
    const AuxChannel& channel() const noexcept { return channel_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t s1() const noexcept { return s1_; }
    std::size_t s2() const noexcept { return s2_; }
    std::size_t y1() const noexcept { return y1_; }
    std::size_t y2() const noexcept { return y2_; }
    std::size_t u0() const noexcept { return u0_; }
    std::size_t u1() const noexcept { return u1_; }

    /// Draws one source letter (s1, s2, y1, y2) from a uniform variate.
    std::array<std::uint8_t, 4> draw_source(double uniform) const;
    std::uint8_t draw_u0(std::uint8_t s2, double uniform) const;
    std::uint8_t draw_u1(std::uint8_t u0, std::uint8_t s2, double uniform) const;

    std::uint8_t phi(std::uint8_t u0, std::uint8_t u1, std::uint8_t s2, std::uint8_t y1) const {
        return static_cast<std::uint8_t>(phi_(u0, u1, s2, y1));
    }
    /// Estimate of S1 from Y1 alone, used when decoding fails.
    std::uint8_t fallback(std::uint8_t y1) const { return fallback_[y1]; }
    double d1(std::uint8_t s1, std::uint8_t r) const { return d1_(s1, r); }

    // Typicality tests; cells are flattened in the listed order.
    const TypicalityTest& t_s2() const noexcept { return t_s2_; }
    const TypicalityTest& t_u0_s2_s1() const noexcept { return t_u0_s2_s1_; }
    const TypicalityTest& t_u0_u1_s2_s1() const noexcept { return t_u0_u1_s2_s1_; }
    const TypicalityTest& t_u0_s2_y2() const noexcept { return t_u0_s2_y2_; }
    const TypicalityTest& t_u0_u1_s2_y1() const noexcept { return t_u0_u1_s2_y1_; }
    const TypicalityTest& t_s2_y1() const noexcept { return t_s2_y1_; }
    const TypicalityTest& t_s2_y2() const noexcept { return t_s2_y2_; }
    const TypicalityTest& t_u0_s2_y1() const noexcept { return t_u0_s2_y1_; }

private:
    JointSourcePmf source_;
    AuxChannel channel_;
    DistortionTable d1_;
    double epsilon_;
    std::size_t s1_, s2_, y1_, y2_, u0_, u1_;
    std::vector<double> source_cdf_;
    std::vector<double> u0_cdf_;  // [s2][u0]
    std::vector<double> u1_cdf_;  // [u0][s2][u1]
    ReconstructionMap phi_;
    std::vector<std::uint8_t> fallback_;
    TypicalityTest t_s2_, t_u0_s2_s1_, t_u0_u1_s2_s1_, t_u0_s2_y2_, t_u0_u1_s2_y1_, t_s2_y1_, t_s2_y2_, t_u0_s2_y1_;
};

/// Lazily materialized codebooks for one blocklength and one random draw.
class Codebooks {
public:
    Codebooks(const BinningScheme& scheme, unsigned n, const IndexWidths& widths, std::uint64_t seed);

    const BinningScheme& scheme() const noexcept { return *scheme_; }
    unsigned n() const noexcept { return n_; }
    const IndexWidths& widths() const noexcept { return widths_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t s2_index(const Sequence& s2) const;
    Sequence s2_sequence(std::uint64_t index) const;
    std::uint64_t s2_bin(std::uint64_t index) const;
    std::uint64_t s2_bin_size() const noexcept;
    /// Index of the k-th member of a bin, k < s2_bin_size(); may be past the end for the last bins.
    std::optional<std::uint64_t> s2_bin_member(std::uint64_t bin, std::uint64_t k) const;

    std::uint64_t u0_count() const noexcept { return std::uint64_t{1} << widths_.w0; }
    std::uint64_t u1_count() const noexcept { return std::uint64_t{1} << widths_.w1; }
    std::uint64_t u0_bin(std::uint64_t w0) const noexcept { return w0 & ((std::uint64_t{1} << widths_.w0p) - 1); }
    std::uint64_t u1_bin(std::uint64_t w1) const noexcept { return w1 & ((std::uint64_t{1} << widths_.w1p) - 1); }

    void u0_codeword(std::uint64_t s2_index, const Sequence& s2, std::uint64_t w0, Sequence& out) const;
    void u1_codeword(std::uint64_t s2_index, const Sequence& s2, std::uint64_t w0, const Sequence& u0,
                     std::uint64_t w1, Sequence& out) const;

private:
    std::uint64_t permute(std::uint64_t x) const;
    std::uint64_t unpermute(std::uint64_t x) const;
    std::uint64_t feistel(std::uint64_t x, bool forward) const;

    const BinningScheme* scheme_;
    unsigned n_;
    IndexWidths widths_;
    std::uint64_t seed_;
    std::uint64_t space_ = 1;  // |S2|^n
    unsigned half_bits_ = 1;
};

Codebooks generate_codebooks(const BinningScheme& scheme, unsigned n, const SchemeRates& rates, std::uint64_t seed);

enum class EncodeFailure { NonTypicalS2, NoU0Cover, NoU1Cover };
const char* to_string(EncodeFailure f) noexcept;

struct EncodeResult {
    std::optional<EncodeFailure> failure;
    std::uint64_t w2 = 0, w0 = 0, w1 = 0;
    std::uint64_t w0p = 0, w1p = 0;  ///< transmitted bin indices
};

EncodeResult encode(const Codebooks& cb, const Sequence& s1, const Sequence& s2);

/// None: no candidate matched.
enum class DecodeError { None, Ambiguous };
const char* to_string(DecodeError e) noexcept;

struct Decode2Result {
    std::optional<DecodeError> error;
    Sequence s2, u0;
};

struct Decode1Result {
    std::optional<DecodeError> error;
    Sequence s2, s1hat;
};

/// Limit on candidate tuples a single decoding may examine.
inline constexpr double kDefaultCandidateBudget = 1e7;

/// Worst-case candidate tuples per decoding for these codebooks.
double candidate_bound(const Codebooks& cb);

Decode2Result decode2(const Codebooks& cb, std::uint64_t w2, std::uint64_t w0p, const Sequence& y2);
Decode1Result decode1(const Codebooks& cb, std::uint64_t w2, std::uint64_t w0p, std::uint64_t w1p,
                      const Sequence& y1);

struct SimulationOptions {
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    /// Fresh codebooks every this many trials.
    std::uint64_t regenerate_every = 1;
    double candidate_budget = kDefaultCandidateBudget;
    unsigned threads = 1;
};

struct TrialStats {
    std::uint64_t trials = 0;
    std::uint64_t encode_failures = 0;
    /// Decoder errors among trials whose encoding succeeded.
    std::uint64_t decode1_errors = 0;
    std::uint64_t decode2_errors = 0;
    /// Trials with an encoding failure or a wrong S2 at either decoder.
    std::uint64_t errors = 0;
    double empirical_Pe = 0.0;
    /// Per-symbol distortion averaged over all trials; failed decodings use the Y1-only estimate.
    double avg_d1 = 0.0;
};

/// Throws BudgetError when a decoding could exceed options.candidate_budget.
TrialStats run_trials(const BinningScheme& scheme, unsigned n, const SchemeRates& rates,
                      const SimulationOptions& options);

struct SimulationRow {
    unsigned n;
    double R_total, R2, R0p, R1p;
    double epsilon;
    TrialStats stats;
};

inline constexpr const char* kSimulationCsvHeader = "n,R_total,R2,R0p,R1p,epsilon,trials,Pe,avg_d1";
std::string to_csv(const SimulationRow& row);

}  // namespace hbrd
