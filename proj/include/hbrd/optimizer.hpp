#pragma once

// Minimization of the rate objectives over auxiliary channels.
//
// Both strategies search the lattice of conditional pmfs whose every column
// (one per (s1, s2)) has entries that are multiples of 1/grid_denominator.
// grid_oracle enumerates it exhaustively; heuristic_search runs seeded local
// search on it. On a shared lattice the oracle value is therefore a true lower
// bound for the heuristic.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hbrd/objective.hpp"

namespace hbrd {

struct SearchConfig {
    std::size_t u0_card = 2;
    std::size_t u1_card = 1;
    std::size_t s2hat_card = 2;
    /// grid_step = 1 / grid_denominator.
    unsigned grid_denominator = 8;
    std::size_t restarts = 64;
    /// Objective evaluations allowed per restart.
    std::size_t max_iters = 200000;
    std::uint64_t seed = 1;
    double tolerance = 1e-6;
    /// Largest lattice the oracle will enumerate.
    double budget = 1e8;
    unsigned threads = 1;

    double grid_step() const noexcept { return 1.0 / grid_denominator; }

    /// |U0| = |S1||S2| + 2, |U1| = |S1||S2| + 1 (1 for the lossless objective), |S2hat| = |S2|.
    static SearchConfig defaults_for(const Problem& problem);
    void validate() const;
};

enum class Strategy { GridOracle, Heuristic };

const char* to_string(Strategy strategy) noexcept;

struct OptimizeResult {
    /// Reference evaluation of `channel`.
    RateBreakdown best;
    AuxChannel channel;
    Strategy strategy;
    std::uint64_t evaluations = 0;
    /// False when no feasible channel was found; `channel` then has the least distortion excess.
    bool feasible = false;
};

/// Number of lattice channels for this problem and configuration.
double grid_size(const Problem& problem, const SearchConfig& cfg);

/// Channels grid_oracle evaluates. On vertex grids with |U1| = 1 and S2 as the common
/// reconstruction, U0 labelings equal up to a relabeling within each S2 slice are visited once.
double oracle_enumeration_size(const Problem& problem, const SearchConfig& cfg);
/// Exact minimum over the lattice. Throws BudgetError when oracle_enumeration_size exceeds cfg.budget.
OptimizeResult grid_oracle(const Problem& problem, const SearchConfig& cfg);

/// Random-restart local search; `warm_start` (snapped to the lattice) replaces restart 0.
OptimizeResult heuristic_search(const Problem& problem, const SearchConfig& cfg,
                                const AuxChannel* warm_start = nullptr);

struct SweepPoint {
    double D1 = 0.0;
    double D2 = 0.0;
    OptimizeResult result;
};

/// R(D) along a nondecreasing path of targets. D2s may be empty (one-distortion
/// problems) or have one entry (held fixed) or match D1s in length. The curve is
/// post-processed into a running minimum.
std::vector<SweepPoint> sweep_distortion(const Problem& problem, std::span<const double> D1s,
                                         std::span<const double> D2s, const SearchConfig& cfg,
                                         Strategy strategy);

}  // namespace hbrd
