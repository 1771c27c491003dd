#include "hbrd/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "hbrd/errors.hpp"

namespace hbrd {

namespace {

struct Shape {
    std::size_t u0, u1, hat;
    std::size_t cols, outs;
};

Shape shape_of(const Problem& problem, const SearchConfig& cfg) {
    Shape s;
    s.u0 = cfg.u0_card;
    s.u1 = problem.objective == Objective::Corollary1 ? 1 : cfg.u1_card;
    s.hat = problem.objective == Objective::Theorem3 ? cfg.s2hat_card : 1;
    s.cols = problem.source.s1_size() * problem.source.s2_size();
    s.outs = s.u0 * s.u1 * s.hat;
    return s;
}

struct Candidate {
    bool feasible = false;
    double value = std::numeric_limits<double>::infinity();
    double excess = std::numeric_limits<double>::infinity();
    std::vector<double> probs;
};

bool lexicographically_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Strict total order: feasible first, then (value, channel) or (excess, value, channel).
bool better(const Candidate& a, const Candidate& b) {
    if (b.probs.empty()) return !a.probs.empty();
    if (a.probs.empty()) return false;
    if (a.feasible != b.feasible) return a.feasible;
    if (!a.feasible && a.excess != b.excess) return a.excess < b.excess;
    if (a.value != b.value) return a.value < b.value;
    return lexicographically_less(a.probs, b.probs);
}

std::vector<std::vector<unsigned>> compositions(unsigned total, std::size_t parts) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur(parts, 0);
    // Recursive fill, lexicographically descending in the first coordinate.
    auto rec = [&](auto&& self, std::size_t pos, unsigned left) -> void {
        if (pos + 1 == parts) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (unsigned v = left + 1; v-- > 0;) {
            cur[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, total);
    return out;
}

double binomial(double n, double k) {
    return std::round(std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

OptimizeResult finish(const ObjectiveEvaluator& eval, const Candidate& best, Strategy strategy,
                      std::uint64_t evaluations) {
    AuxChannel channel = eval.to_channel(best.probs);
    RateBreakdown report = eval.reference(channel);
    const bool feasible = report.feasible;
    return OptimizeResult{report, std::move(channel), strategy, evaluations, feasible};
}

// Largest-remainder rounding of a probability row onto multiples of 1/K.
void snap_row(const double* row, std::size_t n, unsigned K, unsigned* out) {
    std::vector<std::pair<double, std::size_t>> rem;
    unsigned used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::max(row[i], 0.0) * K;
        out[i] = static_cast<unsigned>(std::floor(x));
        used += out[i];
        rem.emplace_back(x - out[i], i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < K; ++k, ++used) ++out[rem[k % n].second];
    while (used > K) {
        for (std::size_t i = n; i-- > 0 && used > K;)
            if (out[i] > 0) {
                --out[i];
                --used;
            }
    }
}

class LocalSearch {
public:
    LocalSearch(const ObjectiveEvaluator& eval, const Shape& shape, unsigned K, std::size_t max_evals)
        : eval_(eval), shape_(shape), K_(K), max_evals_(max_evals) {}

    Candidate run(std::vector<unsigned> counts) {
        counts_ = std::move(counts);
        probs_.assign(counts_.size(), 0.0);
        for (std::size_t i = 0; i < counts_.size(); ++i) probs_[i] = double(counts_[i]) / K_;

        const bool constrained = eval_.problem().objective != Objective::Corollary1;
        static constexpr double kTemps[] = {1.0, 0.316227766, 0.1, 0.0316227766, 0.01, 0.00316227766, 0.001};
        double lambda = 10.0;
        const int rounds = constrained ? 6 : 1;
        for (int r = 0; r < rounds && evals_ < max_evals_; ++r) {
            if (r == 0)
                for (double tau : kTemps) descend(tau, lambda);
            else
                descend(0.001, lambda);
            descend(0.0, lambda);
            if (!constrained || eval_.feasible(eval_.evaluate(probs_))) break;
            lambda *= 10.0;
        }

        if (best_.feasible) {
            load(best_.probs);
            polish(constrained);
        }
        return best_;
    }

    std::uint64_t evaluations() const noexcept { return evals_; }

private:
    static constexpr double kInfeasible = std::numeric_limits<double>::infinity();

    void load(const std::vector<double>& probs) {
        probs_ = probs;
        for (std::size_t i = 0; i < probs_.size(); ++i) counts_[i] = static_cast<unsigned>(std::lround(probs_[i] * K_));
    }

    // Every evaluated lattice point competes for the result.
    Evaluation evaluate() {
        ++evals_;
        const Evaluation e = eval_.evaluate(probs_);
        Candidate c{eval_.feasible(e), e.rate(), eval_.excess(e), {}};
        bool take = best_.probs.empty() || (c.feasible && !best_.feasible);
        if (!take && c.feasible == best_.feasible) {
            const double key = c.feasible ? c.value : c.excess, cur = best_.feasible ? best_.value : best_.excess;
            take = key < cur || (key == cur && lexicographically_less(probs_, best_.probs));
        }
        if (take) {
            c.probs = probs_;
            best_ = std::move(c);
        }
        return e;
    }

    double score(double tau, double lambda) {
        const Evaluation e = evaluate();
        const double a = e.term_decoder1, b = e.term_decoder2;
        const double m = std::max(a, b);
        const double smax = tau > 0.0 ? m + tau * std::log(std::exp((a - m) / tau) + std::exp((b - m) / tau)) : m;
        return smax + e.individual_layer + lambda * eval_.excess(e);
    }

    double exact() {
        const Evaluation e = evaluate();
        return eval_.feasible(e) ? e.rate() : kInfeasible;
    }

    void shift(std::size_t from, std::size_t to, unsigned units) {
        counts_[from] -= units;
        counts_[to] += units;
        probs_[from] = double(counts_[from]) / K_;
        probs_[to] = double(counts_[to]) / K_;
    }

    // Coordinate descent: per column, per ordered pair of outputs, a doubling
    // line search over how much mass to move.
    template <class Score>
    bool descend_with(Score&& f) {
        double current = f();
        bool any = false, improved = true;
        while (improved && evals_ < max_evals_) {
            improved = false;
            for (std::size_t c = 0; c < shape_.cols; ++c) {
                const std::size_t base = c * shape_.outs;
                for (std::size_t i = 0; i < shape_.outs; ++i) {
                    for (std::size_t j = 0; j < shape_.outs; ++j) {
                        if (i == j || counts_[base + i] == 0) continue;
                        const unsigned avail = counts_[base + i];
                        unsigned best_t = 0;
                        double best = current;
                        for (unsigned t = 1;; t = std::min(2 * t, avail)) {
                            shift(base + i, base + j, t);
                            const double v = f();
                            shift(base + j, base + i, t);
                            if (v < best - 1e-13) {
                                best = v;
                                best_t = t;
                            }
                            if (t == avail) break;
                        }
                        if (best_t > 0) {
                            shift(base + i, base + j, best_t);
                            current = best;
                            improved = any = true;
                        }
                        if (evals_ >= max_evals_) return any;
                    }
                }
            }
        }
        return any;
    }

    void descend(double tau, double lambda) {
        descend_with([&] { return score(tau, lambda); });
    }

    // One unit of mass moved in each of two columns; lets the search trade
    // distortion between columns along the constraint boundary.
    bool paired_moves() {
        struct Move {
            std::size_t from, to;
        };
        std::vector<Move> moves;
        for (std::size_t c = 0; c < shape_.cols; ++c)
            for (std::size_t i = 0; i < shape_.outs; ++i)
                for (std::size_t j = 0; j < shape_.outs; ++j)
                    if (i != j) moves.push_back({c * shape_.outs + i, c * shape_.outs + j});
        double current = exact();
        bool any = false;
        for (std::size_t a = 0; a < moves.size(); ++a) {
            for (std::size_t b = a + 1; b < moves.size(); ++b) {
                const Move x = moves[a], y = moves[b];
                if (x.from / shape_.outs == y.from / shape_.outs) continue;
                if (counts_[x.from] == 0 || counts_[y.from] == 0) continue;
                shift(x.from, x.to, 1);
                shift(y.from, y.to, 1);
                const double v = exact();
                if (v < current - 1e-13) {
                    current = v;
                    any = true;
                } else {
                    shift(y.to, y.from, 1);
                    shift(x.to, x.from, 1);
                }
                if (evals_ >= max_evals_) return any;
            }
        }
        return any;
    }

    void polish(bool constrained) {
        while (evals_ < max_evals_) {
            descend_with([&] { return exact(); });
            if (!constrained || !paired_moves()) break;
        }
    }

    const ObjectiveEvaluator& eval_;
    Shape shape_;
    unsigned K_;
    std::size_t max_evals_;
    std::uint64_t evals_ = 0;
    std::vector<unsigned> counts_;
    std::vector<double> probs_;
    Candidate best_;
};

std::vector<unsigned> random_lattice_point(const Shape& shape, unsigned K, std::mt19937_64& rng) {
    std::vector<unsigned> counts(shape.cols * shape.outs);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> row(shape.outs);
    for (std::size_t c = 0; c < shape.cols; ++c) {
        double total = 0.0;
        for (auto& x : row) total += (x = expo(rng));
        for (auto& x : row) x /= total;
        snap_row(row.data(), shape.outs, K, counts.data() + c * shape.outs);
    }
    return counts;
}

}  // namespace

const char* to_string(Strategy strategy) noexcept {
    return strategy == Strategy::GridOracle ? "grid_oracle" : "heuristic";
}

SearchConfig SearchConfig::defaults_for(const Problem& problem) {
    SearchConfig cfg;
    const std::size_t s = problem.source.s1_size() * problem.source.s2_size();
    cfg.u0_card = s + 2;
    cfg.u1_card = problem.objective == Objective::Corollary1 ? 1 : s + 1;
    cfg.s2hat_card = problem.source.s2_size();
    return cfg;
}

void SearchConfig::validate() const {
    if (u0_card == 0 || u1_card == 0 || s2hat_card == 0)
        throw DomainError("auxiliary cardinalities must be at least 1");
    if (grid_denominator == 0) throw DomainError("grid_step must be 1/k for an integer k >= 1");
    if (restarts == 0) throw DomainError("restarts must be positive");
    if (max_iters == 0) throw DomainError("max_iters must be positive");
    if (!(tolerance >= 0.0)) throw DomainError("tolerance must be nonnegative");
    if (!(budget > 0.0)) throw DomainError("budget must be positive");
}

double grid_size(const Problem& problem, const SearchConfig& cfg) {
    const Shape s = shape_of(problem, cfg);
    const double per_column = binomial(cfg.grid_denominator + s.outs - 1.0, s.outs - 1.0);
    return std::pow(per_column, double(s.cols));
}

namespace {

bool slice_symmetric(const Problem& problem, const SearchConfig& cfg, const Shape& s) {
    return cfg.grid_denominator == 1 && s.u1 == 1 && problem.objective != Objective::Theorem3;
}

// Labelings of `length` items with labels < `labels` in which each label first appears after all smaller ones.
std::vector<std::vector<unsigned>> restricted_growth_strings(std::size_t length, std::size_t labels) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur(length, 0);
    auto rec = [&](auto&& self, std::size_t pos, unsigned used) -> void {
        if (pos == length) {
            out.push_back(cur);
            return;
        }
        for (unsigned v = 0; v <= used && v < labels; ++v) {
            cur[pos] = v;
            self(self, pos + 1, std::max(used, v + 1));
        }
    };
    rec(rec, 0, 0);
    return out;
}

}  // namespace

double oracle_enumeration_size(const Problem& problem, const SearchConfig& cfg) {
    const Shape s = shape_of(problem, cfg);
    if (!slice_symmetric(problem, cfg, s)) return grid_size(problem, cfg);
    const double per_slice = double(restricted_growth_strings(problem.source.s1_size(), s.u0).size());
    return std::pow(per_slice, double(problem.source.s2_size()));
}

OptimizeResult grid_oracle(const Problem& problem, const SearchConfig& cfg) {
    cfg.validate();
    const Shape shape = shape_of(problem, cfg);
    const double size = oracle_enumeration_size(problem, cfg);
    if (size > cfg.budget) {
        std::ostringstream os;
        os << "grid oracle would enumerate " << size << " channels, above the budget of " << cfg.budget;
        throw BudgetError(size, cfg.budget, os.str());
    }

    const ObjectiveEvaluator eval(problem, shape.u0, shape.u1, shape.hat);
    Candidate best;
    std::uint64_t evaluations = 0;
    auto consider = [&](const std::vector<double>& probs) {
        const Evaluation e = eval.evaluate(probs);
        ++evaluations;
        Candidate cand{eval.feasible(e), e.rate(), eval.excess(e), {}};
        if (best.probs.empty() || cand.feasible != best.feasible || cand.feasible || cand.excess <= best.excess) {
            cand.probs = probs;
            if (better(cand, best)) best = std::move(cand);
        }
    };

    if (slice_symmetric(problem, cfg, shape)) {
        const std::size_t n1 = problem.source.s1_size(), n2 = problem.source.s2_size();
        const auto labelings = restricted_growth_strings(n1, shape.u0);
        std::vector<double> probs(shape.cols * shape.outs, 0.0);
        std::vector<std::size_t> pick(n2, 0);
        auto load = [&](std::size_t s2, std::size_t from, std::size_t to) {
            for (std::size_t s1 = 0; s1 < n1; ++s1) {
                const std::size_t col = s1 * n2 + s2;
                probs[col * shape.outs + labelings[from][s1]] = 0.0;
                probs[col * shape.outs + labelings[to][s1]] = 1.0;
            }
        };
        for (std::size_t s2 = 0; s2 < n2; ++s2) load(s2, 0, 0);
        while (true) {
            consider(probs);
            std::size_t s2 = n2;
            while (s2-- > 0) {
                const std::size_t next = (pick[s2] + 1) % labelings.size();
                load(s2, pick[s2], next);
                pick[s2] = next;
                if (next != 0) break;
            }
            if (s2 == std::size_t(-1)) break;
        }
        return finish(eval, best, Strategy::GridOracle, evaluations);
    }

    const unsigned K = cfg.grid_denominator;
    const auto options = compositions(K, shape.outs);

    std::vector<double> probs(shape.cols * shape.outs, 0.0);
    std::vector<std::size_t> pick(shape.cols, 0);
    auto load = [&](std::size_t col) {
        for (std::size_t o = 0; o < shape.outs; ++o)
            probs[col * shape.outs + o] = double(options[pick[col]][o]) / K;
    };
    for (std::size_t c = 0; c < shape.cols; ++c) load(c);

    while (true) {
        consider(probs);
        std::size_t c = shape.cols;
        while (c-- > 0) {
            if (++pick[c] < options.size()) {
                load(c);
                break;
            }
            pick[c] = 0;
            load(c);
        }
        if (c == std::size_t(-1)) break;
    }
    return finish(eval, best, Strategy::GridOracle, evaluations);
}

OptimizeResult heuristic_search(const Problem& problem, const SearchConfig& cfg, const AuxChannel* warm_start) {
    cfg.validate();
    const Shape shape = shape_of(problem, cfg);
    const unsigned K = cfg.grid_denominator;

    std::optional<std::vector<unsigned>> warm;
    if (warm_start) {
        if (warm_start->output_count() != shape.outs || warm_start->cond().given_count() != shape.cols)
            throw DomainError("warm-start channel does not match the search shape");
        std::vector<unsigned> counts(shape.cols * shape.outs);
        for (std::size_t c = 0; c < shape.cols; ++c)
            snap_row(warm_start->cond().row(c).data(), shape.outs, K, counts.data() + c * shape.outs);
        warm = std::move(counts);
    }

    std::vector<Candidate> results(cfg.restarts);
    std::vector<std::uint64_t> evals(cfg.restarts, 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        const ObjectiveEvaluator eval(problem, shape.u0, shape.u1, shape.hat);
        for (std::size_t r; (r = next.fetch_add(1)) < cfg.restarts;) {
            std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(r)));
            auto start = (r == 0 && warm) ? *warm : random_lattice_point(shape, K, rng);
            LocalSearch search(eval, shape, K, cfg.max_iters);
            results[r] = search.run(std::move(start));
            evals[r] = search.evaluations();
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, unsigned(cfg.restarts)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    Candidate best;
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        total += evals[r];
        if (better(results[r], best)) best = results[r];
    }
    const ObjectiveEvaluator eval(problem, shape.u0, shape.u1, shape.hat);
    return finish(eval, best, Strategy::Heuristic, total);
}

std::vector<SweepPoint> sweep_distortion(const Problem& problem, std::span<const double> D1s,
                                         std::span<const double> D2s, const SearchConfig& cfg,
                                         Strategy strategy) {
    if (D1s.empty()) throw DomainError("sweep needs at least one distortion target");
    if (!std::is_sorted(D1s.begin(), D1s.end())) throw DomainError("D1 targets must be sorted ascending");
    if (!std::is_sorted(D2s.begin(), D2s.end())) throw DomainError("D2 targets must be sorted ascending");
    if (D2s.size() > 1 && D2s.size() != D1s.size())
        throw DomainError("D2 targets must be a single value or match the D1 list in length");

    std::vector<SweepPoint> out;
    Problem point = problem;
    const AuxChannel* warm = nullptr;
    for (std::size_t k = 0; k < D1s.size(); ++k) {
        point.D1 = D1s[k];
        if (!D2s.empty()) point.D2 = D2s.size() == 1 ? D2s[0] : D2s[k];

        OptimizeResult r = strategy == Strategy::GridOracle ? grid_oracle(point, cfg)
                                                            : heuristic_search(point, cfg, warm);
        if (!out.empty()) {
            const OptimizeResult& prev = out.back().result;
            // The feasible set only grows along the path, so an earlier channel stays admissible.
            if (prev.feasible && (!r.feasible || prev.best.rate < r.best.rate)) {
                const Shape shape = shape_of(point, cfg);
                const ObjectiveEvaluator eval(point, shape.u0, shape.u1, shape.hat);
                r = OptimizeResult{eval.reference(prev.channel), prev.channel, r.strategy, r.evaluations, true};
                r.feasible = r.best.feasible;
            }
        }
        out.push_back(SweepPoint{point.D1, point.D2, std::move(r)});
        warm = &out.back().result.channel;
    }
    return out;
}

}  // namespace hbrd
