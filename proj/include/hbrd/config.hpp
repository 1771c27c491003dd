#pragma once

// JSON problem configurations and channel files.
//
// Probability tables are flat row-major lists; the axis order is written in
// the file next to the list. A source pmf must sum to 1 within 1e-9 and is then
// renormalized exactly; channel rows likewise.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbrd/binning.hpp"
#include "hbrd/errors.hpp"
#include "hbrd/objective.hpp"
#include "hbrd/optimizer.hpp"

namespace hbrd {

inline constexpr double kParseNormTolerance = 1e-9;

/// Malformed or inconsistent input file; `field` is a dotted path such as "pmf" or "optimizer.restarts".
class ConfigError : public DomainError {
public:
    ConfigError(std::string field, std::string detail)
        : DomainError(field.empty() ? detail : field + ": " + detail), field_(std::move(field)), detail_(std::move(detail)) {}
    const std::string& field() const noexcept { return field_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

struct SimulatorConfig {
    std::vector<unsigned> n = {4, 8, 12};
    double epsilon = 0.2;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    std::uint64_t regenerate_every = 1;
    unsigned threads = 1;
    double candidate_budget = kDefaultCandidateBudget;
    /// Used when `rates` is absent: single-letter constraints plus this margin.
    double margin = 0.5;
    std::optional<SchemeRates> rates;
};

struct ProblemConfig {
    std::string name;
    Problem problem;
    /// Absent means SearchConfig::defaults_for(problem).
    std::optional<SearchConfig> optimizer;
    SimulatorConfig simulator;

    SearchConfig search_config() const;
};

ProblemConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ProblemConfig& config);

AuxChannel parse_channel(const nlohmann::json& j);
nlohmann::json to_json(const AuxChannel& channel);

nlohmann::json to_json(const RateBreakdown& r);

/// Reads a JSON document; syntax errors report line and column.
nlohmann::json read_json_file(const std::filesystem::path& path);

ProblemConfig load_config(const std::filesystem::path& path);
AuxChannel load_channel(const std::filesystem::path& path);

}  // namespace hbrd
