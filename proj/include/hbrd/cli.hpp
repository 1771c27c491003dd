#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hbrd::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kInputError = 2,
    kBudgetExceeded = 3,
    kHypothesisViolated = 4,
};

/// Entry point of the `hbrd` tool; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct VerifyCheck {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    /// Why a check could not be evaluated, if it could not.
    std::string error;
};

/// Regression checks against the bundled fixtures in `fixture_dir`.
std::vector<VerifyCheck> verify_checks(const std::filesystem::path& fixture_dir);

std::filesystem::path default_fixture_dir();

}  // namespace hbrd::cli
