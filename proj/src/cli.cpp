#include "hbrd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hbrd/binning.hpp"
#include "hbrd/closed_form.hpp"
#include "hbrd/config.hpp"
#include "hbrd/errors.hpp"
#include "hbrd/optimizer.hpp"
#include "hbrd/rd_eval.hpp"

#ifndef HBRD_FIXTURE_DIR
#define HBRD_FIXTURE_DIR "fixtures"
#endif

namespace hbrd::cli {

using nlohmann::json;

namespace {

std::string fmt(double x, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string exact(double x) { return fmt(x, 17); }

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(what, "'" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(what, "empty list");
    return out;
}

struct Sweep {
    std::vector<double> d1, d2;
};

// d1=a,b,c[;d2=x,y,z]
Sweep parse_sweep(const std::string& spec) {
    Sweep s;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ';');) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ConfigError("--sweep", "expected d1=LIST[;d2=LIST]");
        const std::string key = part.substr(0, eq);
        if (key == "d1")
            s.d1 = parse_list(part.substr(eq + 1), "--sweep d1");
        else if (key == "d2")
            s.d2 = parse_list(part.substr(eq + 1), "--sweep d2");
        else
            throw ConfigError("--sweep", "unknown key '" + key + "'");
    }
    if (s.d1.empty()) throw ConfigError("--sweep", "d1 list is required");
    return s;
}

void check_channel(const Problem& p, const AuxChannel& ch) {
    if (ch.s1_size() != p.source.s1_size() || ch.s2_size() != p.source.s2_size())
        throw ConfigError("channel", "S1/S2 alphabets do not match the config");
    if (ch.kind() != channel_kind(p.objective))
        throw ConfigError("channel", std::string("objective ") + to_string(p.objective) + " needs a " +
                                         to_string(channel_kind(p.objective)) + " channel");
    if (p.objective == Objective::Corollary1 && ch.u1_size() != 1)
        throw ConfigError("channel", "objective corollary1 needs |U1| = 1");
}

RateBreakdown evaluate(const Problem& p, const AuxChannel& ch) {
    check_channel(p, ch);
    const ObjectiveEvaluator eval(p, ch.u0_size(), ch.u1_size(), ch.s2hat_size());
    return eval.reference(ch);
}

void print_breakdown(std::ostream& os, const RateBreakdown& r) {
    os << "rate              " << fmt(r.rate) << "\n"
       << "term_decoder1     " << fmt(r.term_decoder1) << "\n"
       << "term_decoder2     " << fmt(r.term_decoder2) << "\n"
       << "individual_layer  " << fmt(r.individual_layer) << "\n"
       << "distortion1       " << fmt(r.distortion1) << "\n";
    if (r.distortion2) os << "distortion2       " << fmt(*r.distortion2) << "\n";
    os << "feasible          " << (r.feasible ? "yes" : "no") << "\n";
}

std::string channel_cell(const AuxChannel& ch) {
    std::string s;
    for (double x : ch.cond().probs()) {
        if (!s.empty()) s += ' ';
        s += exact(x);
    }
    return s;
}

// Output goes to --out when given.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ConfigError("--out", "cannot open '" + path + "' for writing");
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw ConfigError("--channel-out", "cannot open '" + path + "' for writing");
    f << j.dump(2) << "\n";
}

double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

AuxChannel example1_u0x3_u1x1() {
    return AuxChannel::deterministic(ChannelKind::OneDistortion, 4, 4, 2, 2, 1,
                                     [](std::size_t s1, std::size_t) -> AuxChannel::Outputs {
                                         return {s1 & 1, s1 >> 1, 0};
                                     });
}

}  // namespace

std::filesystem::path default_fixture_dir() { return HBRD_FIXTURE_DIR; }

std::vector<VerifyCheck> verify_checks(const std::filesystem::path& dir) {
    std::vector<VerifyCheck> out;
    auto check = [&](std::string name, double expected, double tolerance, const std::function<double()>& actual) {
        VerifyCheck c{std::move(name), expected, NAN, tolerance, false, {}};
        try {
            c.actual = actual();
            c.passed = std::abs(c.actual - expected) <= tolerance;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
        out.push_back(std::move(c));
    };
    auto config = [&](const char* file) { return load_config(dir / file); };
    auto channel = [&](const char* file) { return load_channel(dir / file); };
    auto lossless_eval = [&](const char* ch) {
        const ProblemConfig c = config("example1.json");
        return evaluate(Problem::lossless(c.problem.source, Objective::Corollary1), channel(ch)).rate;
    };
    const double h_quarter = binary_entropy(0.25);

    check("example1: lossless rate, U0 constant", 3.0, 1e-12, [&] { return lossless_eval("channel_u0_empty.json"); });
    check("example1: lossless rate, U0 = S1", 3.0, 1e-12, [&] { return lossless_eval("channel_u0_s1.json"); });
    check("example1: lossless rate, U0 = X3", 2.0, 1e-12, [&] { return lossless_eval("channel_u0_x3.json"); });
    check("example1: one-distortion rate, U0 = X3, U1 = X1, D1 = 0", 2.0, 1e-12, [&] {
        const ProblemConfig c = config("example1.json");
        return eval_theorem1(c.problem.source, example1_u0x3_u1x1(), DistortionTable::hamming(4), 0.0).rate;
    });
    check("example1: common reconstruction with S2hat = S2, D2 = 0", 2.0, 1e-12, [&] {
        const ProblemConfig c = config("example1.json");
        return eval_theorem3(c.problem.source, with_copied_s2(example1_u0x3_u1x1()), DistortionTable::hamming(4),
                             DistortionTable::hamming(4), 0.0, 0.0)
            .rate;
    });
    check("example1: grid oracle on vertices, |U0| = 2", 2.0, 1e-6, [&] {
        const ProblemConfig c = config("example1.json");
        SearchConfig cfg;
        cfg.u0_card = 2;
        cfg.grid_denominator = 1;
        return grid_oracle(Problem::lossless(c.problem.source, Objective::Corollary1), cfg).best.rate;
    });
    check("example1: heuristic, |U0| = 2, 64 restarts", 2.0, 1e-6, [&] {
        const ProblemConfig c = config("example1.json");
        SearchConfig cfg;
        cfg.u0_card = 2;
        cfg.restarts = 64;
        return heuristic_search(Problem::lossless(c.problem.source, Objective::Corollary1), cfg).best.rate;
    });
    check("example1: Degraded hypothesis I(Y2;S1S2|Y1) is violated", 1.0, 1e-12, [&] {
        const ProblemConfig c = config("example1.json");
        try {
            closed_form(c.problem.source, CaseTag::Degraded);
        } catch (const PreconditionError& e) {
            for (const auto& h : hypothesis_checks(c.problem.source, CaseTag::Degraded))
                if (h.name == e.check()) return h.value;
        }
        throw std::runtime_error("closed form accepted a non-degraded source");
    });
    check("comp-delivery: closed form", 1.0, 1e-12,
          [&] { return closed_form(config("comp-delivery.json").problem.source, CaseTag::CompDelivery).value; });
    check("comp-delivery: no common description", 2.0, 1e-12,
          [&] { return lossless_rate_without_common(config("comp-delivery.json").problem.source); });
    check("comp-delivery: heuristic", 1.0, 1e-6, [&] {
        SearchConfig cfg;
        cfg.u0_card = 4;
        cfg.restarts = 16;
        return heuristic_search(Problem::lossless(config("comp-delivery.json").problem.source, Objective::Corollary1),
                                cfg)
            .best.rate;
    });
    check("y1-absent: closed form H(S1S2)", 1.75, 1e-12,
          [&] { return closed_form(config("y1-absent.json").problem.source, CaseTag::Y1Absent).value; });
    check("y2-absent: closed form H(S2) + H(S1|Y1S2)", 1.0 + h_quarter, 1e-12,
          [&] { return closed_form(config("y2-absent.json").problem.source, CaseTag::Y2Absent).value; });
    check("degraded-bsc: lossless closed form", 2.0 * h_quarter, 1e-12,
          [&] { return closed_form(config("degraded-bsc.json").problem.source, CaseTag::DegradedLossless).value; });
    check("functional-y2: lossless closed form", 1.0 + h_quarter, 1e-12,
          [&] { return closed_form(config("functional-y2.json").problem.source, CaseTag::FuncY2Lossless).value; });
    return out;
}

namespace {

int cmd_eval(const std::string& config_path, const std::string& channel_path, bool as_json, std::ostream& out) {
    const ProblemConfig c = load_config(config_path);
    const AuxChannel ch = load_channel(channel_path);
    const RateBreakdown r = evaluate(c.problem, ch);
    if (as_json) {
        json j = to_json(r);
        j["objective"] = to_string(c.problem.objective);
        out << j.dump() << "\n";
    } else {
        out << "objective         " << to_string(c.problem.objective) << "\n";
        print_breakdown(out, r);
    }
    return kSuccess;
}

int cmd_optimize(const std::string& config_path, bool oracle, const std::string& sweep, bool as_json,
                 const std::string& out_path, const std::string& channel_out, std::ostream& out) {
    const ProblemConfig c = load_config(config_path);
    const SearchConfig cfg = c.search_config();
    const Strategy strategy = oracle ? Strategy::GridOracle : Strategy::Heuristic;

    std::vector<SweepPoint> points;
    if (sweep.empty()) {
        OptimizeResult r = oracle ? grid_oracle(c.problem, cfg) : heuristic_search(c.problem, cfg);
        points.push_back(SweepPoint{c.problem.D1, c.problem.D2, std::move(r)});
    } else {
        const Sweep s = parse_sweep(sweep);
        points = sweep_distortion(c.problem, s.d1, s.d2, cfg, strategy);
    }

    Sink sink(out_path, out);
    if (as_json) {
        json rows = json::array();
        for (const auto& p : points) {
            rows.push_back({{"D1", p.D1},
                            {"D2", p.D2},
                            {"objective", to_string(c.problem.objective)},
                            {"strategy", to_string(p.result.strategy)},
                            {"evaluations", p.result.evaluations},
                            {"feasible", p.result.feasible},
                            {"breakdown", to_json(p.result.best)},
                            {"channel", to_json(p.result.channel)}});
        }
        *sink << rows.dump() << "\n";
    } else {
        *sink << "D1,D2,rate,term_decoder1,term_decoder2,individual_layer,distortion1,feasible,strategy,evaluations,"
                 "channel\n";
        for (const auto& p : points) {
            const RateBreakdown& b = p.result.best;
            *sink << exact(p.D1) << ',' << exact(p.D2) << ',' << exact(b.rate) << ',' << exact(b.term_decoder1) << ','
                  << exact(b.term_decoder2) << ',' << exact(b.individual_layer) << ',' << exact(b.distortion1) << ','
                  << (p.result.feasible ? "true" : "false") << ',' << to_string(p.result.strategy) << ','
                  << p.result.evaluations << ",\"" << channel_cell(p.result.channel) << "\"\n";
        }
    }
    if (!channel_out.empty()) write_json_file(channel_out, to_json(points.back().result.channel));
    return kSuccess;
}

int cmd_closed_form(const std::string& config_path, const std::string& case_name, bool oracle, bool as_json,
                    std::ostream& out) {
    const ProblemConfig c = load_config(config_path);
    const auto tag = parse_case(case_name);
    if (!tag) {
        std::string names;
        for (CaseTag t : kAllCases) names += std::string(names.empty() ? "" : ", ") + to_string(t);
        throw ConfigError("--case", "unknown case '" + case_name + "' (expected one of " + names + ")");
    }
    InnerSearch inner = InnerSearch::defaults_for(c.problem.source);
    if (c.optimizer) {
        inner.config = *c.optimizer;
        inner.config.u0_card = 1;
    }
    inner.strategy = oracle ? Strategy::GridOracle : Strategy::Heuristic;
    const auto checks = hypothesis_checks(c.problem.source, *tag);
    const ClosedFormResult r = closed_form(c.problem.source, *tag, c.problem.d1, c.problem.D1, inner);

    if (as_json) {
        json hyp = json::array();
        for (const auto& h : checks) hyp.push_back({{"check", h.name}, {"value", h.value}, {"holds", h.holds}});
        json j{{"case", to_string(r.tag)},        {"value", r.value},     {"common_rate", r.common_rate},
               {"individual_rate", r.individual_rate}, {"hypotheses", hyp}, {"channel", to_json(r.channel)}};
        if (is_lossy(r.tag)) j["D1"] = c.problem.D1;
        out << j.dump() << "\n";
    } else {
        out << "case              " << to_string(r.tag) << "\n"
            << "value             " << fmt(r.value) << "\n"
            << "common_rate       " << fmt(r.common_rate) << "\n"
            << "individual_rate   " << fmt(r.individual_rate) << "\n";
        for (const auto& h : checks) out << "hypothesis        " << h.name << "  (" << fmt(h.value, 3) << ")\n";
        out << "channel           " << to_json(r.channel).dump() << "\n";
    }
    return kSuccess;
}

int cmd_verify(const std::string& fixtures, bool as_json, std::ostream& out) {
    const auto checks = verify_checks(fixtures.empty() ? default_fixture_dir() : std::filesystem::path(fixtures));
    bool all = true;
    for (const auto& c : checks) all = all && c.passed;
    if (as_json) {
        json rows = json::array();
        for (const auto& c : checks) {
            json row{{"check", c.name},
                     {"expected", c.expected},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed}};
            row["actual"] = std::isnan(c.actual) ? json(nullptr) : json(c.actual);
            if (!c.error.empty()) row["error"] = c.error;
            rows.push_back(std::move(row));
        }
        out << json{{"passed", all}, {"checks", rows}}.dump() << "\n";
    } else {
        out << std::left << std::setw(64) << "check" << std::setw(16) << "expected" << std::setw(16) << "actual"
            << std::setw(10) << "tolerance" << "result\n";
        for (const auto& c : checks) {
            out << std::left << std::setw(64) << c.name << std::setw(16) << fmt(c.expected) << std::setw(16)
                << (std::isnan(c.actual) ? std::string("-") : fmt(c.actual)) << std::setw(10) << fmt(c.tolerance, 2)
                << (c.passed ? "PASS" : "FAIL") << "\n";
            if (!c.error.empty()) out << "    " << c.error << "\n";
        }
        std::size_t passed = 0;
        for (const auto& c : checks) passed += c.passed;
        out << passed << "/" << checks.size() << " checks passed\n";
    }
    return all ? kSuccess : kFailure;
}

int cmd_simulate(const std::string& config_path, const std::string& channel_path, const std::string& n_list,
                 std::uint64_t trials, const std::string& out_path, std::ostream& out) {
    const ProblemConfig c = load_config(config_path);
    const AuxChannel ch = load_channel(channel_path);
    if (ch.kind() != ChannelKind::OneDistortion) throw ConfigError("channel", "simulation needs a OneDistortion channel");
    if (ch.s1_size() != c.problem.source.s1_size() || ch.s2_size() != c.problem.source.s2_size())
        throw ConfigError("channel", "S1/S2 alphabets do not match the config");

    SimulatorConfig sim = c.simulator;
    if (!n_list.empty()) {
        sim.n.clear();
        for (double x : parse_list(n_list, "--n")) {
            if (x < 1 || x > kMaxBlocklength || x != std::floor(x))
                throw ConfigError("--n", "blocklengths must be integers in [1, 20]");
            sim.n.push_back(static_cast<unsigned>(x));
        }
    }
    if (trials > 0) sim.trials = trials;

    const BinningScheme scheme(c.problem.source, ch, c.problem.d1, sim.epsilon);
    const SchemeRates rates =
        sim.rates ? *sim.rates : rates_with_margin(single_letter(c.problem.source, ch), sim.margin, ch.u1_size() > 1);
    SimulationOptions opts;
    opts.trials = sim.trials;
    opts.seed = sim.seed;
    opts.regenerate_every = sim.regenerate_every;
    opts.candidate_budget = sim.candidate_budget;
    opts.threads = sim.threads;

    std::vector<SimulationRow> rows;
    for (unsigned n : sim.n) {
        const TrialStats stats = run_trials(scheme, n, rates, opts);
        rows.push_back(SimulationRow{n, IndexWidths::from(rates, n).total_rate(n), rates.R2, rates.R0p, rates.R1p,
                                     sim.epsilon, stats});
    }
    Sink sink(out_path, out);
    *sink << kSimulationCsvHeader << "\n";
    for (const auto& r : rows) *sink << to_csv(r) << "\n";
    return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rate-distortion engine for two-decoder source coding with degraded reconstruction sets", "hbrd"};
    app.require_subcommand(1);

    std::string config, channel, case_name, sweep, out_path, channel_out, n_list, fixtures;
    bool as_json = false, oracle = false, heuristic = false;
    std::uint64_t trials = 0;

    auto* eval = app.add_subcommand("eval", "Evaluate the rate of a fixed auxiliary channel");
    eval->add_option("--config", config, "Problem config (JSON)")->required();
    eval->add_option("--channel", channel, "Channel file (JSON)")->required();
    eval->add_flag("--json", as_json, "Emit one JSON object");

    auto* optimize = app.add_subcommand("optimize", "Minimize the rate over auxiliary channels");
    optimize->add_option("--config", config, "Problem config (JSON)")->required();
    auto* o_flag = optimize->add_flag("--oracle", oracle, "Exhaustive lattice enumeration");
    auto* h_flag = optimize->add_flag("--heuristic", heuristic, "Seeded local search (default)");
    o_flag->excludes(h_flag);
    optimize->add_option("--sweep", sweep, "Distortion targets, d1=a,b,c[;d2=x,y,z]");
    optimize->add_flag("--json", as_json, "Emit JSON instead of CSV");
    optimize->add_option("--out", out_path, "Write results to this file");
    optimize->add_option("--channel-out", channel_out, "Write the (last) optimal channel as a channel file");

    auto* cf = app.add_subcommand("closed-form", "Evaluate a special-case formula");
    cf->add_option("--config", config, "Problem config (JSON)")->required();
    cf->add_option("--case", case_name, "Case tag")->required();
    cf->add_flag("--oracle", oracle, "Use the grid oracle for the inner minimization of lossy cases");
    cf->add_flag("--json", as_json, "Emit one JSON object");

    auto* verify = app.add_subcommand("verify", "Run the regression checks on the bundled fixtures");
    verify->add_option("--fixtures", fixtures, "Fixture directory");
    verify->add_flag("--json", as_json, "Emit JSON");

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation of the binning scheme");
    simulate->add_option("--config", config, "Problem config (JSON)")->required();
    simulate->add_option("--channel", channel, "Channel file (JSON)")->required();
    simulate->add_option("--n", n_list, "Blocklengths, comma separated");
    simulate->add_option("--trials", trials, "Trials per blocklength");
    simulate->add_option("--out", out_path, "Write the CSV to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        if (*eval) return cmd_eval(config, channel, as_json, out);
        if (*optimize) return cmd_optimize(config, oracle, sweep, as_json, out_path, channel_out, out);
        if (*cf) return cmd_closed_form(config, case_name, oracle, as_json, out);
        if (*verify) return cmd_verify(fixtures, as_json, out);
        if (*simulate) return cmd_simulate(config, channel, n_list, trials, out_path, out);
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kBudgetExceeded;
    } catch (const PreconditionError& e) {
        err << "hypothesis violated: " << e.check() << "\n" << e.what() << "\n";
        return kHypothesisViolated;
    } catch (const DomainError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace hbrd::cli
