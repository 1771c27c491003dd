#include "hbrd/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace hbrd {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.contains(key)) throw ConfigError(join(path, key), "unknown field");
}

const json& require(const json& j, const std::string& path, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
    return x;
}

std::uint64_t count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path, std::size_t expected) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    if (v.size() != expected) {
        std::ostringstream os;
        os << "expected " << expected << " entries, got " << v.size();
        throw ConfigError(path, os.str());
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = number(v[i], path + "[" + std::to_string(i) + "]");
        if (x < 0.0) throw ConfigError(path + "[" + std::to_string(i) + "]", "probabilities must be nonnegative");
        out.push_back(x);
    }
    return out;
}

void normalize(std::vector<double>& p, std::size_t first, std::size_t len, const std::string& path) {
    const double total = std::accumulate(p.begin() + first, p.begin() + first + len, 0.0);
    if (std::abs(total - 1.0) > kParseNormTolerance) {
        std::ostringstream os;
        os.precision(12);
        os << "normalization failure: entries sum to " << total << ", not 1 (tolerance " << kParseNormTolerance << ")";
        throw ConfigError(path, os.str());
    }
    if (std::abs(total - 1.0) <= static_cast<double>(len) * std::numeric_limits<double>::epsilon()) return;
    for (std::size_t i = first; i < first + len; ++i) p[i] /= total;
}

std::size_t alphabet(const json& alphabets, const std::string& path, const std::string& name) {
    const std::uint64_t n = count(require(alphabets, path, name.c_str()), join(path, name));
    if (n == 0 || n > 255) throw ConfigError(join(path, name), "alphabet size must be in [1, 255]");
    return n;
}

Objective parse_objective(const std::string& s, const std::string& path) {
    for (Objective o : {Objective::Theorem1, Objective::Corollary1, Objective::Theorem3})
        if (s == to_string(o)) return o;
    throw ConfigError(path, "unknown objective '" + s + "' (expected theorem1, corollary1 or theorem3)");
}

ChannelKind parse_kind(const std::string& s, const std::string& path) {
    for (ChannelKind k : {ChannelKind::OneDistortion, ChannelKind::CommonReconstruction})
        if (s == to_string(k)) return k;
    throw ConfigError(path, "unknown kind '" + s + "'");
}

DistortionTable parse_distortion(const json& v, const std::string& path, std::size_t rows) {
    if (v.is_string()) {
        if (v.get<std::string>() != "hamming") throw ConfigError(path, "expected \"hamming\" or a table object");
        return DistortionTable::hamming(rows);
    }
    reject_unknown_keys(v, path, {"recon_size", "values"});
    const std::size_t cols = count(require(v, path, "recon_size"), join(path, "recon_size"));
    if (cols == 0) throw ConfigError(join(path, "recon_size"), "must be positive");
    const json& values = require(v, path, "values");
    if (!values.is_array() || values.size() != rows * cols) {
        std::ostringstream os;
        os << "expected " << rows * cols << " entries (" << rows << " x " << cols << ")";
        throw ConfigError(join(path, "values"), os.str());
    }
    std::vector<double> table;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = number(values[i], join(path, "values") + "[" + std::to_string(i) + "]");
        if (x < 0.0) throw ConfigError(join(path, "values"), "distortions must be nonnegative");
        table.push_back(x);
    }
    return DistortionTable(rows, cols, std::move(table));
}

json distortion_json(const DistortionTable& d) {
    if (d.source_size() == d.recon_size()) {
        const DistortionTable h = DistortionTable::hamming(d.source_size());
        if (h.values() == d.values()) return "hamming";
    }
    return json{{"recon_size", d.recon_size()}, {"values", d.values()}};
}

SearchConfig parse_optimizer(const json& v, const std::string& path, SearchConfig cfg) {
    reject_unknown_keys(v, path, {"u0_card", "u1_card", "s2hat_card", "grid_step", "restarts", "max_iters", "seed",
                                  "tolerance", "budget", "threads"});
    auto field = [&](const char* key) -> const json* {
        const auto it = v.find(key);
        return it == v.end() ? nullptr : &*it;
    };
    if (auto f = field("u0_card")) cfg.u0_card = count(*f, join(path, "u0_card"));
    if (auto f = field("u1_card")) cfg.u1_card = count(*f, join(path, "u1_card"));
    if (auto f = field("s2hat_card")) cfg.s2hat_card = count(*f, join(path, "s2hat_card"));
    if (auto f = field("grid_step")) {
        const double step = number(*f, join(path, "grid_step"));
        const double k = step > 0.0 ? std::round(1.0 / step) : 0.0;
        if (k < 1.0 || std::abs(k * step - 1.0) > 1e-9)
            throw ConfigError(join(path, "grid_step"), "must be 1/k for an integer k >= 1");
        cfg.grid_denominator = static_cast<unsigned>(k);
    }
    if (auto f = field("restarts")) cfg.restarts = count(*f, join(path, "restarts"));
    if (auto f = field("max_iters")) cfg.max_iters = count(*f, join(path, "max_iters"));
    if (auto f = field("seed")) cfg.seed = count(*f, join(path, "seed"));
    if (auto f = field("tolerance")) cfg.tolerance = number(*f, join(path, "tolerance"));
    if (auto f = field("budget")) cfg.budget = number(*f, join(path, "budget"));
    if (auto f = field("threads")) cfg.threads = static_cast<unsigned>(count(*f, join(path, "threads")));
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    return cfg;
}

json optimizer_json(const SearchConfig& c) {
    return json{{"u0_card", c.u0_card},     {"u1_card", c.u1_card},     {"s2hat_card", c.s2hat_card},
                {"grid_step", c.grid_step()}, {"restarts", c.restarts}, {"max_iters", c.max_iters},
                {"seed", c.seed},           {"tolerance", c.tolerance}, {"budget", c.budget},
                {"threads", c.threads}};
}

SchemeRates parse_rates(const json& v, const std::string& path) {
    reject_unknown_keys(v, path, {"R2", "R0", "R0p", "R1", "R1p"});
    SchemeRates r;
    auto get = [&](const char* key, double& out) {
        if (const auto it = v.find(key); it != v.end()) out = number(*it, join(path, key));
    };
    get("R2", r.R2);
    get("R0", r.R0);
    get("R0p", r.R0p);
    get("R1", r.R1);
    get("R1p", r.R1p);
    try {
        r.validate();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    return r;
}

SimulatorConfig parse_simulator(const json& v, const std::string& path) {
    reject_unknown_keys(v, path, {"n", "epsilon", "trials", "seed", "regenerate_every", "threads", "candidate_budget",
                                  "margin", "rates"});
    SimulatorConfig s;
    if (const auto it = v.find("n"); it != v.end()) {
        if (!it->is_array() || it->empty()) throw ConfigError(join(path, "n"), "expected a nonempty array");
        s.n.clear();
        for (const auto& x : *it) {
            const auto n = count(x, join(path, "n"));
            if (n == 0 || n > kMaxBlocklength) throw ConfigError(join(path, "n"), "blocklengths must be in [1, 20]");
            s.n.push_back(static_cast<unsigned>(n));
        }
    }
    if (const auto it = v.find("epsilon"); it != v.end()) {
        s.epsilon = number(*it, join(path, "epsilon"));
        if (!(s.epsilon > 0.0)) throw ConfigError(join(path, "epsilon"), "must be positive");
    }
    if (const auto it = v.find("trials"); it != v.end()) {
        s.trials = count(*it, join(path, "trials"));
        if (s.trials == 0) throw ConfigError(join(path, "trials"), "must be positive");
    }
    if (const auto it = v.find("seed"); it != v.end()) s.seed = count(*it, join(path, "seed"));
    if (const auto it = v.find("regenerate_every"); it != v.end()) {
        s.regenerate_every = count(*it, join(path, "regenerate_every"));
        if (s.regenerate_every == 0) throw ConfigError(join(path, "regenerate_every"), "must be positive");
    }
    if (const auto it = v.find("threads"); it != v.end()) s.threads = static_cast<unsigned>(count(*it, join(path, "threads")));
    if (const auto it = v.find("candidate_budget"); it != v.end())
        s.candidate_budget = number(*it, join(path, "candidate_budget"));
    if (const auto it = v.find("margin"); it != v.end()) s.margin = number(*it, join(path, "margin"));
    if (const auto it = v.find("rates"); it != v.end()) s.rates = parse_rates(*it, join(path, "rates"));
    return s;
}

json simulator_json(const SimulatorConfig& s) {
    json j{{"n", s.n},
           {"epsilon", s.epsilon},
           {"trials", s.trials},
           {"seed", s.seed},
           {"regenerate_every", s.regenerate_every},
           {"threads", s.threads},
           {"candidate_budget", s.candidate_budget},
           {"margin", s.margin}};
    if (s.rates)
        j["rates"] = {{"R2", s.rates->R2}, {"R0", s.rates->R0}, {"R0p", s.rates->R0p}, {"R1", s.rates->R1},
                      {"R1p", s.rates->R1p}};
    return j;
}

}  // namespace

SearchConfig ProblemConfig::search_config() const {
    return optimizer ? *optimizer : SearchConfig::defaults_for(problem);
}

ProblemConfig parse_config(const json& j) {
    reject_unknown_keys(j, "", {"name", "kind", "objective", "alphabets", "axis_order", "pmf", "d1", "d2", "D1", "D2",
                                "optimizer", "simulator"});
    std::string name;
    if (const auto it = j.find("name"); it != j.end()) name = text(*it, "name");

    Objective objective = Objective::Theorem1;
    if (const auto it = j.find("objective"); it != j.end()) objective = parse_objective(text(*it, "objective"), "objective");
    if (const auto it = j.find("kind"); it != j.end()) {
        const ChannelKind kind = parse_kind(text(*it, "kind"), "kind");
        if (kind != channel_kind(objective))
            throw ConfigError("kind", std::string("objective ") + to_string(objective) + " needs kind " +
                                          to_string(channel_kind(objective)));
    }

    const json& alphabets = require(j, "", "alphabets");
    reject_unknown_keys(alphabets, "alphabets", {"S1", "S2", "Y1", "Y2", "S1hat", "S2hat", "U0", "U1"});
    const json& order = require(j, "", "axis_order");
    if (!order.is_array() || order.size() != 4) throw ConfigError("axis_order", "expected four axis names");
    std::vector<Axis> axes;
    std::set<std::string> seen;
    for (const auto& a : order) {
        const std::string n = text(a, "axis_order");
        if (n != axis::S1 && n != axis::S2 && n != axis::Y1 && n != axis::Y2)
            throw ConfigError("axis_order", "unknown axis '" + n + "'");
        if (!seen.insert(n).second) throw ConfigError("axis_order", "axis '" + n + "' listed twice");
        axes.emplace_back(n, alphabet(alphabets, "alphabets", n));
    }
    std::vector<double> probs = numbers(require(j, "", "pmf"), "pmf", cell_count(axes));
    normalize(probs, 0, probs.size(), "pmf");
    JointSourcePmf source(Pmf(std::move(axes), std::move(probs)).reordered({axis::S1, axis::S2, axis::Y1, axis::Y2}));

    const std::size_t s1 = source.s1_size(), s2 = source.s2_size();
    DistortionTable d1 = j.contains("d1") ? parse_distortion(j["d1"], "d1", s1) : DistortionTable::hamming(s1);
    if (alphabets.contains("S1hat") && alphabet(alphabets, "alphabets", "S1hat") != d1.recon_size())
        throw ConfigError("d1", "reconstruction size does not match alphabets.S1hat");
    std::optional<DistortionTable> d2;
    if (j.contains("d2")) d2 = parse_distortion(j["d2"], "d2", s2);
    if (objective == Objective::Theorem3 && !d2) throw ConfigError("d2", "required for objective theorem3");
    if (d2 && alphabets.contains("S2hat") && alphabet(alphabets, "alphabets", "S2hat") != d2->recon_size())
        throw ConfigError("d2", "reconstruction size does not match alphabets.S2hat");

    Problem problem{std::move(source), objective, std::move(d1), std::move(d2), 0.0, 0.0};
    if (const auto it = j.find("D1"); it != j.end()) problem.D1 = number(*it, "D1");
    if (const auto it = j.find("D2"); it != j.end()) problem.D2 = number(*it, "D2");
    if (problem.D1 < 0.0) throw ConfigError("D1", "must be nonnegative");
    if (problem.D2 < 0.0) throw ConfigError("D2", "must be nonnegative");

    ProblemConfig out{std::move(name), std::move(problem), std::nullopt, {}};
    if (const auto it = j.find("optimizer"); it != j.end()) {
        SearchConfig base = SearchConfig::defaults_for(out.problem);
        if (alphabets.contains("U0")) base.u0_card = alphabet(alphabets, "alphabets", "U0");
        if (alphabets.contains("U1")) base.u1_card = alphabet(alphabets, "alphabets", "U1");
        out.optimizer = parse_optimizer(*it, "optimizer", base);
    }
    if (const auto it = j.find("simulator"); it != j.end()) out.simulator = parse_simulator(*it, "simulator");
    return out;
}

json to_json(const ProblemConfig& c) {
    const JointSourcePmf& s = c.problem.source;
    json j;
    if (!c.name.empty()) j["name"] = c.name;
    j["kind"] = to_string(channel_kind(c.problem.objective));
    j["objective"] = to_string(c.problem.objective);
    j["alphabets"] = {{"S1", s.s1_size()}, {"S2", s.s2_size()}, {"Y1", s.y1_size()}, {"Y2", s.y2_size()}};
    j["axis_order"] = {axis::S1, axis::S2, axis::Y1, axis::Y2};
    j["pmf"] = std::vector<double>(s.pmf().probs().begin(), s.pmf().probs().end());
    j["d1"] = distortion_json(c.problem.d1);
    if (c.problem.d2) j["d2"] = distortion_json(*c.problem.d2);
    j["D1"] = c.problem.D1;
    j["D2"] = c.problem.D2;
    if (c.optimizer) j["optimizer"] = optimizer_json(*c.optimizer);
    j["simulator"] = simulator_json(c.simulator);
    return j;
}

AuxChannel parse_channel(const json& j) {
    reject_unknown_keys(j, "", {"kind", "given_order", "output_order", "alphabets", "probs"});
    const ChannelKind kind = parse_kind(text(require(j, "", "kind"), "kind"), "kind");
    const json& given = require(j, "", "given_order");
    if (given != json{axis::S1, axis::S2}) throw ConfigError("given_order", "must be [\"S1\", \"S2\"]");
    const json expected_out = kind == ChannelKind::OneDistortion ? json{axis::U0, axis::U1}
                                                                 : json{axis::U0, axis::U1, axis::S2hat};
    if (require(j, "", "output_order") != expected_out)
        throw ConfigError("output_order", "must be " + expected_out.dump());
    const json& alphabets = require(j, "", "alphabets");
    reject_unknown_keys(alphabets, "alphabets", {"S1", "S2", "U0", "U1", "S2hat"});
    const std::size_t s1 = alphabet(alphabets, "alphabets", "S1"), s2 = alphabet(alphabets, "alphabets", "S2");
    const std::size_t u0 = alphabet(alphabets, "alphabets", "U0"), u1 = alphabet(alphabets, "alphabets", "U1");
    const std::size_t hat = kind == ChannelKind::CommonReconstruction ? alphabet(alphabets, "alphabets", "S2hat") : 1;
    const std::size_t outs = u0 * u1 * hat;
    std::vector<double> probs = numbers(require(j, "", "probs"), "probs", s1 * s2 * outs);
    for (std::size_t row = 0; row < s1 * s2; ++row) {
        try {
            normalize(probs, row * outs, outs, "probs");
        } catch (const ConfigError& e) {
            std::ostringstream os;
            os << "row (s1=" << row / s2 << ", s2=" << row % s2 << ") " << e.detail();
            throw ConfigError("probs", os.str());
        }
    }
    if (kind == ChannelKind::OneDistortion) return AuxChannel::one_distortion(s1, s2, u0, u1, std::move(probs));
    return AuxChannel::common_reconstruction(s1, s2, u0, u1, hat, std::move(probs));
}

json to_json(const AuxChannel& c) {
    json j;
    j["kind"] = to_string(c.kind());
    j["given_order"] = {axis::S1, axis::S2};
    j["alphabets"] = {{"S1", c.s1_size()}, {"S2", c.s2_size()}, {"U0", c.u0_size()}, {"U1", c.u1_size()}};
    if (c.kind() == ChannelKind::CommonReconstruction) {
        j["output_order"] = {axis::U0, axis::U1, axis::S2hat};
        j["alphabets"]["S2hat"] = c.s2hat_size();
    } else {
        j["output_order"] = {axis::U0, axis::U1};
    }
    j["probs"] = std::vector<double>(c.cond().probs().begin(), c.cond().probs().end());
    return j;
}

json to_json(const RateBreakdown& r) {
    json j{{"rate", r.rate},
           {"term_decoder1", r.term_decoder1},
           {"term_decoder2", r.term_decoder2},
           {"individual_layer", r.individual_layer},
           {"distortion1", r.distortion1},
           {"feasible", r.feasible}};
    j["distortion2"] = r.distortion2 ? json(*r.distortion2) : json(nullptr);
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        // the library message carries the line and column
        throw ConfigError("", path.string() + ": " + e.what());
    }
}

ProblemConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_json_file(path));
    } catch (const ConfigError& e) {
        if (e.field().empty()) throw;
        throw ConfigError(path.string() + ": " + e.field(), e.detail());
    }
}

AuxChannel load_channel(const std::filesystem::path& path) {
    try {
        return parse_channel(read_json_file(path));
    } catch (const ConfigError& e) {
        if (e.field().empty()) throw;
        throw ConfigError(path.string() + ": " + e.field(), e.detail());
    }
}

}  // namespace hbrd
