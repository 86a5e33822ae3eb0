#include "crawl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>

namespace crawl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& message) {
    throw std::invalid_argument("config: " + context + ": " + message);
}

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(context, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) fail(context, "unknown field '" + key + "'");
    }
}

const json& require(const json& obj, const std::string& context, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(context, std::string("missing field '") + key + "'");
    return *it;
}

double get_number(const json& obj, const std::string& context, const char* key) {
    const json& v = require(obj, context, key);
    if (!v.is_number()) fail(context, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& context, const char* key) {
    const json& v = require(obj, context, key);
    if (!v.is_number_integer()) fail(context, std::string("'") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

PolicyKind parse_kind(const std::string& s, const std::string& context) {
    if (s == "whittle") return PolicyKind::Whittle;
    if (s == "greedy-state") return PolicyKind::GreedyState;
    if (s == "round-robin") return PolicyKind::RoundRobin;
    if (s == "static") return PolicyKind::Static;
    fail(context, "unknown policy kind '" + s + "'");
}

const char* kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::Whittle: return "whittle";
        case PolicyKind::GreedyState: return "greedy-state";
        case PolicyKind::RoundRobin: return "round-robin";
        case PolicyKind::Static: return "static";
    }
    return "?";
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "root",
               {"fleet", "policy", "mode", "horizon", "warmup", "seed", "arrivals", "output"});
    ExperimentConfig c;

    const json& fleet = require(j, "root", "fleet");
    check_keys(fleet, "fleet", {"period", "budget", "sources"});
    c.period = get_number(fleet, "fleet", "period");
    c.budget = get_number(fleet, "fleet", "budget");
    const json& sources = require(fleet, "fleet", "sources");
    if (!sources.is_array() || sources.empty()) fail("fleet", "'sources' must be a non-empty array");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const std::string ctx = "sources[" + std::to_string(i) + "]";
        const json& s = sources[i];
        check_keys(s, ctx, {"lambda", "xi_mean", "mu", "cost", "x0"});
        SourceConfig sc;
        sc.lambda_rate = get_number(s, ctx, "lambda");
        sc.xi_mean = get_number(s, ctx, "xi_mean");
        sc.mu = get_number(s, ctx, "mu");
        sc.cost = get_number(s, ctx, "cost");
        if (s.contains("x0")) sc.x0 = get_number(s, ctx, "x0");
        c.sources.push_back(sc);
    }

    const json& policy = require(j, "root", "policy");
    check_keys(policy, "policy", {"kind", "schedule"});
    const json& kind = require(policy, "policy", "kind");
    if (!kind.is_string()) fail("policy", "'kind' must be a string");
    c.policy.kind = parse_kind(kind.get<std::string>(), "policy");
    if (policy.contains("schedule")) {
        const json& sched = policy["schedule"];
        if (!sched.is_array()) fail("policy", "'schedule' must be an array");
        for (std::size_t i = 0; i < sched.size(); ++i) {
            const std::string ctx = "schedule[" + std::to_string(i) + "]";
            check_keys(sched[i], ctx, {"period", "offset"});
            StaticEntry e;
            if (sched[i].contains("period")) e.period = get_integer(sched[i], ctx, "period");
            if (sched[i].contains("offset")) e.offset = get_integer(sched[i], ctx, "offset");
            c.policy.schedule.push_back(e);
        }
    }

    const json& mode = require(j, "root", "mode");
    if (!mode.is_string()) fail("root", "'mode' must be a string");
    const std::string mode_s = mode.get<std::string>();
    if (mode_s == "deterministic")
        c.mode = SimMode::Deterministic;
    else if (mode_s == "stochastic")
        c.mode = SimMode::Stochastic;
    else
        fail("root", "mode must be 'deterministic' or 'stochastic'");

    c.horizon = get_integer(j, "root", "horizon");
    if (c.horizon < 1) fail("root", "horizon must be >= 1");
    if (j.contains("warmup")) {
        c.warmup = get_integer(j, "root", "warmup");
        if (*c.warmup < 0 || *c.warmup >= c.horizon) fail("root", "need horizon > warmup >= 0");
    }
    if (j.contains("seed")) {
        const json& seed = j["seed"];
        if (!seed.is_number_unsigned() && !seed.is_number_integer())
            fail("root", "'seed' must be an integer");
        c.seed = seed.get<std::uint64_t>();
    }
    if (c.mode == SimMode::Stochastic && !c.seed.has_value())
        fail("root", "stochastic mode requires a seed");

    if (j.contains("arrivals")) {
        const json& arr = j["arrivals"];
        check_keys(arr, "arrivals", {"xi"});
        const json& xi = require(arr, "arrivals", "xi");
        if (!xi.is_string()) fail("arrivals", "'xi' must be a string");
        const std::string xi_s = xi.get<std::string>();
        if (xi_s == "constant")
            c.arrivals.xi = XiDistribution::Constant;
        else if (xi_s == "exponential")
            c.arrivals.xi = XiDistribution::Exponential;
        else
            fail("arrivals", "xi must be 'constant' or 'exponential'");
    }

    if (j.contains("output")) {
        const json& out = j["output"];
        check_keys(out, "output", {"dir"});
        const json& dir = require(out, "output", "dir");
        if (!dir.is_string()) fail("output", "'dir' must be a string");
        c.out_dir = dir.get<std::string>();
    }

    validate_policy(c.policy, c.sources.size());
    c.fleet();      // run all parameter validation now
    c.run_spec();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(file);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

FleetParams ExperimentConfig::fleet() const {
    std::vector<SourceParams> params;
    params.reserve(sources.size());
    for (const SourceConfig& s : sources)
        params.push_back(make_source(s.lambda_rate, s.xi_mean, s.mu, s.cost, period));
    return make_fleet(std::move(params), budget);
}

RunSpec ExperimentConfig::run_spec() const {
    RunSpec spec;
    spec.mode = mode;
    spec.horizon = horizon;
    spec.warmup = warmup;
    spec.seed = seed;
    spec.arrivals = arrivals;
    bool any_x0 = false;
    for (const SourceConfig& s : sources)
        if (s.x0.has_value()) any_x0 = true;
    if (any_x0) {
        const FleetParams f = fleet();
        for (std::size_t i = 0; i < sources.size(); ++i)
            spec.x0.push_back(sources[i].x0.value_or(f.sources[i].u));
    }
    return spec;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    json sources = json::array();
    for (const SourceConfig& s : c.sources) {
        json js{{"lambda", s.lambda_rate}, {"xi_mean", s.xi_mean}, {"mu", s.mu}, {"cost", s.cost}};
        if (s.x0.has_value()) js["x0"] = *s.x0;
        sources.push_back(js);
    }
    json policy{{"kind", kind_name(c.policy.kind)}};
    if (!c.policy.schedule.empty()) {
        json sched = json::array();
        for (const StaticEntry& e : c.policy.schedule) {
            json je = json::object();
            if (e.period.has_value()) je["period"] = *e.period;
            if (e.offset != 0) je["offset"] = e.offset;
            sched.push_back(je);
        }
        policy["schedule"] = sched;
    }
    json out{
        {"fleet", {{"period", c.period}, {"budget", c.budget}, {"sources", sources}}},
        {"policy", policy},
        {"mode", c.mode == SimMode::Deterministic ? "deterministic" : "stochastic"},
        {"horizon", c.horizon},
    };
    if (c.warmup.has_value()) out["warmup"] = *c.warmup;
    if (c.seed.has_value()) out["seed"] = *c.seed;
    if (c.arrivals.xi == XiDistribution::Exponential) out["arrivals"] = {{"xi", "exponential"}};
    if (c.out_dir.has_value()) out["output"] = {{"dir", *c.out_dir}};
    return out;
}

}  // namespace crawl
