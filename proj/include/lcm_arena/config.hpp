#pragma once

// Run configuration: the JSON run-config format, validation, and the
// translation into a ready-to-run Simulation.
//
// Angles are given in degrees here and converted to radians once, at
// instance generation.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "algorithms.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "problems.hpp"
#include "scheduling.hpp"
#include "trace.hpp"

namespace lcm {

/// Validation failure naming the offending field.
inline Error config_error(const std::string& field, const std::string& constraint) {
    return Error(ErrorKind::Constraint, "invalid config field '" + field + "': " + constraint);
}

struct RunConfig {
    std::string problem{"eqosc"};

    double d{3.0};              // eqosc
    std::optional<double> vr;   // eqosc radius, or rendezvous limited radius
    double theta1{30.0};        // ae, degrees
    double theta2{60.0};
    double ab{2.0}, bc{6.0}, cd{2.0};
    std::string side{"same"};
    std::string vis;            // "", "full", "limited"; empty picks the problem default
    std::optional<double> epsilon;
    double d0{4.0};             // rendezvous

    std::string algo{"eo-sta"};
    std::string model;          // empty: the algorithm's own model

    std::string sched{"fsynch"};
    std::uint64_t seed{0};
    std::optional<std::size_t> window;
    std::vector<std::vector<std::size_t>> script;
    std::string script_path;
    std::vector<std::size_t> terminals;  // alt-terminals; empty picks the outermost robots

    std::string frames{"identity"};
    std::uint64_t frame_seed{0};

    std::size_t horizon{kDefaultHorizon};
    std::size_t oscillation_window{kDefaultOscillationWindow};
    double tolerance{kGeomTolerance};
    double collision_threshold{kCollisionThreshold};
    bool non_rigid{false};  // reserved, always rejected

    bool operator==(const RunConfig&) const = default;
};

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j{
        {"problem", c.problem}, {"d", c.d},         {"theta1", c.theta1}, {"theta2", c.theta2},
        {"ab", c.ab},           {"bc", c.bc},       {"cd", c.cd},         {"side", c.side},
        {"vis", c.vis},         {"d0", c.d0},       {"algo", c.algo},     {"model", c.model},
        {"sched", c.sched},     {"seed", c.seed},   {"script", c.script}, {"script_path", c.script_path},
        {"terminals", c.terminals}, {"frames", c.frames}, {"frame_seed", c.frame_seed}, {"horizon", c.horizon},
        {"oscillation_window", c.oscillation_window}, {"tolerance", c.tolerance},
        {"collision_threshold", c.collision_threshold}, {"non_rigid", c.non_rigid},
    };
    if (c.vr) j["vr"] = *c.vr;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    if (c.window) j["window"] = *c.window;
    return j;
}

namespace detail {

// nlohmann converts -4 to a huge size_t without complaint.
template <class T>
T unsigned_of(const nlohmann::json& v) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) throw nlohmann::json::type_error::create(302, "expected a non-negative integer", &v);
    return v.get<T>();
}

inline std::vector<std::size_t> indices_of(const nlohmann::json& v) {
    if (!v.is_array()) throw nlohmann::json::type_error::create(302, "expected an array", &v);
    std::vector<std::size_t> out;
    for (const auto& x : v) out.push_back(unsigned_of<std::size_t>(x));
    return out;
}

}  // namespace detail

/// Reads the keys present in `j` over the defaults. `ignored` keys (e.g. a message "type") are skipped.
inline RunConfig run_config_from_json(const nlohmann::json& j, const std::set<std::string>& ignored = {}) {
    if (!j.is_object()) throw config_error("<root>", "expected a JSON object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        if (ignored.count(key)) continue;
        try {
            if (key == "problem") c.problem = value.get<std::string>();
            else if (key == "d") c.d = value.get<double>();
            else if (key == "vr") c.vr = value.get<double>();
            else if (key == "theta1") c.theta1 = value.get<double>();
            else if (key == "theta2") c.theta2 = value.get<double>();
            else if (key == "ab") c.ab = value.get<double>();
            else if (key == "bc") c.bc = value.get<double>();
            else if (key == "cd") c.cd = value.get<double>();
            else if (key == "side") c.side = value.get<std::string>();
            else if (key == "vis") c.vis = value.get<std::string>();
            else if (key == "epsilon") c.epsilon = value.get<double>();
            else if (key == "d0") c.d0 = value.get<double>();
            else if (key == "algo") c.algo = value.get<std::string>();
            else if (key == "model") c.model = value.get<std::string>();
            else if (key == "sched") c.sched = value.get<std::string>();
            else if (key == "seed") c.seed = detail::unsigned_of<std::uint64_t>(value);
            else if (key == "window") c.window = detail::unsigned_of<std::size_t>(value);
            else if (key == "script") {
                if (!value.is_array()) throw nlohmann::json::type_error::create(302, "expected an array", &value);
                c.script.clear();
                for (const auto& a : value) c.script.push_back(detail::indices_of(a));
            }
            else if (key == "script_path") c.script_path = value.get<std::string>();
            else if (key == "terminals") c.terminals = detail::indices_of(value);
            else if (key == "frames") c.frames = value.get<std::string>();
            else if (key == "frame_seed") c.frame_seed = detail::unsigned_of<std::uint64_t>(value);
            else if (key == "horizon") c.horizon = detail::unsigned_of<std::size_t>(value);
            else if (key == "oscillation_window") c.oscillation_window = detail::unsigned_of<std::size_t>(value);
            else if (key == "tolerance") c.tolerance = value.get<double>();
            else if (key == "collision_threshold") c.collision_threshold = value.get<double>();
            else if (key == "non_rigid") c.non_rigid = value.get<bool>();
            else throw config_error(key, "unknown field");
        } catch (const nlohmann::json::exception&) {
            throw config_error(key, "wrong value type");
        }
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Protocol, "cannot open config file " + path);
    try {
        return run_config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorKind::Protocol, "config file " + path + ": " + ex.what());
    }
}

/// LCM_ARENA_SEED, when set, replaces every seed in the config.
inline void apply_seed_override(RunConfig& c) {
    if (const char* env = std::getenv("LCM_ARENA_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw config_error("LCM_ARENA_SEED", "must be an unsigned integer");
        c.seed = v;
        c.frame_seed = v;
    }
}

/// Everything a Simulation needs, validated.
struct RunPlan {
    ProblemInstance instance;
    Algorithm algorithm;
    ModelKind model{ModelKind::Oblot};
    Scheduler scheduler = Scheduler::fsynch();
    FramePolicy frames;

    Simulation start() const { return Simulation(instance, algorithm, model, scheduler, frames); }
    RunResult execute() const { return run(instance, algorithm, scheduler, model, frames); }
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Protocol, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

/// Maps a generator constraint message back to the config field it concerns.
inline std::string generator_field(ProblemKind p, const std::string& what) {
    auto has = [&](const char* needle) { return what.find(needle) != std::string::npos; };
    switch (p) {
    case ProblemKind::EqOsc: return has("V_r") ? "vr" : "d";
    case ProblemKind::Rendezvous: return has("disconnected") ? "vr" : "d0";
    case ProblemKind::AngleEqualization:
        if (has("epsilon") || has("V_r")) return "epsilon";
        if (has("theta2 <")) return "theta2";
        if (has("theta")) return "theta1";
        if (has("ab ")) return "ab";
        if (has("bc ")) return "bc";
        if (has("cd ")) return "cd";
        return "problem";
    }
    return "problem";
}

}  // namespace detail

/**
 * Validates `c` and builds the instance, algorithm and scheduler. For the
 * interactive scheduler a channel must be supplied.
 */
inline RunPlan make_plan(const RunConfig& c, std::shared_ptr<ActivationChannel> channel = nullptr) {
    if (c.non_rigid) throw config_error("non_rigid", "non-rigid movement is not supported (moves are always rigid)");
    if (c.horizon == 0) throw config_error("horizon", "must be positive");
    if (c.oscillation_window == 0) throw config_error("oscillation_window", "must be positive");
    if (!(c.tolerance > 0.0)) throw config_error("tolerance", "must be positive");
    if (!(c.collision_threshold >= 0.0)) throw config_error("collision_threshold", "must be non-negative");

    RunPlan plan;

    auto algo = find_algorithm(c.algo);
    if (!algo) throw config_error("algo", "unknown algorithm '" + c.algo + "'");
    plan.algorithm = *algo;

    if (c.model.empty()) {
        plan.model = plan.algorithm.native_model;
    } else {
        auto m = parse_model(c.model);
        if (!m) throw config_error("model", "must be one of oblot, fsta, fcom, lumi");
        if (!model_at_least(*m, plan.algorithm.native_model)) {
            throw config_error("model", c.algo + " requires " + std::string(to_string(plan.algorithm.native_model)) +
                                            " or a stronger model, got " + c.model);
        }
        plan.model = *m;
    }

    auto problem = parse_problem(c.problem);
    if (!problem) throw config_error("problem", "must be one of ae, eqosc, rendezvous");
    if (!c.vis.empty() && c.vis != "full" && c.vis != "limited") throw config_error("vis", "must be full or limited");

    try {
        switch (*problem) {
        case ProblemKind::EqOsc:
            if (c.epsilon) throw config_error("epsilon", "only applies to problem ae");
            plan.instance = gen_eqosc(c.d, c.vr);
            if (c.vis == "full") plan.instance.vis = VisibilitySpec::full();
            break;
        case ProblemKind::AngleEqualization: {
            if (c.side != "same" && c.side != "opposite") throw config_error("side", "must be same or opposite");
            const bool limited = c.vis == "limited";
            if (limited && !c.epsilon) throw config_error("epsilon", "limited visibility for ae requires epsilon (V_r = bc + epsilon)");
            if (!limited && c.epsilon) throw config_error("epsilon", "only applies with vis=limited");
            plan.instance = gen_ae(degrees_to_radians(c.theta1), degrees_to_radians(c.theta2), c.ab, c.bc, c.cd,
                                   c.side == "same" ? AeSide::Same : AeSide::Opposite,
                                   limited ? c.epsilon : std::nullopt);
            break;
        }
        case ProblemKind::Rendezvous:
            if (c.epsilon) throw config_error("epsilon", "only applies to problem ae");
            plan.instance = gen_rendezvous(c.d0, c.vis == "limited" ? VisibilitySpec::limited_to(c.vr.value_or(c.d0))
                                                                    : VisibilitySpec::full());
            break;
        }
    } catch (const Error& e) {
        const std::string what = e.what();
        if (what.rfind("invalid config field", 0) == 0) throw;
        throw config_error(detail::generator_field(*problem, what), what);
    }
    plan.instance.horizon = c.horizon;
    plan.instance.oscillation_window = c.oscillation_window;
    plan.instance.tolerance = c.tolerance;
    plan.instance.collision_threshold = c.collision_threshold;

    const std::size_t n = plan.instance.initial.size();
    auto kind = parse_scheduler_kind(c.sched);
    if (!kind) throw config_error("sched", "must be one of fsynch, round-robin, random-fair, scripted, alt-terminals, interactive");
    switch (*kind) {
    case SchedulerKind::FsynchAll: plan.scheduler = Scheduler::fsynch(); break;
    case SchedulerKind::RoundRobinSingleton: plan.scheduler = Scheduler::round_robin(); break;
    case SchedulerKind::RandomFair: {
        const std::size_t w = c.window.value_or(2 * n);
        if (w == 0) throw config_error("window", "must be positive");
        plan.scheduler = Scheduler::random_fair(c.seed, w);
        break;
    }
    case SchedulerKind::Scripted: {
        std::vector<ActivationSet> script;
        try {
            if (!c.script_path.empty()) {
                script = parse_schedule(read_text_file(c.script_path));
            } else {
                for (const auto& s : c.script) script.emplace_back(s);
            }
            for (const auto& a : script) a.check_range(n);
        } catch (const Error& e) {
            throw config_error(c.script_path.empty() ? "script" : "script_path", e.what());
        }
        if (script.empty()) throw config_error("script", "scripted scheduler needs a non-empty script or script_path");
        plan.scheduler = Scheduler::scripted(std::move(script));
        break;
    }
    case SchedulerKind::AlternatingTerminals: {
        std::vector<std::size_t> t = c.terminals.empty() ? std::vector<std::size_t>{0, n - 1} : c.terminals;
        if (t.size() != 2 || t[0] >= n || t[1] >= n || t[0] == t[1]) {
            throw config_error("terminals", "must name two distinct robots below " + std::to_string(n));
        }
        plan.scheduler = Scheduler::alternating_terminals(t[0], t[1]);
        break;
    }
    case SchedulerKind::Interactive:
        if (!channel) throw config_error("sched", "interactive scheduling is only available through the serve session");
        plan.scheduler = Scheduler::interactive(std::move(channel));
        break;
    }

    auto mode = parse_frame_mode(c.frames);
    if (!mode) throw config_error("frames", "must be one of identity, fixed, fresh");
    plan.frames = FramePolicy{*mode, c.frame_seed};
    return plan;
}

}  // namespace lcm
