#pragma once

// The interactive-adversary wire protocol, independent of transport.
//
// Newline-delimited JSON. Each request carries a "type":
//
//   hello                      -> hello   (protocol version, algorithms, problems)
//   init   {run-config keys}   -> state   (round 0)
//   step   {activate: [i...]}  -> state   (after the round; includes the verdict)
//   verdict                    -> verdict (current verdict and fairness audit)
//   export                     -> export  (JSONL trace and the run config)
//
// Any failure answers with {"type":"error","message":...} and leaves the
// session as it was. The engine is authoritative; clients hold no state.

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "config.hpp"
#include "engine.hpp"
#include "model.hpp"
#include "scheduling.hpp"
#include "trace.hpp"

namespace lcm {

inline constexpr const char* kProtocolVersion = "lcm-arena/1";

class Session {
public:
    using json = nlohmann::json;

    json handle(const json& msg) {
        try {
            if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
                return error("message must be an object with a string \"type\"");
            }
            const std::string type = msg["type"].get<std::string>();
            if (type == "hello") return hello();
            if (type == "init") return init(msg);
            if (type == "step") return step(msg);
            if (type == "verdict") return verdict();
            if (type == "export") return export_trace();
            return error("unknown message type '" + type + "'");
        } catch (const Error& e) {
            return error(e.what());
        } catch (const json::exception& e) {
            return error(std::string("malformed message: ") + e.what());
        }
    }

    /// One request line in, one reply line out (without the newline).
    std::string handle_line(const std::string& line) {
        json msg;
        try {
            msg = json::parse(line);
        } catch (const json::exception& e) {
            return error(std::string("malformed JSON: ") + e.what()).dump();
        }
        return handle(msg).dump();
    }

    bool active() const { return sim_.has_value(); }

private:
    static json error(const std::string& message) { return {{"type", "error"}, {"message", message}}; }

    static json point(const Point& p) { return json::array({p.x, p.y}); }

    json hello() const {
        json problems = json::array({"ae", "eqosc", "rendezvous"});
        return {{"type", "hello"}, {"protocol", kProtocolVersion}, {"algorithms", algorithm_names()},
                {"problems", problems}};
    }

    json init(const json& msg) {
        RunConfig cfg = run_config_from_json(msg, {"type"});
        cfg.sched = "interactive";
        apply_seed_override(cfg);
        auto channel = std::make_shared<ActivationChannel>();
        RunPlan plan = make_plan(cfg, channel);
        sim_.emplace(plan.start());
        channel_ = std::move(channel);
        config_ = cfg;
        return state(nullptr);
    }

    json step(const json& msg) {
        if (!sim_) return error("no session; send init first");
        if (!msg.contains("activate") || !msg["activate"].is_array()) {
            return error("step needs an \"activate\" array");
        }
        ActivationSet act(msg["activate"].get<std::vector<std::size_t>>());
        act.check_range(sim_->current().size());
        if (sim_->verdict().terminal()) return error("run already finished: " + to_string(sim_->verdict()));
        if (sim_->finished()) return error("horizon reached");
        channel_->push(act);
        const TraceEvent& e = sim_->advance();
        return state(&e);
    }

    json verdict() const {
        if (!sim_) return error("no session; send init first");
        const FairnessReport f = sim_->fairness();
        return {{"type", "verdict"},
                {"verdict", to_string(sim_->verdict())},
                {"terminal", sim_->verdict().terminal()},
                {"fairness", {{"pass", f.pass}, {"window", f.window}, {"max_gap", f.max_gap}}}};
    }

    json export_trace() const {
        if (!sim_) return error("no session; send init first");
        if (sim_->events().empty()) return error("nothing to export: no rounds played yet");
        // The exported config replays the session as a scripted schedule.
        RunConfig cfg = config_;
        cfg.sched = "scripted";
        cfg.script.clear();
        for (const auto& e : sim_->events()) cfg.script.push_back(e.activated.robots());
        cfg.horizon = sim_->events().size();
        return {{"type", "export"}, {"trace", serialize_trace(sim_->events())}, {"config", to_json(cfg)}};
    }

    json state(const TraceEvent* last) const {
        const Configuration& c = sim_->current();
        const VisibilitySpec& vis = sim_->instance().vis;
        json robots = json::array();
        for (const auto& r : c.robots) robots.push_back({{"pos", point(r.position)}, {"light", r.light.label}});
        json edges = json::array();
        for (auto [i, j] : visibility_graph(c, vis).edges) edges.push_back({i, j});
        json out{{"type", "state"},
                 {"round", c.round},
                 {"problem", to_string(sim_->instance().kind)},
                 {"model", to_string(sim_->model())},
                 {"algo", sim_->algorithm().name},
                 {"robots", robots},
                 {"vis", {{"limited", vis.limited}, {"radius", vis.radius}}},
                 {"edges", edges},
                 {"verdict", to_string(sim_->verdict())},
                 {"terminal", sim_->verdict().terminal()}};
        json moves = json::array();
        if (last) {
            out["activated"] = last->activated.robots();
            for (std::size_t i = 0; i < last->after.size(); ++i) {
                if (last->before[i].pos != last->after[i].pos) {
                    moves.push_back({{"robot", i}, {"from", point(last->before[i].pos)}, {"to", point(last->after[i].pos)}});
                }
            }
        } else {
            out["activated"] = json::array();
        }
        out["moves"] = moves;
        return out;
    }

    std::optional<Simulation> sim_;
    std::shared_ptr<ActivationChannel> channel_;
    RunConfig config_;
};

}  // namespace lcm
