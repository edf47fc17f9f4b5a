#pragma once

// The deterministic round loop.
//
// Each round: the scheduler picks robots; every activated robot looks at the
// configuration as it stood at the start of the round (through its own frame),
// computes, and then all of them move rigidly and simultaneously; lights are
// committed afterwards and the problem monitor judges the new configuration.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "algorithms.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "problems.hpp"
#include "scheduling.hpp"
#include "trace.hpp"

namespace lcm {

struct FramePolicy {
    enum class Mode { Identity, FixedPerRobot, FreshPerActivation };

    Mode mode{Mode::Identity};
    std::uint64_t seed{0};

    bool operator==(const FramePolicy&) const = default;
};

inline std::string_view to_string(FramePolicy::Mode m) {
    switch (m) {
    case FramePolicy::Mode::Identity: return "identity";
    case FramePolicy::Mode::FixedPerRobot: return "fixed";
    case FramePolicy::Mode::FreshPerActivation: return "fresh";
    }
    return "?";
}

inline std::optional<FramePolicy::Mode> parse_frame_mode(std::string_view s) {
    if (s == "identity") return FramePolicy::Mode::Identity;
    if (s == "fixed") return FramePolicy::Mode::FixedPerRobot;
    if (s == "fresh") return FramePolicy::Mode::FreshPerActivation;
    return std::nullopt;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Frame of robot `robot` in `round`; depends only on (seed, robot[, round]) so evaluation order is irrelevant.
inline Frame frame_for(const FramePolicy& policy, std::size_t robot, std::size_t round, const Point& origin) {
    if (policy.mode == FramePolicy::Mode::Identity) return Frame::identity_at(origin);
    std::uint64_t key = detail::splitmix64(policy.seed) ^ detail::splitmix64(0x1000 + robot);
    if (policy.mode == FramePolicy::Mode::FreshPerActivation) key = detail::splitmix64(key ^ detail::splitmix64(round));
    std::mt19937_64 rng(key);
    const double rotation = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    const bool reflected = std::bernoulli_distribution(0.5)(rng);
    return Frame{origin, normalize_angle(rotation), reflected};
}

struct StepResult {
    Configuration next;
    TraceEvent event;
};

/**
 * One LCM round. `order` lists the activated robots in evaluation order; the
 * outcome does not depend on it. The returned event has no verdict yet.
 */
inline StepResult step(const Configuration& c, const std::vector<std::size_t>& order, ModelKind model,
                       const VisibilitySpec& vis, const Algorithm& algorithm, const FramePolicy& frames) {
    const ActivationSet act(order);
    act.check_range(c.size());
    if (!model_at_least(model, algorithm.native_model)) {
        throw Error(ErrorKind::Capability, "algorithm " + algorithm.name + " needs model " +
                                               std::string(to_string(algorithm.native_model)) + ", run uses " +
                                               std::string(to_string(model)));
    }

    struct Outcome {
        Decision decision;
        Point global_dest;
    };
    std::vector<std::optional<Outcome>> outcomes(c.size());
    for (std::size_t i : order) {
        if (outcomes[i]) continue;
        const Frame f = frame_for(frames, c.robots[i].id, c.round, c.position(i));
        Decision d;
        try {
            d = algorithm.compute(project_snapshot(build_snapshot(c, i, model, vis, f), algorithm.native_model));
        } catch (const Error& e) {
            throw Error(e.kind(), "robot " + std::to_string(i) + ": " + e.what());
        }
        if (!d.destination.finite()) {
            throw Error(ErrorKind::Precondition, "robot " + std::to_string(i) + ": non-finite destination");
        }
        outcomes[i] = Outcome{d, to_global(f, d.destination)};
    }

    StepResult r;
    r.event.round = c.round;
    r.event.activated = act;
    r.event.before = records_of(c);
    r.next = c;
    r.next.round = c.round + 1;
    for (std::size_t i : act) r.next.robots[i].position = outcomes[i]->global_dest;
    for (std::size_t i : act) {
        if (const auto& light = outcomes[i]->decision.new_light) {
            try {
                r.next = apply_light_write(r.next, i, *light, model, algorithm.palette);
            } catch (const Error& e) {
                throw Error(e.kind(), "robot " + std::to_string(i) + ": " + e.what());
            }
        }
    }
    for (std::size_t i : act) {
        r.event.decisions.push_back({i, outcomes[i]->decision.destination, r.next.robots[i].light});
        if (outcomes[i]->decision.insufficient_info) r.event.insufficient.push_back(i);
    }
    r.event.after = records_of(r.next);
    return r;
}

struct RunResult {
    Verdict verdict;
    Configuration initial;
    Configuration final_config;
    std::vector<TraceEvent> trace;
    FairnessReport fairness;
};

/// A run in progress; advanced one round at a time by `run`, `replay`, or an interactive session.
class Simulation {
public:
    Simulation(ProblemInstance instance, Algorithm algorithm, ModelKind model, Scheduler scheduler,
               FramePolicy frames = {})
        : instance_(std::move(instance)),
          algorithm_(std::move(algorithm)),
          model_(model),
          scheduler_(std::move(scheduler)),
          frames_(frames) {
        if (!model_at_least(model_, algorithm_.native_model)) {
            throw Error(ErrorKind::Capability, "algorithm " + algorithm_.name + " needs model " +
                                                   std::string(to_string(algorithm_.native_model)) + " or stronger");
        }
        if (model_ == ModelKind::Oblot && algorithm_.palette.size() != 1) {
            throw Error(ErrorKind::Capability, "OBLOT robots have a single colour");
        }
        current_ = instance_.initial;
        current_.round = 0;
        for (auto& r : current_.robots) r.light = algorithm_.palette.initial();
        initial_ = current_;
        history_.push_back(current_);
        verdict_ = judge();
    }

    bool finished() const { return verdict_.terminal() || current_.round >= instance_.horizon; }

    /// Runs one round with the scheduler's choice.
    const TraceEvent& advance() { return advance_with(scheduler_.next(current_.round, current_.size())); }

    /// Runs one round with an explicit activation set.
    const TraceEvent& advance_with(const ActivationSet& act) {
        if (verdict_.terminal()) throw Error(ErrorKind::Protocol, "run already finished: " + to_string(verdict_));
        StepResult r = step(current_, act.robots(), model_, instance_.vis, algorithm_, frames_);
        current_ = std::move(r.next);
        history_.push_back(current_);
        activations_.push_back(act);
        events_.push_back(std::move(r.event));
        verdict_ = judge();
        events_.back().verdict = to_string(verdict_);
        return events_.back();
    }

    const Verdict& verdict() const { return verdict_; }
    const Configuration& current() const { return current_; }
    const Configuration& initial() const { return initial_; }
    const std::vector<TraceEvent>& events() const { return events_; }
    const std::vector<Configuration>& history() const { return history_; }
    const ProblemInstance& instance() const { return instance_; }
    const Algorithm& algorithm() const { return algorithm_; }
    ModelKind model() const { return model_; }

    FairnessReport fairness() const {
        const std::size_t n = current_.size();
        return fairness_check(activations_, n, 2 * n, scheduler_.audited_robots(n));
    }

    RunResult result() const { return {verdict_, initial_, current_, events_, fairness()}; }

private:
    Verdict judge() const {
        const std::size_t t = current_.round;
        switch (instance_.kind) {
        case ProblemKind::EqOsc:
            return monitor_eqosc(history_, instance_);
        case ProblemKind::AngleEqualization:
            return monitor_ae(events_, instance_);
        case ProblemKind::Rendezvous:
            return monitor_rendezvous(history_, instance_.horizon);
        }
        return Verdict::running(t);
    }

    ProblemInstance instance_;
    Algorithm algorithm_;
    ModelKind model_;
    Scheduler scheduler_;
    FramePolicy frames_;
    Configuration initial_;
    Configuration current_;
    std::vector<Configuration> history_;
    std::vector<ActivationSet> activations_;
    std::vector<TraceEvent> events_;
    Verdict verdict_;
};

inline RunResult run(const ProblemInstance& instance, const Algorithm& algorithm, Scheduler scheduler,
                     ModelKind model, const FramePolicy& frames = {}) {
    Simulation sim(instance, algorithm, model, std::move(scheduler), frames);
    while (!sim.finished()) sim.advance();
    return sim.result();
}

struct ReplayReport {
    bool identical{true};           // every serialized field bit-for-bit
    bool positions_identical{true}; // robot positions within tolerance
    std::optional<std::size_t> divergent_round;
    std::string field;
};

/// Re-executes the trace's activation sets and compares the outcome with the recorded events.
inline ReplayReport replay(const std::vector<TraceEvent>& trace, const ProblemInstance& instance,
                           const Algorithm& algorithm, ModelKind model, const FramePolicy& frames,
                           double position_tol = kGeomTolerance) {
    ReplayReport rep;
    std::vector<ActivationSet> script;
    for (const auto& e : trace) script.push_back(e.activated);
    Simulation sim(instance, algorithm, model, Scheduler::scripted(script), frames);

    auto diverge = [&](std::size_t round, std::string field, bool positions_too) {
        if (rep.identical) {
            rep.identical = false;
            rep.divergent_round = round;
            rep.field = std::move(field);
        }
        if (positions_too) rep.positions_identical = false;
    };

    for (const auto& recorded : trace) {
        if (sim.verdict().terminal()) {
            diverge(recorded.round, "length", true);
            break;
        }
        const TraceEvent& e = sim.advance();
        if (e.round != recorded.round) diverge(recorded.round, "round", true);
        if (e.after.size() != recorded.after.size()) {
            diverge(recorded.round, "robots", true);
            break;
        }
        for (std::size_t i = 0; i < e.after.size(); ++i) {
            if (!approx_equal(e.after[i].pos, recorded.after[i].pos, position_tol)) {
                diverge(recorded.round, "robots[" + std::to_string(i) + "].pos", true);
            } else if (e.after[i].pos != recorded.after[i].pos) {
                diverge(recorded.round, "robots[" + std::to_string(i) + "].pos", false);
            }
            if (e.after[i].light != recorded.after[i].light) diverge(recorded.round, "robots[" + std::to_string(i) + "].light", false);
        }
        if (e.decisions != recorded.decisions) diverge(recorded.round, "decisions", false);
        if (e.verdict != recorded.verdict) diverge(recorded.round, "verdict", false);
    }
    return rep;
}

struct CollisionReport {
    std::size_t round{0};
    std::size_t first{0};
    std::size_t second{0};
    double min_distance{0.0};
};

inline std::vector<CollisionReport> collision_audit(const std::vector<TraceEvent>& events,
                                                    double threshold = kCollisionThreshold) {
    std::vector<CollisionReport> out;
    for (const auto& e : events) {
        const auto m = e.motions();
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = i + 1; j < m.size(); ++j) {
                const double sep = min_separation(m[i], m[j]);
                if (sep <= threshold) out.push_back({e.round, i, j, sep});
            }
        }
    }
    return out;
}

}  // namespace lcm
