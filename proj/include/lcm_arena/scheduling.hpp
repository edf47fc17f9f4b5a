#pragma once

// Activation sets for FSYNCH and SSYNCH rounds, adversaries, fairness audit.

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace lcm {

/// Non-empty, sorted, duplicate-free set of robot indices.
class ActivationSet {
public:
    ActivationSet() = default;  // empty; only valid as a placeholder
    explicit ActivationSet(std::vector<std::size_t> robots) : robots_(std::move(robots)) {
        std::sort(robots_.begin(), robots_.end());
        robots_.erase(std::unique(robots_.begin(), robots_.end()), robots_.end());
        if (robots_.empty()) throw Error(ErrorKind::Protocol, "activation set must be non-empty");
    }

    static ActivationSet all(std::size_t n) {
        std::vector<std::size_t> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = i;
        return ActivationSet(std::move(v));
    }

    void check_range(std::size_t n) const {
        if (robots_.empty()) throw Error(ErrorKind::Protocol, "activation set must be non-empty");
        if (robots_.back() >= n) {
            throw Error(ErrorKind::Protocol,
                        "activation set names robot " + std::to_string(robots_.back()) +
                            " but only " + std::to_string(n) + " robots exist");
        }
    }

    bool contains(std::size_t i) const { return std::binary_search(robots_.begin(), robots_.end(), i); }
    const std::vector<std::size_t>& robots() const { return robots_; }
    std::size_t size() const { return robots_.size(); }
    auto begin() const { return robots_.begin(); }
    auto end() const { return robots_.end(); }

    bool operator==(const ActivationSet&) const = default;

private:
    std::vector<std::size_t> robots_;
};

/// Hand-off point for the interactive adversary: one set per round, strictly in order.
class ActivationChannel {
public:
    void push(ActivationSet set) {
        {
            std::lock_guard lock(mutex_);
            queue_.push_back(std::move(set));
        }
        cv_.notify_one();
    }

    /// Blocks until a set arrives; throws Timeout if `timeout` elapses first.
    ActivationSet pop(std::optional<std::chrono::milliseconds> timeout) {
        std::unique_lock lock(mutex_);
        auto ready = [&] { return !queue_.empty(); };
        if (timeout) {
            if (!cv_.wait_for(lock, *timeout, ready)) {
                throw Error(ErrorKind::Timeout, "no activation set received before timeout");
            }
        } else {
            cv_.wait(lock, ready);
        }
        ActivationSet s = std::move(queue_.front());
        queue_.pop_front();
        return s;
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<ActivationSet> queue_;
};

enum class SchedulerKind { FsynchAll, RoundRobinSingleton, RandomFair, Scripted, AlternatingTerminals, Interactive };

inline std::string_view to_string(SchedulerKind k) {
    switch (k) {
    case SchedulerKind::FsynchAll: return "fsynch";
    case SchedulerKind::RoundRobinSingleton: return "round-robin";
    case SchedulerKind::RandomFair: return "random-fair";
    case SchedulerKind::Scripted: return "scripted";
    case SchedulerKind::AlternatingTerminals: return "alt-terminals";
    case SchedulerKind::Interactive: return "interactive";
    }
    return "?";
}

inline std::optional<SchedulerKind> parse_scheduler_kind(std::string_view s) {
    for (auto k : {SchedulerKind::FsynchAll, SchedulerKind::RoundRobinSingleton, SchedulerKind::RandomFair,
                   SchedulerKind::Scripted, SchedulerKind::AlternatingTerminals, SchedulerKind::Interactive}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

/**
 * Produces the activation set of each round.
 *
 * Rounds must be requested in order 0, 1, 2, ... for the stateful strategies
 * (random-fair, interactive). Built-in SSYNCH strategies are fair with a
 * bounded activation gap.
 */
class Scheduler {
public:
    static Scheduler fsynch() { return Scheduler(SchedulerKind::FsynchAll); }
    static Scheduler round_robin() { return Scheduler(SchedulerKind::RoundRobinSingleton); }

    static Scheduler random_fair(std::uint64_t seed, std::size_t window) {
        if (window == 0) throw Error(ErrorKind::Constraint, "fairness window must be positive");
        Scheduler s(SchedulerKind::RandomFair);
        s.seed_ = seed;
        s.window_ = window;
        s.rng_.seed(seed);
        return s;
    }

    static Scheduler scripted(std::vector<ActivationSet> script) {
        for (const auto& a : script) {
            if (a.size() == 0) throw Error(ErrorKind::Protocol, "activation set must be non-empty");
        }
        Scheduler s(SchedulerKind::Scripted);
        s.script_ = std::move(script);
        return s;
    }

    static Scheduler alternating_terminals(std::size_t first, std::size_t second) {
        Scheduler s(SchedulerKind::AlternatingTerminals);
        s.terminals_ = {first, second};
        return s;
    }

    static Scheduler interactive(std::shared_ptr<ActivationChannel> channel,
                                 std::optional<std::chrono::milliseconds> timeout = std::nullopt) {
        Scheduler s(SchedulerKind::Interactive);
        s.channel_ = std::move(channel);
        s.timeout_ = timeout;
        return s;
    }

    SchedulerKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t window() const { return window_; }
    const std::vector<ActivationSet>& script() const { return script_; }

    ActivationSet next(std::size_t round, std::size_t n) {
        if (n == 0) throw Error(ErrorKind::Precondition, "scheduler needs at least one robot");
        ActivationSet out;
        switch (kind_) {
        case SchedulerKind::FsynchAll:
            out = ActivationSet::all(n);
            break;
        case SchedulerKind::RoundRobinSingleton:
            out = ActivationSet({round % n});
            break;
        case SchedulerKind::AlternatingTerminals:
            out = ActivationSet({round % 2 == 0 ? terminals_[0] : terminals_[1]});
            break;
        case SchedulerKind::Scripted:
            if (round >= script_.size()) {
                throw Error(ErrorKind::ScheduleExhausted,
                            "scripted schedule has no entry for round " + std::to_string(round));
            }
            out = script_[round];
            break;
        case SchedulerKind::RandomFair:
            out = next_random(round, n);
            break;
        case SchedulerKind::Interactive:
            out = channel_->pop(timeout_);
            break;
        }
        out.check_range(n);
        return out;
    }

    /// Robots the fairness audit is taken over. Alternating-terminal never wakes the rest.
    std::vector<std::size_t> audited_robots(std::size_t n) const {
        if (kind_ == SchedulerKind::AlternatingTerminals) return {terminals_[0], terminals_[1]};
        std::vector<std::size_t> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = i;
        return v;
    }

private:
    explicit Scheduler(SchedulerKind k) : kind_(k) {}

    ActivationSet next_random(std::size_t round, std::size_t n) {
        if (last_.size() != n) last_.assign(n, -1);
        std::bernoulli_distribution coin(0.5);
        std::vector<std::size_t> chosen;
        for (std::size_t i = 0; i < n; ++i) {
            const auto gap_if_skipped = static_cast<long long>(round) + 1 - last_[i];
            const bool forced = gap_if_skipped > static_cast<long long>(window_);
            if (coin(rng_) || forced) chosen.push_back(i);
        }
        if (chosen.empty()) {
            chosen.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_));
        }
        for (std::size_t i : chosen) last_[i] = static_cast<long long>(round);
        return ActivationSet(std::move(chosen));
    }

    SchedulerKind kind_;
    std::uint64_t seed_{0};
    std::size_t window_{0};
    std::mt19937_64 rng_{};
    std::vector<long long> last_;
    std::vector<ActivationSet> script_;
    std::vector<std::size_t> terminals_;
    std::shared_ptr<ActivationChannel> channel_;
    std::optional<std::chrono::milliseconds> timeout_;
};

struct FairnessReport {
    std::size_t window{0};
    std::vector<std::size_t> max_gap;   // per robot, over the whole horizon
    std::vector<std::size_t> audited;   // robots the verdict is taken over
    bool pass{true};
};

/**
 * Maximum activation gap per robot. Gaps count from a virtual activation at
 * round -1 and up to a virtual one at round `activations.size()`, so a robot
 * activated every round has gap 1 and a starved robot has gap horizon + 1.
 */
inline FairnessReport fairness_check(const std::vector<ActivationSet>& activations, std::size_t n,
                                     std::size_t window,
                                     std::optional<std::vector<std::size_t>> audited = std::nullopt) {
    FairnessReport r;
    r.window = window;
    r.max_gap.assign(n, 0);
    std::vector<long long> last(n, -1);
    for (std::size_t t = 0; t < activations.size(); ++t) {
        for (std::size_t i : activations[t]) {
            if (i >= n) continue;
            r.max_gap[i] = std::max<std::size_t>(r.max_gap[i], static_cast<std::size_t>(static_cast<long long>(t) - last[i]));
            last[i] = static_cast<long long>(t);
        }
    }
    const auto horizon = static_cast<long long>(activations.size());
    for (std::size_t i = 0; i < n; ++i) {
        r.max_gap[i] = std::max<std::size_t>(r.max_gap[i], static_cast<std::size_t>(horizon - last[i]));
    }
    if (audited) {
        r.audited = *audited;
    } else {
        for (std::size_t i = 0; i < n; ++i) r.audited.push_back(i);
    }
    for (std::size_t i : r.audited) {
        if (i < n && r.max_gap[i] > window) r.pass = false;
    }
    return r;
}

}  // namespace lcm
