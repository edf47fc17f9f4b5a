#pragma once

// Round records, verdicts and the JSONL trace format.
//
// One JSON object per line with exactly the keys
// `round, activated, robots, decisions, verdict`. Numbers are written with 17
// significant digits so a parsed trace reproduces every double bit-for-bit.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "scheduling.hpp"

namespace lcm {

struct Verdict {
    enum class Kind { Running, Solved, SafetyViolation, LivenessStall, InsufficientInfo };

    Kind kind{Kind::Running};
    std::size_t round{0};
    std::string reason;

    static Verdict running(std::size_t round = 0) { return {Kind::Running, round, {}}; }
    static Verdict solved(std::size_t round) { return {Kind::Solved, round, {}}; }
    static Verdict safety(std::size_t round, std::string why) { return {Kind::SafetyViolation, round, std::move(why)}; }
    static Verdict stall(std::size_t round) { return {Kind::LivenessStall, round, {}}; }
    static Verdict insufficient(std::size_t round) { return {Kind::InsufficientInfo, round, {}}; }

    bool terminal() const { return kind != Kind::Running; }
    bool operator==(const Verdict&) const = default;
};

inline std::string_view kind_name(Verdict::Kind k) {
    switch (k) {
    case Verdict::Kind::Running: return "RUNNING";
    case Verdict::Kind::Solved: return "SOLVED";
    case Verdict::Kind::SafetyViolation: return "SAFETY_VIOLATION";
    case Verdict::Kind::LivenessStall: return "LIVENESS_STALL";
    case Verdict::Kind::InsufficientInfo: return "INSUFFICIENT_INFO";
    }
    return "?";
}

inline std::string to_string(const Verdict& v) {
    std::string s(kind_name(v.kind));
    s += "(" + std::to_string(v.round) + ")";
    if (!v.reason.empty()) s += ": " + v.reason;
    return s;
}

struct RobotRecord {
    Point pos{};
    Color light{};

    bool operator==(const RobotRecord&) const = default;
};

struct DecisionRecord {
    std::size_t robot{0};
    Point dest{};   // local frame of the deciding robot
    Color light{};  // light after the round's commit

    bool operator==(const DecisionRecord&) const = default;
};

struct TraceEvent {
    std::size_t round{0};  // scheduler round; the resulting configuration is round + 1
    ActivationSet activated;
    std::vector<RobotRecord> before;
    std::vector<RobotRecord> after;
    std::vector<DecisionRecord> decisions;
    std::string verdict;
    // Engine-side only, not serialized: robots whose algorithm reported insufficient information.
    std::vector<std::size_t> insufficient;

    std::vector<MotionSegment> motions() const {
        std::vector<MotionSegment> m;
        for (std::size_t i = 0; i < after.size() && i < before.size(); ++i) m.push_back({before[i].pos, after[i].pos});
        return m;
    }

    bool operator==(const TraceEvent&) const = default;
};

inline std::vector<RobotRecord> records_of(const Configuration& c) {
    std::vector<RobotRecord> out;
    out.reserve(c.size());
    for (const auto& r : c.robots) out.push_back({r.position, r.light});
    return out;
}

namespace detail {

inline std::string fmt_double(double v) {
    // "-0" would parse back as the integer 0 and lose the sign bit.
    if (v == 0.0 && std::signbit(v)) return "-0.0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_point(const Point& p) { return "[" + fmt_double(p.x) + "," + fmt_double(p.y) + "]"; }

inline std::string fmt_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline Point parse_point(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorKind::Protocol, "expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline std::string serialize_event(const TraceEvent& e) {
    std::string s = "{\"round\":" + std::to_string(e.round) + ",\"activated\":[";
    for (std::size_t i = 0; i < e.activated.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e.activated.robots()[i]);
    }
    s += "],\"robots\":[";
    for (std::size_t i = 0; i < e.after.size(); ++i) {
        if (i) s += ",";
        s += "{\"pos\":" + detail::fmt_point(e.after[i].pos) + ",\"light\":" + detail::fmt_string(e.after[i].light.label) + "}";
    }
    s += "],\"decisions\":[";
    for (std::size_t i = 0; i < e.decisions.size(); ++i) {
        if (i) s += ",";
        const auto& d = e.decisions[i];
        s += "{\"robot\":" + std::to_string(d.robot) + ",\"dest\":" + detail::fmt_point(d.dest) +
             ",\"light\":" + detail::fmt_string(d.light.label) + "}";
    }
    s += "],\"verdict\":" + detail::fmt_string(e.verdict) + "}";
    return s;
}

inline std::string serialize_trace(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += serialize_event(e);
        out += '\n';
    }
    return out;
}

/**
 * Parses JSONL produced by serialize_trace. `initial` supplies the positions
 * before the first event; later `before` states come from the preceding line.
 */
inline std::vector<TraceEvent> parse_trace(const std::string& text, const Configuration& initial) {
    std::vector<TraceEvent> events;
    std::vector<RobotRecord> prev = records_of(initial);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = "trace line " + std::to_string(lineno) + ": ";
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorKind::Protocol, where + "malformed JSON (" + ex.what() + ")");
        }
        try {
            TraceEvent e;
            e.round = j.at("round").get<std::size_t>();
            e.activated = ActivationSet(j.at("activated").get<std::vector<std::size_t>>());
            for (const auto& r : j.at("robots")) {
                e.after.push_back({detail::parse_point(r.at("pos")), Color{r.at("light").get<std::string>()}});
            }
            for (const auto& d : j.at("decisions")) {
                e.decisions.push_back({d.at("robot").get<std::size_t>(), detail::parse_point(d.at("dest")),
                                       Color{d.at("light").get<std::string>()}});
            }
            e.verdict = j.at("verdict").get<std::string>();
            if (e.after.size() != prev.size()) throw Error(ErrorKind::Protocol, "robot count changed");
            e.before = prev;
            prev = e.after;
            events.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorKind::Protocol, where + ex.what());
        } catch (const Error& ex) {
            throw Error(ErrorKind::Protocol, where + ex.what());
        }
    }
    return events;
}

/// Activation sets recorded in a trace or schedule file (only `activated` is read).
inline std::vector<ActivationSet> parse_schedule(const std::string& text) {
    std::vector<ActivationSet> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.emplace_back(nlohmann::json::parse(line).at("activated").get<std::vector<std::size_t>>());
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorKind::Protocol, "schedule line " + std::to_string(lineno) + ": " + ex.what());
        } catch (const Error& ex) {
            throw Error(ErrorKind::Protocol, "schedule line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return out;
}

}  // namespace lcm
