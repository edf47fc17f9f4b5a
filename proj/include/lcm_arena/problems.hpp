#pragma once

// Instance generators and trace monitors for AE, EqOsc and Rendezvous.
//
// Monitors are omniscient: they know which robot plays which role from the
// generator. Only the algorithms are anonymous.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algorithms.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "trace.hpp"

namespace lcm {

enum class ProblemKind { AngleEqualization, EqOsc, Rendezvous };

inline std::string_view to_string(ProblemKind p) {
    switch (p) {
    case ProblemKind::AngleEqualization: return "ae";
    case ProblemKind::EqOsc: return "eqosc";
    case ProblemKind::Rendezvous: return "rendezvous";
    }
    return "?";
}

inline std::optional<ProblemKind> parse_problem(std::string_view s) {
    if (s == "ae") return ProblemKind::AngleEqualization;
    if (s == "eqosc") return ProblemKind::EqOsc;
    if (s == "rendezvous") return ProblemKind::Rendezvous;
    return std::nullopt;
}

/// Whether D sits on the same side of line BC as A.
enum class AeSide { Same, Opposite };

inline constexpr std::size_t kDefaultHorizon = 200;
inline constexpr std::size_t kDefaultOscillationWindow = 8;

struct ProblemInstance {
    ProblemKind kind{ProblemKind::EqOsc};
    Configuration initial;  // positions only; the engine paints the algorithm's initial colour
    VisibilitySpec vis;
    std::size_t horizon{kDefaultHorizon};
    std::size_t oscillation_window{kDefaultOscillationWindow};
    double tolerance{kGeomTolerance};
    double collision_threshold{kCollisionThreshold};

    // EqOsc: d, terminals, middle. Rendezvous: d0 in `d`.
    double d{0.0};
    std::size_t middle{1};
    std::size_t terminal_left{0};
    std::size_t terminal_right{2};

    // AE: robots r1..r4 sit at A, B, C, D.
    double theta1{0.0}, theta2{0.0};
    double ab{0.0}, bc{0.0}, cd{0.0};
    AeSide side{AeSide::Same};
    std::optional<double> gap_epsilon;
    std::size_t ae_a{0}, ae_b{1}, ae_c{2}, ae_d{3};
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline Configuration positions_only(const std::vector<Point>& pts) { return make_configuration(pts, Color{"OFF"}); }

inline void require_connected(const ProblemInstance& p) {
    if (!is_connected(visibility_graph(p.initial, p.vis))) {
        throw Error(ErrorKind::Constraint, "initial visibility graph is disconnected");
    }
}

}  // namespace detail

/// Robots at B=(-d,0), A=(0,0), C=(d,0); the terminals must see only the middle robot in both phases.
inline ProblemInstance gen_eqosc(double d, std::optional<double> vr = std::nullopt) {
    if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorKind::Constraint, "d must be positive");
    const double radius = vr.value_or(7.0 * d / 6.0);
    if (!(radius > d)) {
        throw Error(ErrorKind::Constraint, "V_r > d violated (V_r=" + detail::num(radius) + ", d=" + detail::num(d) + ")");
    }
    if (!(radius < 4.0 * d / 3.0)) {
        throw Error(ErrorKind::Constraint, "V_r < 4d/3 violated (V_r=" + detail::num(radius) + ", 4d/3=" +
                                               detail::num(4.0 * d / 3.0) +
                                               "): terminals would see each other after the near move");
    }
    ProblemInstance p;
    p.kind = ProblemKind::EqOsc;
    p.initial = detail::positions_only({{-d, 0.0}, {0.0, 0.0}, {d, 0.0}});
    p.vis = VisibilitySpec::limited_to(radius);
    p.d = d;
    detail::require_connected(p);
    return p;
}

/// Same EqOsc geometry observed with full visibility.
inline ProblemInstance gen_eqosc_full_visibility(double d) {
    ProblemInstance p = gen_eqosc(d);
    p.vis = VisibilitySpec::full();
    return p;
}

inline ProblemInstance gen_ae(double theta1, double theta2, double ab, double bc, double cd,
                              AeSide side = AeSide::Same, std::optional<double> gap_epsilon = std::nullopt) {
    if (!(theta1 > 0.0)) throw Error(ErrorKind::Constraint, "0 < theta1 violated");
    if (!(theta1 < theta2)) throw Error(ErrorKind::Constraint, "theta1 < theta2 violated (strict inequality required)");
    if (!(theta2 < std::numbers::pi / 2.0)) throw Error(ErrorKind::Constraint, "theta2 < 90 degrees violated");
    for (auto [name, v] : {std::pair{"ab", ab}, std::pair{"bc", bc}, std::pair{"cd", cd}}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::Constraint, std::string(name) + " must be positive");
    }

    const Point b{0.0, 0.0};
    const Point c{bc, 0.0};
    // A above the line (y > 0); for a ray pointing towards -x that is its clockwise side.
    const Point a = point_at_angle(b, {-1.0, 0.0}, theta1, ab, Side::Right);
    const Point dpt = point_at_angle(c, {bc + 1.0, 0.0}, theta2, cd, side == AeSide::Same ? Side::Left : Side::Right);

    ProblemInstance p;
    p.kind = ProblemKind::AngleEqualization;
    p.initial = detail::positions_only({a, b, c, dpt});
    p.theta1 = theta1;
    p.theta2 = theta2;
    p.ab = ab;
    p.bc = bc;
    p.cd = cd;
    p.side = side;
    p.gap_epsilon = gap_epsilon;

    if (gap_epsilon) {
        const double eps = *gap_epsilon;
        if (!(eps > 0.0)) throw Error(ErrorKind::Constraint, "epsilon must be positive");
        const double vr = bc + eps;
        auto need = [&](bool ok, const std::string& what, double value) {
            if (!ok) {
                throw Error(ErrorKind::Constraint, what + " violated (" + detail::num(value) + " vs V_r=" + detail::num(vr) + ")");
            }
        };
        need(distance(a, b) <= vr, "|AB| <= V_r", distance(a, b));
        need(distance(c, dpt) <= vr, "|CD| <= V_r", distance(c, dpt));
        need(distance(b, c) <= vr, "|BC| <= V_r", distance(b, c));
        need(distance(a, c) > vr, "|AC| > V_r", distance(a, c));
        need(distance(b, dpt) > vr, "|BD| > V_r", distance(b, dpt));
        need(distance(a, dpt) > vr, "|AD| > V_r", distance(a, dpt));
        p.vis = VisibilitySpec::limited_to(vr);
    } else {
        p.vis = VisibilitySpec::full();
    }
    detail::require_connected(p);
    return p;
}

inline ProblemInstance gen_rendezvous(double d0, VisibilitySpec vis = VisibilitySpec::full()) {
    if (!(d0 > 0.0) || !std::isfinite(d0)) {
        throw Error(ErrorKind::Constraint, "d0 must be positive (robots already co-located)");
    }
    ProblemInstance p;
    p.kind = ProblemKind::Rendezvous;
    p.initial = detail::positions_only({{0.0, 0.0}, {d0, 0.0}});
    p.vis = vis;
    p.d = d0;
    detail::require_connected(p);
    return p;
}

// ---- Monitors ----

inline Verdict monitor_eqosc(std::span<const Configuration> history, std::size_t middle, std::size_t left,
                             std::size_t right, double d, std::size_t window, double tol = kGeomTolerance) {
    if (history.empty()) return Verdict::running();
    if (history.front().size() != 3) throw Error(ErrorKind::Precondition, "EqOsc monitor needs exactly 3 robots");
    const Point anchor = history.front().position(middle);
    const double near = 2.0 * d / 3.0;

    bool expect_near = true;
    std::size_t last_pose = 0;
    for (std::size_t t = 0; t < history.size(); ++t) {
        const Configuration& c = history[t];
        const double dl = distance(c.position(left), anchor);
        const double dr = distance(c.position(right), anchor);
        if (std::abs(dl - dr) > tol) {
            return Verdict::safety(t, "equidistant condition violated: distances (" + detail::num(dl) + ", " +
                                          detail::num(dr) + ")");
        }
        if (distance(c.position(middle), anchor) > tol) return Verdict::safety(t, "middle robot moved");
        if (expect_near && std::abs(dl - near) <= tol) {
            expect_near = false;
            last_pose = t;
        } else if (!expect_near && std::abs(dl - d) <= tol) {
            expect_near = true;
            last_pose = t;
        }
        if (t - last_pose >= window) return Verdict::stall(t);
    }
    return Verdict::running(history.size() - 1);
}

inline Verdict monitor_eqosc(std::span<const Configuration> history, const ProblemInstance& p) {
    return monitor_eqosc(history, p.middle, p.terminal_left, p.terminal_right, p.d, p.oscillation_window, p.tolerance);
}

namespace detail {

inline bool ae_solved(const std::vector<RobotRecord>& r, const ProblemInstance& p) {
    const Point a = r[p.ae_a].pos, b = r[p.ae_b].pos, c = r[p.ae_c].pos, dd = r[p.ae_d].pos;
    if (a == b || dd == c) return false;
    return std::abs(ae_endpoint_angle(a, b, c) - p.theta2) <= p.tolerance &&
           std::abs(ae_endpoint_angle(dd, c, b) - p.theta2) <= p.tolerance;
}

}  // namespace detail

/// Judges an AE run. The verdict round is the configuration index after the event (event.round + 1).
inline Verdict monitor_ae(std::span<const TraceEvent> events, const ProblemInstance& p) {
    if (p.initial.size() != 4) throw Error(ErrorKind::Precondition, "AE monitor needs exactly 4 robots");
    if (detail::ae_solved(records_of(p.initial), p)) return Verdict::solved(0);
    const Point b0 = p.initial.position(p.ae_b), c0 = p.initial.position(p.ae_c);

    for (const auto& e : events) {
        const std::size_t t = e.round + 1;
        if (e.after.size() != 4) throw Error(ErrorKind::Precondition, "AE monitor needs exactly 4 robots");
        const auto motions = e.motions();
        for (std::size_t i = 0; i < motions.size(); ++i) {
            for (std::size_t j = i + 1; j < motions.size(); ++j) {
                if (min_separation(motions[i], motions[j]) <= p.collision_threshold) {
                    return Verdict::safety(t, "collision between robots " + std::to_string(i) + " and " + std::to_string(j));
                }
            }
        }
        if (!approx_equal(e.after[p.ae_b].pos, b0, p.tolerance) || !approx_equal(e.after[p.ae_c].pos, c0, p.tolerance)) {
            return Verdict::safety(t, "fixed robot moved");
        }
        if (!e.insufficient.empty()) return Verdict::insufficient(t);
        if (detail::ae_solved(e.after, p)) return Verdict::solved(t);
        if (t >= p.horizon) return Verdict::stall(t);
    }
    return Verdict::running(events.empty() ? 0 : events.back().round + 1);
}

/// SOLVED(t) once both robots share a position at t and still do at t + 1.
inline Verdict monitor_rendezvous(std::span<const Configuration> history, std::size_t horizon) {
    // Meeting is exact coincidence: halving under singleton activations drops
    // below any fixed tolerance long before it reaches zero.
    if (!history.empty() && history.front().size() != 2) {
        throw Error(ErrorKind::Precondition, "rendezvous monitor needs exactly 2 robots");
    }
    for (std::size_t t = 0; t + 1 < history.size(); ++t) {
        const auto& now = history[t];
        const auto& next = history[t + 1];
        if (now.position(0) == now.position(1) && next.position(0) == next.position(1) &&
            now.position(0) == next.position(0)) {
            return Verdict::solved(t);
        }
    }
    const std::size_t last = history.empty() ? 0 : history.size() - 1;
    if (last >= horizon) return Verdict::stall(last);
    return Verdict::running(last);
}

}  // namespace lcm
