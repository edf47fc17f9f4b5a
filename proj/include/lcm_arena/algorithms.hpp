#pragma once

// Robot algorithms as pure functions Snapshot -> Decision.
//
// Every algorithm declares the weakest model it needs; the engine projects a
// stronger model's snapshot down before calling it. Algorithms only use
// relative, chirality-free geometry, so their global behaviour does not
// depend on the observer's frame.

#include <array>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "model.hpp"

namespace lcm {

struct Decision {
    Point destination{};              // local frame; origin means stay
    std::optional<Color> new_light;   // nullopt keeps the current light
    bool insufficient_info{false};    // algorithm cannot decide from what it sees

    static Decision stay() { return {}; }
};

struct Algorithm {
    std::string name;
    ModelKind native_model{ModelKind::Oblot};
    Palette palette;
    std::function<Decision(const Snapshot&)> compute;
};

enum class RoleView { Middle, Terminal, Unknown };

inline std::string_view to_string(RoleView r) {
    switch (r) {
    case RoleView::Middle: return "middle";
    case RoleView::Terminal: return "terminal";
    case RoleView::Unknown: return "unknown";
    }
    return "?";
}

inline RoleView classify_role(const Snapshot& s) {
    if (s.entries.size() == 2) return RoleView::Middle;
    if (s.entries.size() == 1) return RoleView::Terminal;
    return RoleView::Unknown;
}

namespace detail {

inline Point near_destination(const Point& middle) { return middle / 3.0; }
inline Point far_destination(const Point& middle) { return -middle / 2.0; }

}  // namespace detail

// ---- Equidistant oscillation, finite-state robots ----

inline const Palette& eo_sta_palette() {
    static const Palette p({Color{"Off"}, Color{"N"}, Color{"F"}});
    return p;
}

inline Decision alg_eo_sta(const Snapshot& s) {
    if (!s.own_light) throw Error(ErrorKind::Capability, "eo-sta needs its own light (FSTA)");
    for (const auto& e : s.entries) {
        if (!e.colors.empty()) throw Error(ErrorKind::Capability, "eo-sta must not see other robots' lights");
    }
    if (classify_role(s) != RoleView::Terminal) return Decision::stay();

    const Point middle = s.entries.front().position;
    const std::string& light = s.own_light->label;
    if (light == "Off" || light == "F") return {detail::near_destination(middle), Color{"N"}};
    if (light == "N") return {detail::far_destination(middle), Color{"F"}};
    throw Error(ErrorKind::Protocol, "eo-sta: light '" + light + "' is not in {Off, N, F}");
}

// ---- Equidistant oscillation, finite-communication robots ----

inline const Palette& eo_com_palette() {
    static const Palette p({Color{"NIL"}, Color{"NEAR"}, Color{"FAR"}});
    return p;
}

inline Decision alg_eo_com(const Snapshot& s) {
    if (s.own_light) throw Error(ErrorKind::Capability, "eo-com must not read its own light (FCOM)");

    switch (classify_role(s)) {
    case RoleView::Middle: {
        std::vector<std::string> seen;
        for (const auto& e : s.entries) {
            if (e.colors.empty()) throw Error(ErrorKind::Precondition, "eo-com middle sees no terminal light");
            for (const auto& c : e.colors) seen.push_back(c.label);
        }
        const auto all = [&](auto pred) { return std::all_of(seen.begin(), seen.end(), pred); };
        if (all([](const std::string& l) { return l == "NIL" || l == "FAR"; })) {
            return {Point{}, Color{"FAR"}};
        }
        if (all([](const std::string& l) { return l == "NEAR"; })) return {Point{}, Color{"NEAR"}};
        throw Error(ErrorKind::UnreachableState, "eo-com middle observed mixed terminal lights");
    }
    case RoleView::Terminal: {
        const auto& entry = s.entries.front();
        if (entry.colors.size() != 1) {
            throw Error(ErrorKind::Precondition, "eo-com terminal expects exactly one visible light");
        }
        const std::string& light = entry.colors.front().label;
        if (light == "NIL" || light == "NEAR") return {detail::near_destination(entry.position), Color{"NEAR"}};
        if (light == "FAR") return {detail::far_destination(entry.position), Color{"FAR"}};
        throw Error(ErrorKind::Protocol, "eo-com: light '" + light + "' is not in {NIL, NEAR, FAR}");
    }
    case RoleView::Unknown:
        break;
    }
    return {Point{}, Color{"NIL"}};
}

// ---- Angle equalization under full visibility ----

/// A four-robot chain end0 - inner0 - inner1 - end1, by index into the point list.
struct AeChain {
    std::size_t end0{}, inner0{}, inner1{}, end1{};
};

/**
 * Recovers the chain from four points: the inner robots minimise the summed
 * distance to the other three, and each endpoint hangs off its nearest inner
 * robot. Throws Precondition if the shape is ambiguous.
 */
inline AeChain reconstruct_ae_chain(const std::array<Point, 4>& pts, double tol = kGeomTolerance) {
    std::array<double, 4> sum{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) sum[i] += distance(pts[i], pts[j]);
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sum[a] < sum[b]; });
    if (std::abs(sum[order[1]] - sum[order[2]]) <= tol) {
        throw Error(ErrorKind::Precondition, "snapshot is not a valid AE chain (ambiguous inner robots)");
    }
    const std::size_t i0 = order[0], i1 = order[1];
    const std::size_t e0 = order[2], e1 = order[3];
    if (distance(pts[i0], pts[i1]) <= tol) {
        throw Error(ErrorKind::Precondition, "snapshot is not a valid AE chain (inner robots coincide)");
    }
    auto nearer_inner = [&](std::size_t e) {
        return distance(pts[e], pts[i0]) <= distance(pts[e], pts[i1]) ? i0 : i1;
    };
    const std::size_t a0 = nearer_inner(e0);
    const std::size_t a1 = nearer_inner(e1);
    if (a0 == a1) throw Error(ErrorKind::Precondition, "snapshot is not a valid AE chain (endpoints share an inner robot)");
    AeChain c;
    c.end0 = e0;
    c.inner0 = a0;
    c.end1 = e1;
    c.inner1 = a1;
    return c;
}

/// Angle at `inner` between the endpoint and the outward extension of the inner segment.
inline double ae_endpoint_angle(const Point& end, const Point& inner, const Point& other_inner) {
    const Point extension = inner + (inner - other_inner);
    return acute_angle_at(inner, extension, end);
}

inline Decision ae_full_visibility(const Snapshot& s) {
    if (s.entries.size() < 3) {
        Decision d;
        d.insufficient_info = true;
        return d;
    }
    if (s.entries.size() > 3) throw Error(ErrorKind::Precondition, "AE needs exactly four robots");

    const std::array<Point, 4> pts{Point{}, s.entries[0].position, s.entries[1].position, s.entries[2].position};
    for (std::size_t i = 1; i < 4; ++i) {
        if (pts[i] == Point{}) throw Error(ErrorKind::Precondition, "snapshot is not a valid AE chain (co-located robots)");
    }
    const AeChain c = reconstruct_ae_chain(pts);

    const double theta0 = ae_endpoint_angle(pts[c.end0], pts[c.inner0], pts[c.inner1]);
    const double theta1 = ae_endpoint_angle(pts[c.end1], pts[c.inner1], pts[c.inner0]);
    constexpr double right = std::numbers::pi / 2.0;
    if (theta0 >= right || theta1 >= right) {
        throw Error(ErrorKind::Precondition, "snapshot is not a valid AE chain (angle not acute)");
    }

    // Observer is index 0 in pts.
    std::size_t inner = 0, other_inner = 0;
    double own = 0.0, target = 0.0;
    if (c.end0 == 0) {
        inner = c.inner0, other_inner = c.inner1, own = theta0, target = theta1;
    } else if (c.end1 == 0) {
        inner = c.inner1, other_inner = c.inner0, own = theta1, target = theta0;
    } else {
        return Decision::stay();
    }
    if (std::abs(own - target) <= kGeomTolerance || own > target) return Decision::stay();

    const Point b = pts[inner];
    const Point extension = b + (b - pts[other_inner]);
    const Side side = side_of(b, extension, Point{});
    return {point_at_angle(b, extension, target, distance(b, Point{}), side), std::nullopt};
}

// ---- Rendezvous by midpoint ----

inline Decision rendezvous_midpoint(const Snapshot& s) {
    if (s.entries.size() != 1) {
        throw Error(ErrorKind::Precondition, "rv-mid expects exactly one other robot, saw " +
                                                 std::to_string(s.entries.size()));
    }
    return {s.entries.front().position / 2.0, std::nullopt};
}

inline Decision null_algorithm(const Snapshot&) { return Decision::stay(); }

// ---- Registry ----

inline std::vector<std::string> algorithm_names() { return {"ae-fv", "eo-sta", "eo-com", "rv-mid", "null"}; }

inline std::optional<Algorithm> find_algorithm(std::string_view name) {
    if (name == "ae-fv") return Algorithm{"ae-fv", ModelKind::Oblot, Palette{}, ae_full_visibility};
    if (name == "eo-sta") return Algorithm{"eo-sta", ModelKind::Fsta, eo_sta_palette(), alg_eo_sta};
    if (name == "eo-com") return Algorithm{"eo-com", ModelKind::Fcom, eo_com_palette(), alg_eo_com};
    if (name == "rv-mid") return Algorithm{"rv-mid", ModelKind::Oblot, Palette{}, rendezvous_midpoint};
    if (name == "null") return Algorithm{"null", ModelKind::Oblot, Palette{}, null_algorithm};
    return std::nullopt;
}

inline Algorithm algorithm_by_name(std::string_view name) {
    auto a = find_algorithm(name);
    if (!a) throw Error(ErrorKind::Protocol, "unknown algorithm '" + std::string(name) + "'");
    return *a;
}

}  // namespace lcm
