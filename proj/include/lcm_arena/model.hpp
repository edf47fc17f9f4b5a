#pragma once

// Configurations, lights, the four robot models and visibility.
//
// The snapshot layer is the anonymity boundary: robot ids live in the
// Configuration for the engine and monitors, but a Snapshot carries only
// local positions and whatever light information the model allows.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace lcm {

struct Color {
    std::string label;

    auto operator<=>(const Color&) const = default;
};

/// Finite colour set declared by an algorithm. The first colour is the initial ("off") one.
class Palette {
public:
    Palette() : colors_{Color{"OFF"}} {}
    explicit Palette(std::vector<Color> colors) : colors_(std::move(colors)) {
        if (colors_.empty()) throw Error(ErrorKind::Protocol, "palette must not be empty");
    }

    const Color& initial() const { return colors_.front(); }
    const std::vector<Color>& colors() const { return colors_; }
    std::size_t size() const { return colors_.size(); }

    bool contains(const Color& c) const {
        return std::find(colors_.begin(), colors_.end(), c) != colors_.end();
    }

    bool operator==(const Palette&) const = default;

private:
    std::vector<Color> colors_;
};

enum class ModelKind { Oblot, Fsta, Fcom, Lumi };

inline std::string_view to_string(ModelKind m) {
    switch (m) {
    case ModelKind::Oblot: return "oblot";
    case ModelKind::Fsta: return "fsta";
    case ModelKind::Fcom: return "fcom";
    case ModelKind::Lumi: return "lumi";
    }
    return "?";
}

inline std::optional<ModelKind> parse_model(std::string_view s) {
    if (s == "oblot") return ModelKind::Oblot;
    if (s == "fsta") return ModelKind::Fsta;
    if (s == "fcom") return ModelKind::Fcom;
    if (s == "lumi") return ModelKind::Lumi;
    return std::nullopt;
}

/// Robot reads its own light.
inline bool sees_own_light(ModelKind m) { return m == ModelKind::Fsta || m == ModelKind::Lumi; }
/// Robot reads other robots' lights.
inline bool sees_other_lights(ModelKind m) { return m == ModelKind::Fcom || m == ModelKind::Lumi; }

/// Capability order: OBLOT <= FSTA, FCOM <= LUMI; FSTA and FCOM are incomparable.
inline bool model_at_least(ModelKind strong, ModelKind weak) {
    if (strong == weak || weak == ModelKind::Oblot) return true;
    return strong == ModelKind::Lumi;
}

struct VisibilitySpec {
    bool limited{false};
    double radius{0.0};

    static VisibilitySpec full() { return {}; }
    static VisibilitySpec limited_to(double r) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw Error(ErrorKind::Constraint, "visibility radius must be positive");
        }
        return {true, r};
    }

    /// Boundary inclusive: distance == radius is visible.
    bool sees(const Point& a, const Point& b) const { return !limited || distance(a, b) <= radius; }

    bool operator==(const VisibilitySpec&) const = default;
};

struct RobotState {
    std::size_t id{0};
    Point position{};
    Color light{};

    bool operator==(const RobotState&) const = default;
};

struct Configuration {
    std::vector<RobotState> robots;
    std::size_t round{0};

    std::size_t size() const { return robots.size(); }
    const Point& position(std::size_t i) const { return robots.at(i).position; }

    void validate() const {
        if (robots.empty()) throw Error(ErrorKind::Constraint, "configuration must not be empty");
        for (const auto& r : robots) {
            if (!r.position.finite()) {
                throw Error(ErrorKind::Constraint, "configuration contains a non-finite position");
            }
        }
    }

    bool operator==(const Configuration&) const = default;
};

/// Places robots at `positions` with ids 0..n-1 and the palette's initial colour.
inline Configuration make_configuration(const std::vector<Point>& positions, const Color& initial) {
    Configuration c;
    for (std::size_t i = 0; i < positions.size(); ++i) c.robots.push_back({i, positions[i], initial});
    c.validate();
    return c;
}

struct SnapshotEntry {
    Point position{};          // observer's local frame
    std::vector<Color> colors; // multiset, sorted

    bool operator==(const SnapshotEntry&) const = default;
};

struct Snapshot {
    std::optional<Color> own_light;
    std::vector<SnapshotEntry> entries;

    bool operator==(const Snapshot&) const = default;
};

/**
 * What robot `observer` perceives in `c`.
 *
 * Entries exclude the observer itself, merge co-located robots, and are
 * sorted by local position so their order carries no identity.
 */
inline Snapshot build_snapshot(const Configuration& c, std::size_t observer, ModelKind model,
                               const VisibilitySpec& vis, const Frame& frame) {
    if (observer >= c.size()) throw Error(ErrorKind::Precondition, "observer index out of range");
    const RobotState& self = c.robots[observer];

    // Group visible robots by exact global position.
    std::vector<std::pair<Point, std::vector<Color>>> groups;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (j == observer) continue;
        const RobotState& other = c.robots[j];
        if (!vis.sees(self.position, other.position)) continue;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == other.position; });
        if (it == groups.end()) {
            groups.push_back({other.position, {}});
            it = std::prev(groups.end());
        }
        if (sees_other_lights(model)) it->second.push_back(other.light);
    }

    Snapshot s;
    if (sees_own_light(model)) s.own_light = self.light;
    s.entries.reserve(groups.size());
    for (auto& [pos, colors] : groups) {
        std::sort(colors.begin(), colors.end());
        s.entries.push_back({to_local(frame, pos), std::move(colors)});
    }
    std::sort(s.entries.begin(), s.entries.end(), [](const auto& a, const auto& b) {
        return std::pair{a.position.x, a.position.y} < std::pair{b.position.x, b.position.y};
    });
    return s;
}

/// Drops whatever `target` may not read; used to run a weaker model's algorithm on a stronger model.
inline Snapshot project_snapshot(Snapshot s, ModelKind target) {
    if (!sees_own_light(target)) s.own_light.reset();
    if (!sees_other_lights(target)) {
        for (auto& e : s.entries) e.colors.clear();
    }
    return s;
}

inline Configuration apply_light_write(const Configuration& c, std::size_t robot,
                                       const Color& new_color, ModelKind model,
                                       const Palette& palette) {
    if (robot >= c.size()) throw Error(ErrorKind::Precondition, "robot index out of range");
    if (!palette.contains(new_color)) {
        throw Error(ErrorKind::Protocol, "colour '" + new_color.label + "' is not in the palette");
    }
    if (model == ModelKind::Oblot) {
        if (new_color != palette.initial()) {
            throw Error(ErrorKind::Capability, "OBLOT robots cannot set a light");
        }
        return c;
    }
    Configuration out = c;
    out.robots[robot].light = new_color;
    return out;
}

struct VisibilityGraph {
    std::size_t vertices{0};
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, lexicographic

    bool has_edge(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return std::find(edges.begin(), edges.end(), std::pair{i, j}) != edges.end();
    }

    bool operator==(const VisibilityGraph&) const = default;
};

inline VisibilityGraph visibility_graph(const Configuration& c, const VisibilitySpec& vis) {
    VisibilityGraph g{c.size(), {}};
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            if (vis.sees(c.position(i), c.position(j))) g.edges.emplace_back(i, j);
        }
    }
    return g;
}

inline bool is_connected(const VisibilityGraph& g) {
    if (g.vertices <= 1) return true;
    std::vector<std::vector<std::size_t>> adj(g.vertices);
    for (auto [i, j] : g.edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(g.vertices, false);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop();
        for (std::size_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++reached;
                q.push(w);
            }
        }
    }
    return reached == g.vertices;
}

}  // namespace lcm
