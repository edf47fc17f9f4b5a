// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lcm_arena/config.hpp"
#include "lcm_arena/matrix.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace lcm;

namespace {

// Collects the reasons a criterion failed.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 8) failures_.push_back(what);
        if (!ok) ++count_;
    }
    void near(double got, double want, double tol, const std::string& what) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: got %.17g, want %.17g (tol %g)", what.c_str(), got, want, tol);
        expect(std::fabs(got - want) <= tol, buf);
    }
    bool ok() const { return count_ == 0; }
    const std::vector<std::string>& failures() const { return failures_; }
    std::size_t count() const { return count_; }

private:
    std::vector<std::string> failures_;
    std::size_t count_{0};
};

struct Played {
    RunPlan plan;
    RunResult result;
    std::vector<Configuration> configs;  // configs[k] is the configuration after k rounds
    std::string error;
};

Played play(const RunConfig& cfg) {
    Played p;
    try {
        p.plan = make_plan(cfg);
        Simulation sim = p.plan.start();
        while (!sim.finished()) sim.advance();
        p.result = sim.result();
        p.configs = sim.history();
    } catch (const Error& e) {
        p.error = e.what();
    }
    return p;
}

std::string str(std::size_t v) { return std::to_string(v); }

double dist(const Point& a, const Point& b) { return oracle::dist(a.x, a.y, b.x, b.y); }

// Trace rows: configuration k is the initial one for k = 0, else the row after round k - 1.
std::vector<std::vector<RobotRecord>> rows_of(const Played& p) {
    std::vector<std::vector<RobotRecord>> rows;
    rows.push_back(records_of(p.result.initial));
    for (const auto& e : p.result.trace) rows.push_back(e.after);
    return rows;
}

void criterion_eqosc_sta(Check& c) {
    const Played p = play(scenario::eqosc("eo-sta", "fsta", "fsynch", 100));
    c.expect(p.error.empty(), "run failed: " + p.error);
    if (!p.error.empty()) return;
    c.expect(p.result.verdict == Verdict::running(100), "verdict " + to_string(p.result.verdict));
    c.expect(p.result.trace.size() == 100, "rounds " + str(p.result.trace.size()));
    for (const auto& e : p.result.trace) {
        c.expect(e.verdict.rfind("SAFETY", 0) != 0, "violation at round " + str(e.round));
    }
    const auto rows = rows_of(p);
    const char* cycle[] = {"N", "F"};
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double want = k % 2 == 0 ? 3.0 : 2.0;
        c.near(dist(rows[k][0].pos, rows[k][1].pos), want, 1e-9, "left distance at round " + str(k));
        c.near(dist(rows[k][2].pos, rows[k][1].pos), want, 1e-9, "right distance at round " + str(k));
        const std::string light = k == 0 ? "Off" : cycle[(k - 1) % 2];
        c.expect(rows[k][0].light.label == light && rows[k][2].light.label == light,
                 "terminal lights at round " + str(k) + ": " + rows[k][0].light.label + "/" + rows[k][2].light.label);
    }
}

void criterion_eqosc_com(Check& c) {
    const Played sta = play(scenario::eqosc("eo-sta", "fsta", "fsynch", 100));
    const Played com = play(scenario::eqosc("eo-com", "fcom", "fsynch", 100));
    c.expect(com.error.empty(), "run failed: " + com.error);
    if (!com.error.empty() || !sta.error.empty()) return;
    c.expect(com.result.verdict == Verdict::running(100), "verdict " + to_string(com.result.verdict));
    const auto a = rows_of(sta), b = rows_of(com);
    c.expect(a.size() == b.size(), "trajectory lengths differ");
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        for (std::size_t i = 0; i < 3; ++i) c.expect(a[k][i].pos == b[k][i].pos, "position of robot " + str(i) + " at round " + str(k));
        const std::string want = k == 0 ? "NIL" : (k % 2 == 1 ? "FAR" : "NEAR");
        c.expect(b[k][1].light.label == want, "middle light at round " + str(k) + ": " + b[k][1].light.label);
    }
    // Terminals are never shown their own light, and eo-com refuses one if offered.
    for (const auto& conf : com.configs) {
        for (std::size_t t : {0u, 2u}) {
            const Snapshot s = build_snapshot(conf, t, ModelKind::Fcom, com.plan.instance.vis, Frame::identity_at(conf.position(t)));
            c.expect(!s.own_light.has_value(), "terminal " + str(t) + " saw its own light at round " + str(conf.round));
        }
    }
    bool refused = false;
    try {
        alg_eo_com(Snapshot{Color{"NIL"}, {SnapshotEntry{{3, 0}, {Color{"NIL"}}}}});
    } catch (const Error& e) {
        refused = e.kind() == ErrorKind::Capability;
    }
    c.expect(refused, "eo-com accepted a snapshot carrying its own light");
}

void criterion_alternating_terminals(Check& c) {
    for (const char* algo : {"eo-sta", "eo-com"}) {
        const Played p = play(scenario::eqosc(algo, algo == std::string("eo-sta") ? "fsta" : "fcom", "alt-terminals", 100));
        c.expect(p.error.empty(), std::string(algo) + " run failed: " + p.error);
        if (!p.error.empty()) continue;
        c.expect(p.result.verdict.kind == Verdict::Kind::SafetyViolation && p.result.verdict.round == 1,
                 std::string(algo) + " verdict " + to_string(p.result.verdict));
        const auto& f = p.result.final_config;
        c.near(dist(f.position(0), f.position(1)), 2.0, 1e-9, std::string(algo) + " left distance");
        c.near(dist(f.position(2), f.position(1)), 3.0, 1e-9, std::string(algo) + " right distance");
    }
    const Played null = play(scenario::eqosc("null", "oblot", "alt-terminals", 100));
    c.expect(null.error.empty(), "null run failed: " + null.error);
    c.expect(null.result.verdict == Verdict::stall(8), "null verdict " + to_string(null.result.verdict));
}

void criterion_ae_positive(Check& c) {
    const Played p = play(scenario::ae("round-robin", false));
    c.expect(p.error.empty(), "run failed: " + p.error);
    if (!p.error.empty()) return;
    std::size_t first = p.result.trace.size();
    for (const auto& e : p.result.trace) {
        if (e.activated.contains(0)) {
            first = e.round;
            break;
        }
    }
    c.expect(p.result.verdict == Verdict::solved(first + 1), "verdict " + to_string(p.result.verdict) +
                                                                 ", theta1 endpoint first active in round " + str(first));
    const Point a2 = p.result.final_config.position(0);
    c.near(a2.x, -1.0, 1e-9, "A' x");
    c.near(a2.y, std::sqrt(3.0), 1e-9, "A' y");
    c.near(oracle::angle_by_sides({0, 0}, {-1, 0}, a2), oracle::deg(60), 1e-9, "angle at B after the move");
    c.expect(collision_audit(p.result.trace).empty(), "collision reported");
    for (std::size_t i = 1; i < 4; ++i) {
        c.expect(p.result.final_config.position(i) == p.result.initial.position(i), "robot " + str(i) + " moved");
    }
}

void criterion_ae_gap(Check& c) {
    const Played p = play(scenario::ae("fsynch", true));
    c.expect(p.error.empty(), "run failed: " + p.error);
    if (!p.error.empty()) return;
    const Configuration& init = p.result.initial;
    c.near(p.plan.instance.vis.radius, 6.5, 0.0, "visibility radius");
    for (std::size_t end : {0u, 3u}) {
        const Snapshot s = build_snapshot(init, end, ModelKind::Oblot, p.plan.instance.vis, Frame::identity_at(init.position(end)));
        c.expect(s.entries.size() == 1, "endpoint " + str(end) + " sees " + str(s.entries.size()) + " robots");
    }
    c.expect(p.result.verdict.kind == Verdict::Kind::InsufficientInfo, "verdict " + to_string(p.result.verdict));
    const double ac = oracle::law_of_cosines(2.0, 6.0, std::numbers::pi - oracle::deg(30));
    const double bd = oracle::law_of_cosines(6.0, 2.0, std::numbers::pi - oracle::deg(60));
    c.near(ac, 7.797, 1e-3, "|AC| oracle");
    c.near(bd, 7.211, 1e-3, "|BD| oracle");
    c.expect(ac > 6.5 && bd > 6.5, "gap inequalities");
    c.near(dist(init.position(0), init.position(2)), ac, 1e-9, "generated |AC|");
    c.near(dist(init.position(1), init.position(3)), bd, 1e-9, "generated |BD|");
}

void criterion_rendezvous(Check& c) {
    const Played fs = play(scenario::rendezvous("fsynch", 50));
    c.expect(fs.error.empty(), "fsynch run failed: " + fs.error);
    if (fs.error.empty()) {
        c.expect(fs.result.verdict == Verdict::solved(1), "fsynch verdict " + to_string(fs.result.verdict));
        c.expect(fs.configs.size() > 1 && fs.configs[1].position(0) == Point{2, 0} && fs.configs[1].position(1) == Point{2, 0},
                 "fsynch meeting point is not exactly (2, 0)");
    }
    const Played rr = play(scenario::rendezvous("round-robin", 50));
    c.expect(rr.error.empty(), "round-robin run failed: " + rr.error);
    if (!rr.error.empty()) return;
    c.expect(rr.result.verdict.kind == Verdict::Kind::LivenessStall, "round-robin verdict " + to_string(rr.result.verdict));
    c.expect(rr.configs.size() == 51, "round-robin rounds " + str(rr.configs.size() - 1));
    for (std::size_t k = 0; k < rr.configs.size(); ++k) {
        c.near(dist(rr.configs[k].position(0), rr.configs[k].position(1)), 4.0 * std::ldexp(1.0, -static_cast<int>(k)), 1e-12,
               "distance after " + str(k) + " activations");
    }
}

void criterion_matrix(Check& c) {
    const auto first = run_matrix();
    const auto second = run_matrix();
    std::size_t passed = 0;
    for (const auto& cell : first) {
        passed += cell.pass;
        c.expect(cell.pass, "cell " + std::to_string(cell.result) + " " + cell.relation);
    }
    c.expect(first.size() == 16 && passed == 16, str(passed) + "/" + str(first.size()) + " cells");
    c.expect(format_matrix(first) == format_matrix(second), "two matrix runs differ");
}

void frame_obliviousness(Check& c) {
    struct Case {
        std::string algo;
        ModelKind model;
        Configuration config;
        VisibilitySpec vis;
    };
    std::vector<Case> cases;
    const Played sta = play(scenario::eqosc("eo-sta", "fsta", "fsynch", 4));
    const Played com = play(scenario::eqosc("eo-com", "fcom", "fsynch", 4));
    const Played ae = play(scenario::ae("fsynch", false));
    const Played rv = play(scenario::rendezvous("round-robin", 4));
    for (const Played* p : {&sta, &com, &ae, &rv}) {
        c.expect(p->error.empty(), "setup run failed: " + p->error);
        for (const auto& conf : p->configs) cases.push_back({p->plan.algorithm.name, p->plan.model, conf, p->plan.instance.vis});
    }
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    double worst = 0.0;
    for (const auto& cs : cases) {
        const Algorithm alg = algorithm_by_name(cs.algo);
        for (std::size_t i = 0; i < cs.config.size(); ++i) {
            const Frame id = Frame::identity_at(cs.config.position(i));
            const Decision ref = alg.compute(build_snapshot(cs.config, i, cs.model, cs.vis, id));
            const Point ref_global = to_global(id, ref.destination);
            for (int k = 0; k < 100; ++k) {
                const double phi = ang(rng);
                const bool refl = rng() & 1;
                const Frame f{cs.config.position(i), phi, refl};
                const Decision d = alg.compute(build_snapshot(cs.config, i, cs.model, cs.vis, f));
                const Point o = cs.config.position(i);
                const Point g = oracle::to_global(o.x, o.y, phi, refl, d.destination);
                worst = std::max(worst, dist(g, ref_global));
                c.expect(d.new_light == ref.new_light, cs.algo + " light depends on the frame");
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "frame obliviousness worst deviation %.3g", worst);
    c.expect(worst < 1e-9, buf);
}

void capability_filtering(Check& c) {
    auto distinct = [](Configuration conf) {
        for (auto& r : conf.robots) r.light = Color{"L" + std::to_string(r.id)};
        return conf;
    };
    const Configuration eq = distinct(gen_eqosc(3.0).initial);
    const Configuration ae = distinct(make_plan(scenario::ae("fsynch", false)).instance.initial);
    const std::vector<std::pair<Configuration, std::vector<VisibilitySpec>>> cases = {
        {eq, {VisibilitySpec::full(), VisibilitySpec::limited_to(3.5)}},
        {ae, {VisibilitySpec::full(), VisibilitySpec::limited_to(6.5)}},
    };
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (const auto& [conf, visions] : cases) {
        for (const auto& vis : visions) {
            for (ModelKind m : {ModelKind::Oblot, ModelKind::Fsta, ModelKind::Fcom, ModelKind::Lumi}) {
                for (std::size_t i = 0; i < conf.size(); ++i) {
                    const std::string where = std::string(to_string(m)) + " observer " + str(i);
                    const Point o = conf.position(i);
                    const double phi = ang(rng);
                    const bool refl = i % 2;
                    const Snapshot s = build_snapshot(conf, i, m, vis, Frame{o, phi, refl});
                    const bool own = m == ModelKind::Fsta || m == ModelKind::Lumi;
                    c.expect(s.own_light.has_value() == own, where + ": own light presence");
                    if (s.own_light) c.expect(*s.own_light == conf.robots[i].light, where + ": wrong own light");
                    std::vector<std::size_t> visible;
                    for (std::size_t j = 0; j < conf.size(); ++j) {
                        if (j != i && (!vis.limited || dist(o, conf.position(j)) <= vis.radius)) visible.push_back(j);
                    }
                    c.expect(s.entries.size() == visible.size(), where + ": entry count");
                    for (const auto& e : s.entries) {
                        const Point g = oracle::to_global(o.x, o.y, phi, refl, e.position);
                        std::size_t src = conf.size();
                        for (std::size_t j : visible) {
                            if (dist(g, conf.position(j)) < 1e-9) src = j;
                        }
                        c.expect(src < conf.size(), where + ": entry maps to no visible robot");
                        const bool colors = m == ModelKind::Fcom || m == ModelKind::Lumi;
                        if (!colors) {
                            c.expect(e.colors.empty(), where + ": colours leaked");
                        } else if (src < conf.size()) {
                            c.expect(e.colors == std::vector<Color>{conf.robots[src].light}, where + ": wrong colour");
                        }
                    }
                }
            }
        }
    }
}

void min_separation_sampling(Check& c) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
        const MotionSegment a{{u(rng), u(rng)}, {u(rng), u(rng)}};
        MotionSegment b{{u(rng), u(rng)}, {u(rng), u(rng)}};
        if (k % 3 == 0) b.end = a.end;       // meeting at the end
        if (k % 5 == 0) b = {a.end, a.start}; // head-on swap
        worst = std::max(worst, std::fabs(min_separation(a, b) - oracle::sampled_min_separation(a, b, 10000)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "min_separation worst deviation %.3g", worst);
    c.expect(worst < 1e-6, buf);
}

void replay_bit_exactness(Check& c) {
    for (const auto& [name, cfg] : scenario::acceptance_runs()) {
        const Played p = play(cfg);
        c.expect(p.error.empty(), name + " failed: " + p.error);
        if (!p.error.empty()) continue;
        const std::string text = serialize_trace(p.result.trace);
        const auto parsed = parse_trace(text, p.plan.start().initial());
        c.expect(serialize_trace(parsed) == text, name + ": trace text does not round-trip");
        const ReplayReport rep = replay(parsed, p.plan.instance, p.plan.algorithm, p.plan.model, p.plan.frames);
        c.expect(rep.identical, name + ": replay diverged at " + rep.field);
    }
}

// Largest activation gap with virtual activations before round 0 and at the horizon.
std::size_t gap_oracle(const std::vector<ActivationSet>& acts, std::size_t robot) {
    long long last = -1;
    std::size_t worst = 0;
    for (std::size_t t = 0; t < acts.size(); ++t) {
        if (acts[t].contains(robot)) {
            worst = std::max(worst, static_cast<std::size_t>(static_cast<long long>(t) - last));
            last = static_cast<long long>(t);
        }
    }
    return std::max(worst, static_cast<std::size_t>(static_cast<long long>(acts.size()) - last));
}

void fairness_audit(Check& c) {
    for (std::size_t n : {2u, 3u, 4u, 5u}) {
        const std::size_t w = 2 * n;
        std::vector<std::pair<std::string, Scheduler>> strategies = {
            {"round-robin", Scheduler::round_robin()},
            {"random-fair", Scheduler::random_fair(1000 + n, w)},
            {"alt-terminals", Scheduler::alternating_terminals(0, n - 1)},
        };
        for (auto& [name, s] : strategies) {
            const std::vector<std::size_t> audited = s.audited_robots(n);
            std::vector<ActivationSet> acts;
            for (std::size_t t = 0; t < 1000; ++t) acts.push_back(s.next(t, n));
            const FairnessReport rep = fairness_check(acts, n, w, audited);
            c.expect(rep.pass, name + " unfair for n=" + str(n));
            for (std::size_t r : audited) {
                c.expect(gap_oracle(acts, r) <= w, name + " oracle gap for robot " + str(r) + " n=" + str(n));
            }
        }
    }
}

void criterion_properties(Check& c) {
    frame_obliviousness(c);
    capability_filtering(c);
    min_separation_sampling(c);
    replay_bit_exactness(c);
    fairness_audit(c);
}

struct Criterion {
    int id;
    std::string title;
    double budget_ms;
    std::function<void(Check&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "EqOsc eo-sta FSTA FSYNCH oscillates safely", 1000, criterion_eqosc_sta},
        {2, "EqOsc eo-com FCOM FSYNCH matches eo-sta positions", 1000, criterion_eqosc_com},
        {3, "alternating terminals break EqOsc at round 1; null stalls at 8", 1000, criterion_alternating_terminals},
        {4, "AE full visibility round-robin solved by the theta1 endpoint", 1000, criterion_ae_positive},
        {5, "AE limited gap leaves endpoints with insufficient information", 1000, criterion_ae_gap},
        {6, "rendezvous meets under FSYNCH, halves forever under round-robin", 1000, criterion_rendezvous},
        {7, "witness matrix 16/16 and deterministic", 10000, criterion_matrix},
        {8, "property suites", 10000, criterion_properties},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("uncaught exception: ") + e.what());
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        char budget[96];
        std::snprintf(budget, sizeof budget, "runtime %.1f ms over budget %.0f ms", ms, cr.budget_ms);
        check.expect(ms < cr.budget_ms, budget);

        std::printf("%s criterion %d: %s (%.1f ms)\n", check.ok() ? "PASS" : "FAIL", cr.id, cr.title.c_str(), ms);
        for (const auto& f : check.failures()) std::printf("      %s\n", f.c_str());
        if (check.count() > check.failures().size()) {
            std::printf("      ... and %zu more\n", check.count() - check.failures().size());
        }
        failed += !check.ok();
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
