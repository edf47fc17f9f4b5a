// lcm-arena command line: run / matrix / replay / serve.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lcm_arena/config.hpp"
#include "lcm_arena/engine.hpp"
#include "lcm_arena/matrix.hpp"
#include "lcm_arena/server.hpp"
#include "lcm_arena/trace.hpp"

namespace {

using lcm::RunConfig;

/// Run-config flags that were given explicitly, applied on top of a base config.
class ConfigFlags {
public:
    void add_to(CLI::App* app) {
        scalar(app, "--problem", &RunConfig::problem, "ae | eqosc | rendezvous");
        scalar(app, "--d", &RunConfig::d, "EqOsc terminal distance");
        optional(app, "--vr", &RunConfig::vr, "visibility radius (eqosc; rendezvous with --vis limited)");
        scalar(app, "--theta1", &RunConfig::theta1, "AE angle at B, degrees");
        scalar(app, "--theta2", &RunConfig::theta2, "AE angle at C, degrees");
        scalar(app, "--ab", &RunConfig::ab, "AE |AB|");
        scalar(app, "--bc", &RunConfig::bc, "AE |BC|");
        scalar(app, "--cd", &RunConfig::cd, "AE |CD|");
        scalar(app, "--side", &RunConfig::side, "AE: D on the same or opposite side of BC as A");
        scalar(app, "--vis", &RunConfig::vis, "full | limited");
        optional(app, "--epsilon", &RunConfig::epsilon, "AE limited visibility gap, V_r = bc + epsilon");
        scalar(app, "--d0", &RunConfig::d0, "rendezvous initial distance");
        scalar(app, "--algo", &RunConfig::algo, "ae-fv | eo-sta | eo-com | rv-mid | null");
        scalar(app, "--model", &RunConfig::model, "oblot | fsta | fcom | lumi (default: the algorithm's)");
        scalar(app, "--sched", &RunConfig::sched, "fsynch | round-robin | random-fair | scripted | alt-terminals");
        scalar(app, "--seed", &RunConfig::seed, "random-fair scheduler seed");
        optional(app, "--window", &RunConfig::window, "random-fair fairness window (default 2n)");
        scalar(app, "--script", &RunConfig::script_path, "schedule file (JSONL with an \"activated\" key per line)");
        vector(app, "--terminals", &RunConfig::terminals, "alt-terminals robot pair");
        scalar(app, "--frames", &RunConfig::frames, "identity | fixed | fresh");
        scalar(app, "--frame-seed", &RunConfig::frame_seed, "frame adversary seed");
        scalar(app, "--horizon", &RunConfig::horizon, "maximum rounds");
        scalar(app, "--osc-window", &RunConfig::oscillation_window, "EqOsc liveness window L");
        scalar(app, "--tolerance", &RunConfig::tolerance, "geometric equality tolerance");
        scalar(app, "--collision-threshold", &RunConfig::collision_threshold, "collision distance");
        auto* rigid = app->add_flag("--non-rigid", flags_.non_rigid, "reserved; non-rigid moves are rejected");
        items_.push_back({rigid, [](RunConfig& d, const RunConfig& s) { d.non_rigid = s.non_rigid; }});
    }

    RunConfig merge(RunConfig base) const {
        for (const auto& [opt, copy] : items_) {
            if (opt->count() > 0) copy(base, flags_);
        }
        return base;
    }

private:
    template <class T>
    void scalar(CLI::App* app, const std::string& name, T RunConfig::*member, const std::string& help) {
        auto* opt = app->add_option(name, flags_.*member, help);
        items_.push_back({opt, [member](RunConfig& d, const RunConfig& s) { d.*member = s.*member; }});
    }

    template <class T>
    void vector(CLI::App* app, const std::string& name, std::vector<T> RunConfig::*member, const std::string& help) {
        auto* opt = app->add_option(name, flags_.*member, help)->expected(2);
        items_.push_back({opt, [member](RunConfig& d, const RunConfig& s) { d.*member = s.*member; }});
    }

    template <class T>
    void optional(CLI::App* app, const std::string& name, std::optional<T> RunConfig::*member, const std::string& help) {
        auto stash = std::make_shared<T>();
        stashes_.push_back(stash);
        auto* opt = app->add_option(name, *stash, help);
        items_.push_back({opt, [member, stash](RunConfig& d, const RunConfig&) { d.*member = *stash; }});
    }

    RunConfig flags_;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>> items_;
    std::vector<std::shared_ptr<void>> stashes_;
};

RunConfig resolve(const ConfigFlags& flags, const std::string& config_path) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : lcm::load_run_config(config_path);
    cfg = flags.merge(cfg);
    lcm::apply_seed_override(cfg);
    return cfg;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw lcm::Error(lcm::ErrorKind::Protocol, "cannot write " + path);
    out << text;
}

void print_summary(const lcm::RunResult& r, const RunConfig& cfg) {
    std::cout << "problem " << cfg.problem << ", algorithm " << cfg.algo << ", scheduler " << cfg.sched << "\n";
    std::cout << "verdict: " << lcm::to_string(r.verdict) << "\n";
    std::cout << "rounds: " << r.trace.size() << "\n";
    std::cout << "fairness (W=" << r.fairness.window << "): " << (r.fairness.pass ? "pass" : "fail") << ", max gaps [";
    for (std::size_t i = 0; i < r.fairness.max_gap.size(); ++i) std::cout << (i ? " " : "") << r.fairness.max_gap[i];
    std::cout << "]\n";
    if (!r.fairness.pass && cfg.sched == "scripted") std::cout << "warning: scripted schedule is not fair within W\n";
    const auto collisions = lcm::collision_audit(r.trace);
    std::cout << "collisions: " << collisions.size() << "\n";
    std::cout << "final configuration (round " << r.final_config.round << "):\n";
    for (const auto& rob : r.final_config.robots) {
        char line[160];
        std::snprintf(line, sizeof line, "  robot %zu at (%.12g, %.12g) light %s\n", rob.id, rob.position.x,
                      rob.position.y, rob.light.label.c_str());
        std::cout << line;
    }
}

int cmd_run(const ConfigFlags& flags, const std::string& config_path, const std::string& trace_path,
            const std::string& expect) {
    const RunConfig cfg = resolve(flags, config_path);
    const lcm::RunResult r = lcm::make_plan(cfg).execute();
    if (!trace_path.empty()) {
        write_file(trace_path, lcm::serialize_trace(r.trace));
        write_file(trace_path + ".config.json", lcm::to_json(cfg).dump(2) + "\n");
        std::cout << "trace: " << trace_path << "\n";
    }
    print_summary(r, cfg);
    if (!expect.empty() && std::string(lcm::kind_name(r.verdict.kind)) != expect) {
        std::cerr << "expected verdict " << expect << "\n";
        return 1;
    }
    return 0;
}

int cmd_replay(const ConfigFlags& flags, std::string config_path, const std::string& trace_path) {
    if (config_path.empty()) config_path = trace_path + ".config.json";
    const RunConfig cfg = resolve(flags, config_path);
    const lcm::RunPlan plan = lcm::make_plan(cfg);
    lcm::Simulation probe = plan.start();
    const auto events = lcm::parse_trace(lcm::read_text_file(trace_path), probe.initial());
    const auto rep = lcm::replay(events, plan.instance, plan.algorithm, plan.model, plan.frames);
    if (rep.identical) {
        std::cout << "replay identical (" << events.size() << " rounds)\n";
        return 0;
    }
    std::cout << "replay diverged at round " << *rep.divergent_round << ", field " << rep.field << "\n";
    std::cout << "positions " << (rep.positions_identical ? "identical within tolerance" : "differ") << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lcm-arena: Look-Compute-Move robot simulator and model-separation witnesses"};
    app.require_subcommand(1);

    ConfigFlags run_flags, replay_flags;
    std::string run_config, run_trace = "trace.jsonl", run_expect;
    auto* run = app.add_subcommand("run", "execute one configured run");
    run_flags.add_to(run);
    run->add_option("--config", run_config, "run-config JSON file; flags override its fields");
    run->add_option("--trace", run_trace, "trace output path (JSONL); empty disables")->capture_default_str();
    run->add_option("--expect", run_expect, "exit non-zero unless the verdict kind matches (e.g. SOLVED)");

    bool serial = false;
    auto* matrix = app.add_subcommand("matrix", "run the witness matrix for results 1-16");
    matrix->add_flag("--serial", serial, "run cells one after another");

    std::string replay_config, replay_trace;
    auto* replay = app.add_subcommand("replay", "re-execute a trace and compare bit-for-bit");
    replay_flags.add_to(replay);
    replay->add_option("--trace", replay_trace, "trace to replay")->required();
    replay->add_option("--config", replay_config, "run config (default: <trace>.config.json)");

    int port = 7878;
    std::string host = "127.0.0.1";
    auto* serve = app.add_subcommand("serve", "host interactive adversary sessions (NDJSON over TCP)");
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "bind address")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_flags, run_config, run_trace, run_expect);
        if (*matrix) {
            const auto cells = lcm::run_matrix(!serial);
            std::cout << lcm::format_matrix(cells);
            for (const auto& c : cells) {
                if (!c.pass) return 1;
            }
            return 0;
        }
        if (*replay) return cmd_replay(replay_flags, replay_config, replay_trace);
        if (*serve) {
            lcm::TcpServer server(static_cast<std::uint16_t>(port), host);
            std::cout << "serving " << lcm::kProtocolVersion << " on " << host << ":" << server.port() << std::endl;
            server.serve_forever();
            return 0;
        }
    } catch (const lcm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
