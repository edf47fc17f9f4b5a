#pragma once

// The sixteen model-separation results as concrete witness runs.
//
// Each result pairs runs where the algorithm succeeds on the stronger side
// with runs where the visibility gap or the adversary defeats it on the weaker
// side. These are witnesses, not proofs.

#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "trace.hpp"

namespace lcm {

struct WitnessRun {
    std::string label;     // e.g. "AE F.V. FSYNCH"
    RunConfig config;
    Verdict::Kind expected{Verdict::Kind::Solved};
};

struct WitnessOutcome {
    std::string label;
    std::string setting;   // problem / model / scheduler / visibility
    Verdict::Kind expected{Verdict::Kind::Solved};
    std::string observed;  // verdict text or the error that stopped the run
    bool pass{false};
};

struct MatrixCell {
    int result{0};
    std::string relation;
    std::vector<WitnessOutcome> witnesses;
    bool pass{false};
};

namespace matrix_detail {

inline std::string upper(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

inline RunConfig ae(const std::string& model, const std::string& sched, bool limited) {
    RunConfig c;
    c.problem = "ae";
    c.algo = "ae-fv";
    c.model = model;
    c.sched = sched;
    c.vis = limited ? "limited" : "full";
    if (limited) c.epsilon = 0.5;
    return c;
}

inline RunConfig eqosc(const std::string& algo, const std::string& model, const std::string& sched, bool full) {
    RunConfig c;
    c.problem = "eqosc";
    c.algo = algo;
    c.model = model;
    c.sched = sched;
    c.vis = full ? "full" : "limited";
    c.horizon = 100;
    return c;
}

inline RunConfig rendezvous(const std::string& sched, bool limited) {
    RunConfig c;
    c.problem = "rendezvous";
    c.algo = "rv-mid";
    c.model = "oblot";
    c.sched = sched;
    c.vis = limited ? "limited" : "full";
    c.horizon = 50;
    return c;
}

inline std::string setting_of(const RunConfig& c) {
    std::string vis = c.vis == "limited" ? "L.V." : "F.V.";
    return c.problem + " / " + upper(c.model) + " / " + c.sched + " / " + vis + " / " + c.algo;
}

inline WitnessOutcome evaluate(const WitnessRun& w) {
    WitnessOutcome o{w.label, setting_of(w.config), w.expected, {}, false};
    try {
        const RunResult r = make_plan(w.config).execute();
        o.observed = to_string(r.verdict);
        o.pass = r.verdict.kind == w.expected;
    } catch (const Error& e) {
        o.observed = std::string("error: ") + e.what();
    }
    return o;
}

}  // namespace matrix_detail

/// The predefined witness suite, in result order 1..16.
inline std::vector<std::pair<int, std::string>> matrix_relations() {
    return {
        {1, "OBLOT^F_F.V. > OBLOT^F_L.V."}, {2, "FSTA^F_F.V. > FSTA^F_L.V."},
        {3, "FCOM^F_F.V. > FCOM^F_L.V."},   {4, "LUMI^F_F.V. > LUMI^F_L.V."},
        {5, "OBLOT^S_F.V. > OBLOT^S_L.V."}, {6, "FSTA^S_F.V. > FSTA^S_L.V."},
        {7, "FCOM^S_F.V. > FCOM^S_L.V."},   {8, "LUMI^S_F.V. > LUMI^S_L.V."},
        {9, "OBLOT^F_L.V. > OBLOT^S_L.V."}, {10, "FSTA^F_L.V. > FSTA^S_L.V."},
        {11, "FCOM^F_L.V. > FCOM^S_L.V."},  {12, "LUMI^F_L.V. > LUMI^S_L.V."},
        {13, "OBLOT^F_L.V. _|_ OBLOT^S_F.V."}, {14, "FSTA^F_L.V. _|_ FSTA^S_F.V."},
        {15, "FCOM^F_L.V. _|_ FCOM^S_F.V."},   {16, "LUMI^F_L.V. _|_ LUMI^S_F.V."},
    };
}

inline std::vector<WitnessRun> matrix_witnesses(int result) {
    using matrix_detail::ae;
    using matrix_detail::eqosc;
    using matrix_detail::rendezvous;
    using K = Verdict::Kind;
    static const char* models[] = {"oblot", "fsta", "fcom", "lumi"};

    if (result >= 1 && result <= 8) {
        const std::string model = models[(result - 1) % 4];
        const std::string sched = result <= 4 ? "fsynch" : "round-robin";
        return {
            {"AE solved with full visibility", ae(model, sched, false), K::Solved},
            {"AE endpoint blind under V_r = BC + 0.5", ae(model, sched, true), K::InsufficientInfo},
        };
    }
    switch (result) {
    case 9:
        return {
            {"rendezvous solved under FSYNCH", rendezvous("fsynch", true), K::Solved},
            {"rendezvous stalls under singleton SSYNCH", rendezvous("round-robin", true), K::LivenessStall},
        };
    case 10:
        return {
            {"EqOsc oscillates under FSYNCH", eqosc("eo-sta", "fsta", "fsynch", false), K::Running},
            {"alternating-terminal adversary breaks equidistance", eqosc("eo-sta", "fsta", "alt-terminals", false), K::SafetyViolation},
        };
    case 11:
        return {
            {"EqOsc oscillates under FSYNCH", eqosc("eo-com", "fcom", "fsynch", false), K::Running},
            {"alternating-terminal adversary breaks equidistance", eqosc("eo-com", "fcom", "alt-terminals", false), K::SafetyViolation},
        };
    case 12:
        return {
            {"EqOsc (eo-sta) oscillates under FSYNCH", eqosc("eo-sta", "lumi", "fsynch", false), K::Running},
            {"EqOsc (eo-com) oscillates under FSYNCH", eqosc("eo-com", "lumi", "fsynch", false), K::Running},
            {"alternating-terminal adversary breaks equidistance", eqosc("eo-sta", "lumi", "alt-terminals", false), K::SafetyViolation},
            {"alternating-terminal adversary breaks equidistance", eqosc("eo-com", "lumi", "alt-terminals", false), K::SafetyViolation},
        };
    case 13:
        return {
            {"AE solved with full visibility under SSYNCH", ae("oblot", "round-robin", false), K::Solved},
            {"AE endpoint blind under limited visibility, FSYNCH", ae("oblot", "fsynch", true), K::InsufficientInfo},
            {"rendezvous solved under FSYNCH, limited visibility", rendezvous("fsynch", true), K::Solved},
            {"rendezvous stalls under singleton SSYNCH, full visibility", rendezvous("round-robin", false), K::LivenessStall},
        };
    case 14:
    case 15:
    case 16: {
        const std::string model = result == 14 ? "fsta" : result == 15 ? "fcom" : "lumi";
        const std::string algo = result == 14 ? "eo-sta" : "eo-com";
        return {
            {"EqOsc oscillates under FSYNCH, limited visibility", eqosc(algo, model, "fsynch", false), K::Running},
            {"EqOsc never oscillates under the adversary with full visibility", eqosc(algo, model, "alt-terminals", true), K::LivenessStall},
            {"AE solved with full visibility under SSYNCH", ae(model, "round-robin", false), K::Solved},
            {"AE endpoint blind under limited visibility, FSYNCH", ae(model, "fsynch", true), K::InsufficientInfo},
        };
    }
    default:
        return {};
    }
}

/// Runs every witness; cells run concurrently and share nothing.
inline std::vector<MatrixCell> run_matrix(bool parallel = true) {
    std::vector<std::future<MatrixCell>> jobs;
    for (const auto& [id, relation] : matrix_relations()) {
        auto job = [id, relation] {
            MatrixCell cell{id, relation, {}, true};
            for (const auto& w : matrix_witnesses(id)) {
                cell.witnesses.push_back(matrix_detail::evaluate(w));
                cell.pass = cell.pass && cell.witnesses.back().pass;
            }
            return cell;
        };
        jobs.push_back(std::async(parallel ? std::launch::async : std::launch::deferred, job));
    }
    std::vector<MatrixCell> cells;
    for (auto& j : jobs) cells.push_back(j.get());
    return cells;
}

inline std::string format_matrix(const std::vector<MatrixCell>& cells) {
    std::ostringstream out;
    out << "Model-separation witness matrix (witnesses, not proofs)\n";
    std::size_t passed = 0;
    for (const auto& c : cells) {
        out << (c.pass ? "PASS" : "FAIL") << "  " << c.result << ". " << c.relation << "\n";
        for (const auto& w : c.witnesses) {
            out << "        [" << (w.pass ? "ok" : "MISMATCH") << "] " << w.label << "\n"
                << "              " << w.setting << "\n"
                << "              expected " << kind_name(w.expected) << ", observed " << w.observed << "\n";
        }
        if (c.pass) ++passed;
    }
    out << passed << "/" << cells.size() << " witness cells match\n";
    return out.str();
}

}  // namespace lcm
