// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line with a short diagnostic and its wall-clock time; the process exit code
// is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smca/candidate.hpp"
#include "smca/chain.hpp"
#include "smca/cli.hpp"
#include "smca/ltl.hpp"
#include "smca/meanpayoff.hpp"
#include "smca/oracle.hpp"
#include "smca/rabin.hpp"
#include "smca/reach.hpp"
#include "smca/stats.hpp"

using namespace smca;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string path_str(const std::vector<StateId>& path) {
    std::string s;
    for (StateId v : path) {
        if (!s.empty()) s += ' ';
        s += std::to_string(v);
    }
    return s;
}

// ---- criterion 1: candidate semantics against a brute-force suffix oracle

// Reference semantics: enumerate every suffix of the path and accept its
// support S when no traversed edge leaves S and the traversed edges inside S
// connect every ordered pair through at least one edge (so a singleton needs
// a self-loop). Closure plus inner strong connectivity makes S a bottom SCC
// of the traversed-edge graph; at most one such support can exist, which the
// oracle verifies rather than assumes.
std::optional<std::vector<StateId>> suffix_candidate(const std::vector<StateId>& path, StateId n,
                                                     bool& ambiguous) {
    ambiguous = false;
    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (std::size_t i = 1; i < path.size(); ++i) edge[path[i - 1]][path[i]] = true;
    std::optional<std::vector<StateId>> found;
    for (std::size_t start = 0; start < path.size(); ++start) {
        std::vector<bool> in(n, false);
        for (std::size_t i = start; i < path.size(); ++i) in[path[i]] = true;

        bool closed = true;
        for (StateId s = 0; s < n && closed; ++s) {
            if (!in[s]) continue;
            for (StateId t = 0; t < n; ++t)
                if (edge[s][t] && !in[t]) {
                    closed = false;
                    break;
                }
        }
        if (!closed) continue;

        bool strong = true;
        for (StateId a = 0; a < n && strong; ++a) {
            if (!in[a]) continue;
            // reachability from a via >= 1 edge, restricted to the support
            std::vector<bool> seen(n, false);
            std::vector<StateId> queue;
            auto push_from = [&](StateId s) {
                for (StateId t = 0; t < n; ++t)
                    if (edge[s][t] && in[t] && !seen[t]) {
                        seen[t] = true;
                        queue.push_back(t);
                    }
            };
            push_from(a);
            for (std::size_t qi = 0; qi < queue.size(); ++qi) push_from(queue[qi]);
            for (StateId b = 0; b < n; ++b)
                if (in[b] && !seen[b]) {
                    strong = false;
                    break;
                }
        }
        if (!strong) continue;

        std::vector<StateId> members;
        for (StateId s = 0; s < n; ++s)
            if (in[s]) members.push_back(s);
        if (found && *found != members) {
            ambiguous = true;
            return std::nullopt;
        }
        found = std::move(members);
    }
    return found;
}

struct DfsStats {
    std::uint64_t prefixes = 0;
    std::string failure;
};

void dfs_check(const MarkovChain& c, const CandidateTracker& tracker, std::vector<StateId>& path,
               std::size_t max_states, DfsStats& st) {
    if (!st.failure.empty()) return;
    bool ambiguous = false;
    const auto expect = suffix_candidate(path, c.num_states(), ambiguous);
    ++st.prefixes;
    if (ambiguous) {
        st.failure = "two distinct qualifying supports on path " + path_str(path);
        return;
    }
    if (tracker.has_candidate() != expect.has_value() ||
        (expect && tracker.candidate() != *expect)) {
        st.failure = "tracker disagrees with suffix oracle on path " + path_str(path);
        return;
    }
    if (path.size() >= max_states) return;
    for (StateId t : c.row_targets(path.back())) {
        CandidateTracker next = tracker;
        next.advance(t);
        path.push_back(t);
        dfs_check(c, next, path, max_states, st);
        path.pop_back();
    }
}

Outcome criterion1() {
    DfsStats st;
    for (std::uint64_t seed = 1; seed <= 50 && st.failure.empty(); ++seed) {
        const auto chain = gen_random(static_cast<StateId>(2 + seed % 4), 2, seed);
        CandidateTracker root(chain.num_states(), {.check_bound = 1});
        root.advance(0);
        std::vector<StateId> path{0};
        dfs_check(chain, root, path, 12, st);
    }
    if (!st.failure.empty()) return {false, st.failure};
    return {true, "all " + std::to_string(st.prefixes) +
                      " prefixes over 50 random chains match the suffix oracle exactly"};
}

// ---- criterion 2: the worked walks and the footnote arithmetic

Outcome criterion2() {
    // walk s t u t t u t u with ids s=0, t=3, u=4 in a 5-state space
    CandidateTracker tr(5, {.check_bound = 1});
    const std::vector<StateId> walk{0, 3, 4, 3, 3, 4, 3, 4};
    for (StateId s : walk) tr.advance(s);
    if (!tr.has_candidate() || tr.candidate() != std::vector<StateId>{3, 4})
        return {false, "K(stuttutu) is not {t,u}"};
    if (!tr.is_k_candidate(2) || tr.is_k_candidate(3))
        return {false, "stuttutu candidate strength is not exactly 2"};

    // evolution along s0 s0 s1 s0: none, {s0}, none, {s0,s1}
    CandidateTracker ev(2, {.check_bound = 1});
    ev.advance(0);
    const bool step1 = !ev.has_candidate();
    ev.advance(0);
    const bool step2 = ev.has_candidate() && ev.candidate() == std::vector<StateId>{0};
    ev.advance(1);
    const bool step3 = !ev.has_candidate();
    ev.advance(0);
    const bool step4 = ev.has_candidate() && ev.candidate() == std::vector<StateId>{0, 1};
    if (!(step1 && step2 && step3 && step4))
        return {false, "candidate evolution along s0 s0 s1 s0 is off"};

    const double v = 1.0 - std::pow(0.99, 500.0);
    if (v < 0.9925 || v > 0.9935)
        return {false, "1 - 0.99^500 = " + fmt(v, 10) + " outside [0.9925, 0.9935]"};
    return {true, "K(stuttutu) = {t,u} at strength 2, evolution matches, 1 - 0.99^500 = " +
                      fmt(v, 6)};
}

// ---- criterion 3: false-BSCC detection rate stays within delta

Outcome criterion3() {
    const std::uint64_t n_paths = 10'000;
    std::vector<std::pair<std::string, MarkovChain>> chains;
    chains.emplace_back("fig3(8)", gen_fig3(8));
    chains.emplace_back("fig1(5)", gen_fig1(5));
    std::string detail;
    std::uint64_t master = 300;
    for (const auto& [name, chain] : chains) {
        const auto truth = bsccs(chain);
        const double pmin = chain.actual_pmin();
        for (const double delta : {0.1, 0.01}) {
            ++master;
            std::uint64_t errors = 0;
            for (std::uint64_t i = 0; i < n_paths; ++i) {
                PathState ps(master, i);
                CandidateTracker tr(chain.num_states(), {.check_bound = 1});
                bool fired = false;
                for (std::uint64_t step = 0; step < 10'000'000; ++step) {
                    tr.advance(next_state(chain, ps));
                    if (reached_bscc(tr, delta, pmin)) {
                        fired = true;
                        break;
                    }
                }
                if (!fired || std::find(truth.begin(), truth.end(), tr.candidate()) == truth.end())
                    ++errors;
            }
            const double rate = static_cast<double>(errors) / static_cast<double>(n_paths);
            const double bound = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / n_paths);
            if (rate > bound)
                return {false, name + " delta=" + fmt(delta) + ": false-detection rate " +
                                   fmt(rate) + " > " + fmt(bound)};
            if (!detail.empty()) detail += ", ";
            detail += name + " d=" + fmt(delta) + ": " + fmt(rate) + "<=" + fmt(bound);
        }
    }
    return {true, detail};
}

// ---- criterion 4: one-sided reachability sandwich

Outcome criterion4() {
    const double delta = 0.01;
    const std::uint64_t n = 10'000;
    const double sigma = std::sqrt(0.25 / static_cast<double>(n));
    std::vector<std::pair<std::string, MarkovChain>> cases;
    cases.emplace_back("fig1(3)", gen_fig1(3));
    for (std::uint64_t seed = 101; seed <= 120; ++seed)
        cases.emplace_back("random(8,3," + std::to_string(seed) + ")", gen_random(8, 3, seed));
    double worst_low = 0.0, worst_high = 0.0;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& chain = cases[ci].second;
        const auto goal = chain.label_mask("goal").value();
        const double truth = exact_reachability(chain, goal);
        const SampleOptions opt{.delta = delta, .pmin = chain.actual_pmin()};
        std::uint64_t positives = 0;
        for (std::uint64_t i = 0; i < n; ++i)
            positives += static_cast<std::uint64_t>(
                single_path_reach(chain, goal, opt, 4000 + ci, i).bit);
        const double mean = static_cast<double>(positives) / static_cast<double>(n);
        if (mean < truth - delta - 3.0 * sigma || mean > truth + 3.0 * sigma)
            return {false, cases[ci].first + ": mean " + fmt(mean) + " outside [" +
                               fmt(truth - delta - 3.0 * sigma) + ", " +
                               fmt(truth + 3.0 * sigma) + "] around truth " + fmt(truth)};
        worst_low = std::min(worst_low, mean - truth);
        worst_high = std::max(worst_high, mean - truth);
    }
    return {true, "21 chains stay inside [truth - " + fmt(delta + 3.0 * sigma) + ", truth + " +
                      fmt(3.0 * sigma) + "]; mean - truth spans [" + fmt(worst_low) + ", " +
                      fmt(worst_high) + "]"};
}

// ---- criterion 5: end-to-end sequential test strength

Outcome criterion5() {
    const auto chain = gen_fig1(3);
    const auto goal = chain.label_mask("goal").value();
    VerifyOptions opt;
    opt.pmin = chain.actual_pmin();
    const int runs = 200;
    const double need = 0.99 - 3.0 * std::sqrt(0.01 * 0.99 / runs);
    std::string detail;
    for (const double p : {0.4, 0.6}) {
        const std::string want = p < 0.5 ? "H0" : "H1";
        int correct = 0;
        for (int r = 0; r < runs; ++r) {
            const HypothesisSpec spec{p, 0.01, 0.01, 0.01, 0.001};
            const std::uint64_t seed = (p < 0.5 ? 11'000 : 12'000) + static_cast<std::uint64_t>(r);
            correct += verify_reach(chain, goal, spec, seed, opt).decision == want;
        }
        const double rate = static_cast<double>(correct) / runs;
        if (rate < need)
            return {false, "p=" + fmt(p) + ": correct rate " + fmt(rate) + " < " + fmt(need)};
        if (!detail.empty()) detail += ", ";
        detail += "p=" + fmt(p) + ": " + std::to_string(correct) + "/200 " + want;
    }
    return {true, detail + " (required rate " + fmt(need) + ")"};
}

// ---- criterion 6: two-sided omega-regular sandwich

RabinAutomaton eventually_goal_dra() {
    RabinAutomaton::Data d;
    d.n_states = 2;
    d.start = 0;
    d.ap_names = {"goal"};
    d.n_pairs = 1;
    d.state_sets = {0, 0b10}; // q1 in Inf(0); sticky once goal is seen
    d.edges.resize(2);
    d.edges[0].push_back({LabelExpr::atom(0), 1});
    d.edges[0].push_back({LabelExpr::negate(LabelExpr::atom(0)), 0});
    d.edges[1].push_back({LabelExpr::constant(true), 1});
    return RabinAutomaton(std::move(d));
}

Outcome criterion6() {
    const auto chain = gen_fig1(3);
    const auto dra = eventually_goal_dra();
    const double via_ltl = exact_ltl(chain, dra);
    const double via_reach = exact_reachability(chain, chain.label_mask("goal").value());
    if (std::abs(via_ltl - via_reach) > 1e-9)
        return {false, "product oracle " + fmt(via_ltl, 12) + " vs reachability oracle " +
                           fmt(via_reach, 12)};
    const double delta = 0.01;
    const std::uint64_t n = 10'000;
    const double sigma = std::sqrt(0.25 / static_cast<double>(n));
    const auto letters = letters_by_state(chain, map_propositions(chain, dra));
    const SampleOptions opt{.delta = delta, .pmin = chain.actual_pmin()};
    std::uint64_t positives = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        positives +=
            static_cast<std::uint64_t>(single_path_ltl(chain, dra, letters, opt, 6100, i).bit);
    const double mean = static_cast<double>(positives) / static_cast<double>(n);
    const double lo = 0.5 - delta - 3.0 * sigma, hi = 0.5 + delta + 3.0 * sigma;
    if (mean < lo || mean > hi)
        return {false, "mean " + fmt(mean) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]"};
    return {true, "mean " + fmt(mean) + " in [" + fmt(lo) + ", " + fmt(hi) +
                      "], oracles agree to " + fmt(std::abs(via_ltl - via_reach), 3)};
}

// ---- criterion 7: mean-payoff per-sample accuracy, coverage, interval size

Outcome criterion7() {
    std::string detail;

    // per-sample guarantee across ten random ergodic chains
    {
        const std::uint64_t n = 1'000;
        const double mperr = 0.05, delta = 0.02;
        const double bound = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / n);
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto chain = gen_random_ergodic(3, seed);
            const double truth = exact_mp(chain);
            const MpSampleOptions opt{.mperr = mperr, .delta = delta,
                                      .pmin = chain.actual_pmin()};
            std::uint64_t misses = 0;
            for (std::uint64_t i = 0; i < n; ++i) {
                const auto s = single_path_mp(chain, opt, 7'000 + seed, i);
                if (s.verdict != PathVerdict::BsccDetected || std::abs(s.value - truth) > mperr)
                    ++misses;
            }
            const double rate = static_cast<double>(misses) / static_cast<double>(n);
            worst = std::max(worst, rate);
            if (rate > bound)
                return {false, "ergodic seed " + std::to_string(seed) + ": per-sample miss rate " +
                                   fmt(rate) + " > " + fmt(bound)};
        }
        detail = "worst per-sample miss rate " + fmt(worst) + " <= " + fmt(bound);
    }

    // interval coverage over 200 replications on one chain
    const auto chain = gen_random_ergodic(3, 2);
    const double truth = exact_mp(chain);
    {
        MpEstimateOptions opt;
        opt.alpha = 0.05;
        opt.mperr = 0.08;
        opt.delta = 0.011;
        opt.n_samples = 50;
        opt.pmin = chain.actual_pmin();
        const int runs = 200;
        int covered = 0;
        for (int r = 0; r < runs; ++r) {
            const auto rep = estimate_mp(chain, opt, 8'000 + static_cast<std::uint64_t>(r));
            covered += rep.interval.lo <= truth && truth <= rep.interval.hi;
        }
        const double need = 0.95 - 3.0 * std::sqrt(0.05 * 0.95 / runs);
        const double rate = static_cast<double>(covered) / runs;
        if (rate < need)
            return {false, "interval coverage " + fmt(rate) + " < " + fmt(need)};
        detail += "; coverage " + std::to_string(covered) + "/200 (need " + fmt(need) + ")";
    }

    // headline run: widened 95% interval no larger than 0.22
    {
        MpEstimateOptions opt;
        opt.alpha = 0.05;
        opt.mperr = 0.08;
        opt.delta = 0.011;
        opt.n_samples = 5'110;
        opt.pmin = chain.actual_pmin();
        const auto rep = estimate_mp(chain, opt, 777);
        const double size = rep.interval.hi - rep.interval.lo;
        if (size > 0.22)
            return {false, "interval size " + fmt(size, 8) + " > 0.22 at n=5110"};
        detail += "; interval size " + fmt(size, 6) + " <= 0.22 at n=5110";
    }
    return {true, detail};
}

// ---- criterion 8: structural BSCC counts through the command line

nlohmann::json run_cli_json(const std::vector<std::string>& args, int& code) {
    std::vector<const char*> argv{"smca"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return nlohmann::json::parse(out.str());
}

Outcome criterion8() {
    int code = 0;
    const auto ladder = run_cli_json({"exact", "bsccs", "--gen", "fig3:16"}, code);
    if (code != 0) return {false, "exact bsccs on fig3:16 exited " + std::to_string(code)};
    if (ladder["n_bsccs"] != 1 || ladder["max_size"] != 1)
        return {false, "fig3:16 reported (" + ladder["n_bsccs"].dump() + ", " +
                           ladder["max_size"].dump() + "), expected (1, 1)"};
    const auto arms = run_cli_json({"exact", "bsccs", "--gen", "fig4:1000,5"}, code);
    if (code != 0) return {false, "exact bsccs on fig4:1000,5 exited " + std::to_string(code)};
    if (arms["n_bsccs"] != 2 || arms["max_size"] != 5)
        return {false, "fig4:1000,5 reported (" + arms["n_bsccs"].dump() + ", " +
                           arms["max_size"].dump() + "), expected (2, 5)"};
    return {true, "fig3:16 -> (1, 1), fig4:1000,5 -> (2, 5)"};
}

// ---- criterion 9: termination baseline underestimates where the verifier holds

Outcome criterion9() {
    const auto chain = gen_fig3(18);
    const auto goal = chain.label_mask("goal").value();
    const double truth = exact_reachability(chain, goal);
    if (std::abs(truth - 1.0) > 1e-9)
        return {false, "oracle reachability " + fmt(truth, 12) + " is not 1"};
    const auto base = baseline_estimate(chain, goal, 1e-3, 10'000, 0.05, 31);
    if (!(base.mean < 0.5))
        return {false, "termination baseline mean " + fmt(base.mean) + " not below 0.5"};
    const HypothesisSpec spec{0.9, 0.05, 0.01, 0.01, 0.025};
    VerifyOptions opt;
    opt.pmin = chain.actual_pmin();
    const auto rep = verify_reach(chain, goal, spec, 31, opt);
    if (rep.decision != "H0")
        return {false, "verifier decided " + rep.decision + " for p=0.9 against truth 1"};
    return {true, "baseline mean " + fmt(base.mean) + " despite truth 1; verifier H0 after " +
                      std::to_string(rep.n_samples) + " samples"};
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* what;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "candidate semantics vs suffix oracle", criterion1},
        {2, "worked walks and footnote arithmetic", criterion2},
        {3, "false-BSCC detection rate", criterion3},
        {4, "reachability estimator sandwich", criterion4},
        {5, "sequential test strength", criterion5},
        {6, "omega-regular estimator sandwich", criterion6},
        {7, "mean-payoff guarantees", criterion7},
        {8, "structural BSCC report", criterion8},
        {9, "termination baseline pitfall", criterion9},
    };
    int failures = 0;
    for (const auto& e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("unexpected exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << e.id << " (" << e.what << "): "
                  << (out.pass ? "PASS" : "FAIL") << " - " << out.detail << " [" << fmt(secs, 3)
                  << "s]" << std::endl;
        failures += out.pass ? 0 : 1;
    }
    if (failures == 0)
        std::cout << "all 9 acceptance criteria passed" << std::endl;
    else
        std::cout << failures << " acceptance criteria failed" << std::endl;
    return failures;
}
