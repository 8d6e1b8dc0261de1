#include "smca/cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smca/chain.hpp"
#include "smca/errors.hpp"
#include "smca/ltl.hpp"
#include "smca/meanpayoff.hpp"
#include "smca/model_io.hpp"
#include "smca/oracle.hpp"
#include "smca/rabin.hpp"
#include "smca/reach.hpp"
#include "smca/stats.hpp"

namespace smca {

namespace {

constexpr int kSchemaVersion = 1;

using nlohmann::json;

// --- shared flag bundles ---------------------------------------------------

struct ModelFlags {
    std::string tra, lab, init, rew, gen;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
    auto* tra = cmd->add_option("--tra", mf.tra, "transition matrix file (.tra)");
    auto* gen = cmd->add_option(
        "--gen", mf.gen,
        "generate the model instead: fig1:m | fig3:n | fig4:N,M | random:n,d,seed | ergodic:n,seed");
    cmd->add_option("--lab", mf.lab, "state labeling file (.lab)")->needs(tra);
    cmd->add_option("--init", mf.init, "initial distribution file (.init)")->needs(tra);
    cmd->add_option("--rew", mf.rew, "state rewards file (.rew)")->needs(tra);
    tra->excludes(gen);
    gen->excludes(tra);
}

std::vector<std::uint64_t> family_args(const std::string& spec, std::size_t want) {
    const auto colon = spec.find(':');
    std::vector<std::uint64_t> args;
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string tok = rest.substr(0, comma);
        try {
            std::size_t used = 0;
            args.push_back(std::stoull(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("bad number '" + tok + "' in family spec '" + spec + "'");
        }
        if (comma == std::string::npos) break;
        rest = rest.substr(comma + 1);
    }
    if (args.size() != want)
        throw ValidationError("family spec '" + spec + "' needs " + std::to_string(want) +
                              " argument(s)");
    return args;
}

MarkovChain gen_family(const std::string& spec) {
    const std::string name = spec.substr(0, spec.find(':'));
    if (name == "fig1") {
        const auto a = family_args(spec, 1);
        return gen_fig1(static_cast<std::uint32_t>(a[0]));
    }
    if (name == "fig3") {
        const auto a = family_args(spec, 1);
        return gen_fig3(static_cast<std::uint32_t>(a[0]));
    }
    if (name == "fig4") {
        const auto a = family_args(spec, 2);
        return gen_fig4(static_cast<std::uint32_t>(a[0]), static_cast<std::uint32_t>(a[1]));
    }
    if (name == "random") {
        const auto a = family_args(spec, 3);
        return gen_random(static_cast<StateId>(a[0]), static_cast<StateId>(a[1]), a[2]);
    }
    if (name == "ergodic") {
        const auto a = family_args(spec, 2);
        return gen_random_ergodic(static_cast<StateId>(a[0]), a[1]);
    }
    throw ValidationError("unknown model family '" + name +
                          "' (expected fig1, fig3, fig4, random, or ergodic)");
}

MarkovChain load_model(const ModelFlags& mf) {
    if (!mf.gen.empty()) return gen_family(mf.gen);
    if (mf.tra.empty())
        throw ValidationError("provide a model via --tra/--lab or --gen");
    if (mf.lab.empty()) throw ValidationError("--tra requires --lab");
    ChainFiles files;
    files.tra = mf.tra;
    files.lab = mf.lab;
    if (!mf.init.empty()) files.init = mf.init;
    if (!mf.rew.empty()) files.rew = mf.rew;
    return load_chain(files);
}

std::vector<bool> goal_mask(const MarkovChain& chain, const std::string& label) {
    auto mask = chain.label_mask(label);
    if (!mask) {
        std::string known;
        for (const auto& l : chain.label_names()) known += (known.empty() ? "" : ", ") + l;
        throw ValidationError("no label \"" + label + "\" in the model (labels: " +
                              (known.empty() ? "<none>" : known) + ")");
    }
    return std::move(*mask);
}

// The guarantees assume pmin really bounds every transition probability from
// below; with the model in hand an overestimate is detectable, so refuse it.
double resolve_pmin(const MarkovChain& chain, double flag) {
    if (flag == 0.0) return chain.declared_pmin();
    if (!(flag > 0.0) || flag > 1.0) throw ValidationError("--pmin must be in (0,1]");
    if (flag > chain.actual_pmin())
        throw ValidationError("--pmin " + std::to_string(flag) +
                              " exceeds the smallest transition probability " +
                              std::to_string(chain.actual_pmin()) +
                              "; an overestimate voids every guarantee");
    return flag;
}

struct HypFlags {
    double p = 0.0, epsilon = 0.0, alpha = 0.0, beta = 0.0;
    double delta = -1.0; // sentinel: epsilon/2
};

void add_hyp_flags(CLI::App* cmd, HypFlags& hf) {
    cmd->add_option("--p", hf.p, "probability threshold under test")->required();
    cmd->add_option("--epsilon", hf.epsilon, "half-width of the indifference region")->required();
    cmd->add_option("--alpha", hf.alpha, "bound on false NO (type I error)")->required();
    cmd->add_option("--beta", hf.beta, "bound on false YES (type II error)")->required();
    cmd->add_option("--delta", hf.delta, "per-path BSCC detection error (default epsilon/2)");
}

HypothesisSpec to_spec(const HypFlags& hf) {
    HypothesisSpec spec;
    spec.p = hf.p;
    spec.epsilon = hf.epsilon;
    spec.alpha = hf.alpha;
    spec.beta = hf.beta;
    spec.delta = hf.delta < 0 ? hf.epsilon / 2.0 : hf.delta;
    spec.validate();
    return spec;
}

struct RunFlags {
    std::uint64_t seed = 0;
    std::uint32_t check_bound = 1000;
    std::uint64_t max_steps = 100'000'000;
    unsigned threads = 1;
    double pmin = 0.0;
};

void add_run_flags(CLI::App* cmd, RunFlags& rf) {
    cmd->add_option("--seed", rf.seed, "master seed; fixed seed fixes every byte of output");
    cmd->add_option("--pmin", rf.pmin,
                    "lower bound on transition probabilities (default: smallest in the model)");
    cmd->add_option("--check-bound", rf.check_bound, "steps between candidate recomputations")
        ->check(CLI::Range(std::uint32_t{1}, std::numeric_limits<std::uint32_t>::max()));
    cmd->add_option("--max-steps", rf.max_steps, "per-path step budget before giving up");
    cmd->add_option("--threads", rf.threads, "sampling threads (identical results)")
        ->check(CLI::Range(1u, 1024u));
}

json spec_json(const HypothesisSpec& spec) {
    return {{"p", spec.p},         {"epsilon", spec.epsilon}, {"alpha", spec.alpha},
            {"beta", spec.beta},   {"delta", spec.delta}};
}

json verification_json(const char* command, const VerificationReport& rep, json parameters) {
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"decision", rep.decision},
            {"n_samples", rep.n_samples},
            {"positive_samples", rep.positive_samples},
            {"llr", rep.llr},
            {"mean_path_length", rep.mean_path_length},
            {"max_path_length", rep.max_path_length},
            {"sim_bound", rep.sim_bound},
            {"seed", rep.seed},
            {"parameters", std::move(parameters)}};
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void summarize_verification(std::ostream& err, const char* what, const HypothesisSpec& spec,
                            const VerificationReport& rep) {
    err << what << ": decision " << rep.decision << " ("
        << (rep.decision == "H0" ? "YES, probability >= " : "NO, probability < ") << spec.p
        << " at the requested strength)\n"
        << "  samples: " << rep.n_samples << " (" << rep.positive_samples
        << " positive), mean path length " << rep.mean_path_length << ", max "
        << rep.max_path_length << "\n";
}

// --- subcommand payloads ----------------------------------------------------

struct ReachArgs {
    ModelFlags model;
    HypFlags hyp;
    RunFlags run;
    std::string goal = "goal";
};

int do_check_reach(const ReachArgs& a, std::ostream& out, std::ostream& err) {
    const MarkovChain chain = load_model(a.model);
    const HypothesisSpec spec = to_spec(a.hyp);
    VerifyOptions opt;
    opt.check_bound = a.run.check_bound;
    opt.max_steps = a.run.max_steps;
    opt.threads = a.run.threads;
    opt.pmin = resolve_pmin(chain, a.run.pmin);
    const auto rep = verify_reach(chain, goal_mask(chain, a.goal), spec, a.run.seed, opt);

    json params = spec_json(spec);
    params["goal"] = a.goal;
    params["pmin"] = opt.pmin;
    params["check_bound"] = opt.check_bound;
    params["max_steps"] = opt.max_steps;
    params["threads"] = opt.threads;
    emit(out, verification_json("check-reach", rep, std::move(params)));
    summarize_verification(err, "reachability", spec, rep);
    return 0;
}

struct LtlArgs {
    ModelFlags model;
    HypFlags hyp;
    RunFlags run;
    std::string hoa;
};

int do_check_ltl(const LtlArgs& a, std::ostream& out, std::ostream& err) {
    const MarkovChain chain = load_model(a.model);
    const RabinAutomaton dra = load_hoa(a.hoa);
    const HypothesisSpec spec = to_spec(a.hyp);
    VerifyOptions opt;
    opt.check_bound = a.run.check_bound;
    opt.max_steps = a.run.max_steps;
    opt.threads = a.run.threads;
    opt.pmin = resolve_pmin(chain, a.run.pmin);
    const auto rep = verify_ltl(chain, dra, spec, a.run.seed, opt);

    json params = spec_json(spec);
    params["hoa"] = a.hoa;
    params["pmin"] = opt.pmin;
    params["check_bound"] = opt.check_bound;
    params["max_steps"] = opt.max_steps;
    params["threads"] = opt.threads;
    emit(out, verification_json("check-ltl", rep, std::move(params)));
    summarize_verification(err, "omega-regular property", spec, rep);
    return 0;
}

struct MpArgs {
    ModelFlags model;
    RunFlags run;
    double alpha = 0.05;
    double mperr = 0.0;
    double delta = 0.01;
    std::uint64_t n_samples = 1000;
};

int do_estimate_mp(const MpArgs& a, std::ostream& out, std::ostream& err) {
    const MarkovChain chain = load_model(a.model);
    MpEstimateOptions opt;
    opt.alpha = a.alpha;
    opt.mperr = a.mperr;
    opt.delta = a.delta;
    opt.n_samples = a.n_samples;
    opt.pmin = resolve_pmin(chain, a.run.pmin);
    opt.check_bound = a.run.check_bound;
    opt.max_steps = a.run.max_steps;
    opt.threads = a.run.threads;
    const MpReport rep = estimate_mp(chain, opt, a.run.seed);

    const json j = {{"schema_version", kSchemaVersion},
                    {"command", "estimate-mp"},
                    {"mean", rep.mean},
                    {"interval", {rep.interval.lo, rep.interval.hi}},
                    {"stat_halfwidth", rep.stat_halfwidth},
                    {"widening", rep.widening},
                    {"n_samples", rep.n_samples},
                    {"mean_path_length", rep.mean_path_length},
                    {"max_path_length", rep.max_path_length},
                    {"mean_bscc_size", rep.mean_bscc_size},
                    {"seed", rep.seed},
                    {"parameters",
                     {{"alpha", opt.alpha},
                      {"mperr", opt.mperr},
                      {"delta", opt.delta},
                      {"pmin", opt.pmin},
                      {"check_bound", opt.check_bound},
                      {"max_steps", opt.max_steps},
                      {"threads", opt.threads}}}};
    emit(out, j);
    err << "mean payoff in [" << rep.interval.lo << ", " << rep.interval.hi << "] at confidence "
        << 1.0 - opt.alpha << " (sample mean " << rep.mean << ", " << rep.n_samples
        << " paths, statistical halfwidth " << rep.stat_halfwidth << " + widening "
        << rep.widening << ")\n";
    return 0;
}

struct ExactArgs {
    ModelFlags model;
    std::string goal = "goal";
    std::string hoa;
    std::string mode;
};

int do_exact(const ExactArgs& a, std::ostream& out, std::ostream& err) {
    const MarkovChain chain = load_model(a.model);
    json j = {{"schema_version", kSchemaVersion}, {"command", "exact"}, {"mode", a.mode}};
    if (a.mode == "reach") {
        const double v = exact_reachability(chain, goal_mask(chain, a.goal));
        j["value"] = v;
        j["goal"] = a.goal;
        err << "P[reach \"" << a.goal << "\"] = " << v << "\n";
    } else if (a.mode == "mp") {
        const double v = exact_mp(chain);
        j["value"] = v;
        err << "expected mean payoff = " << v << "\n";
    } else if (a.mode == "ltl") {
        if (a.hoa.empty()) throw ValidationError("exact ltl requires --hoa");
        const double v = exact_ltl(chain, load_hoa(a.hoa));
        j["value"] = v;
        j["hoa"] = a.hoa;
        err << "P[automaton accepts] = " << v << "\n";
    } else { // bsccs
        const auto components = bsccs(chain);
        std::size_t max_size = 0;
        json sizes = json::array();
        for (const auto& c : components) {
            max_size = std::max(max_size, c.size());
            sizes.push_back(c.size());
        }
        j["n_bsccs"] = components.size();
        j["max_size"] = max_size;
        j["sizes"] = std::move(sizes);
        err << "BSCCs: " << components.size() << ", max size " << max_size << "\n";
    }
    emit(out, j);
    return 0;
}

struct GenArgs {
    std::string family;
    std::string out_prefix;
};

int do_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
    const MarkovChain chain = gen_family(a.family);
    save_chain(a.out_prefix, chain);
    json files = json::array();
    files.push_back(a.out_prefix + ".tra");
    files.push_back(a.out_prefix + ".lab");
    if (chain.has_rewards()) files.push_back(a.out_prefix + ".rew");
    const auto init = chain.initial();
    if (init.size() != 1 || init[0].first != 0) files.push_back(a.out_prefix + ".init");
    const json j = {{"schema_version", kSchemaVersion},
                    {"command", "gen"},
                    {"family", a.family},
                    {"n_states", chain.num_states()},
                    {"n_transitions", chain.num_transitions()},
                    {"pmin", chain.actual_pmin()},
                    {"files", std::move(files)}};
    emit(out, j);
    err << "wrote " << a.family << " (" << chain.num_states() << " states, "
        << chain.num_transitions() << " transitions) to " << a.out_prefix << ".*\n";
    return 0;
}

struct BaselineArgs {
    ModelFlags model;
    std::string goal = "goal";
    double p_term = 0.0;
    double alpha = 0.05;
    std::uint64_t n_samples = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

int do_baseline(const BaselineArgs& a, std::ostream& out, std::ostream& err) {
    const MarkovChain chain = load_model(a.model);
    const auto rep = baseline_estimate(chain, goal_mask(chain, a.goal), a.p_term, a.n_samples,
                                       a.alpha, a.seed, a.threads);
    const json j = {{"schema_version", kSchemaVersion},
                    {"command", "baseline"},
                    {"mean", rep.mean},
                    {"interval", {rep.interval.lo, rep.interval.hi}},
                    {"n_samples", rep.n_samples},
                    {"seed", rep.seed},
                    {"parameters",
                     {{"p_term", a.p_term},
                      {"alpha", a.alpha},
                      {"goal", a.goal},
                      {"threads", a.threads}}}};
    emit(out, j);
    err << "termination-baseline estimate " << rep.mean << " in [" << rep.interval.lo << ", "
        << rep.interval.hi << "]; biased low unless p_term is far below the relevant "
        << "transition probabilities\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"statistical model checker for Markov chains under a transition lower bound"};
    app.require_subcommand(1);

    ReachArgs reach;
    auto* reach_cmd = app.add_subcommand(
        "check-reach", "sequentially test P[reach goal] against a threshold");
    add_model_flags(reach_cmd, reach.model);
    add_hyp_flags(reach_cmd, reach.hyp);
    add_run_flags(reach_cmd, reach.run);
    reach_cmd->add_option("--goal", reach.goal, "goal label (default \"goal\")");

    LtlArgs ltl;
    auto* ltl_cmd = app.add_subcommand(
        "check-ltl", "sequentially test the probability of a Rabin automaton property");
    add_model_flags(ltl_cmd, ltl.model);
    add_hyp_flags(ltl_cmd, ltl.hyp);
    add_run_flags(ltl_cmd, ltl.run);
    ltl_cmd->add_option("--hoa", ltl.hoa, "deterministic Rabin automaton (HOA subset)")
        ->required();

    MpArgs mp;
    auto* mp_cmd =
        app.add_subcommand("estimate-mp", "confidence interval for the expected mean payoff");
    add_model_flags(mp_cmd, mp.model);
    add_run_flags(mp_cmd, mp.run);
    mp_cmd->add_option("--mperr", mp.mperr, "per-path mean-payoff tolerance")->required();
    mp_cmd->add_option("--alpha", mp.alpha, "CI miss probability (default 0.05)");
    mp_cmd->add_option("--delta", mp.delta, "per-path detection/estimation error (default 0.01)");
    mp_cmd->add_option("--n-samples", mp.n_samples, "number of paths (default 1000)");

    ExactArgs exact;
    auto* exact_cmd = app.add_subcommand("exact", "numerical ground truth for desk-scale models");
    exact_cmd->add_option("mode", exact.mode, "reach | mp | ltl | bsccs")
        ->required()
        ->check(CLI::IsMember({"reach", "mp", "ltl", "bsccs"}));
    add_model_flags(exact_cmd, exact.model);
    exact_cmd->add_option("--goal", exact.goal, "goal label for reach (default \"goal\")");
    exact_cmd->add_option("--hoa", exact.hoa, "automaton for ltl");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "write a benchmark family to model files");
    gen_cmd
        ->add_option("family", gen.family,
                     "fig1:m | fig3:n | fig4:N,M | random:n,d,seed | ergodic:n,seed")
        ->required();
    gen_cmd->add_option("--out", gen.out_prefix, "output path prefix")->required();

    BaselineArgs base;
    auto* base_cmd = app.add_subcommand(
        "baseline", "termination-probability estimator, for comparison only");
    add_model_flags(base_cmd, base.model);
    base_cmd->add_option("--goal", base.goal, "goal label (default \"goal\")");
    base_cmd->add_option("--p-term", base.p_term, "per-step termination probability")->required();
    base_cmd->add_option("--alpha", base.alpha, "CI miss probability (default 0.05)");
    base_cmd->add_option("--n-samples", base.n_samples, "number of paths (default 10000)");
    base_cmd->add_option("--seed", base.seed, "master seed");
    base_cmd->add_option("--threads", base.threads, "sampling threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*reach_cmd) return do_check_reach(reach, out, err);
        if (*ltl_cmd) return do_check_ltl(ltl, out, err);
        if (*mp_cmd) return do_estimate_mp(mp, out, err);
        if (*exact_cmd) return do_exact(exact, out, err);
        if (*gen_cmd) return do_gen(gen, out, err);
        return do_baseline(base, out, err);
    } catch (const DivergedError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace smca
