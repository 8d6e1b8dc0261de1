#include "smca/ltl.hpp"

#include <cmath>
#include <string>

#include "smca/candidate.hpp"
#include "smca/errors.hpp"
#include "sprt_driver.hpp"

namespace smca {

std::vector<LabelId> map_propositions(const MarkovChain& chain, const RabinAutomaton& dra) {
    std::vector<LabelId> ap_map;
    ap_map.reserve(dra.num_aps());
    for (const auto& name : dra.ap_names()) {
        const auto id = chain.label_id(name);
        if (!id) {
            std::string labels;
            for (const auto& l : chain.label_names()) labels += (labels.empty() ? "" : ", ") + l;
            throw ValidationError("automaton proposition \"" + name +
                                  "\" matches no chain label (chain has: " +
                                  (labels.empty() ? "<none>" : labels) + ")");
        }
        ap_map.push_back(*id);
    }
    return ap_map;
}

std::vector<std::uint32_t> letters_by_state(const MarkovChain& chain,
                                            const std::vector<LabelId>& ap_map) {
    std::vector<std::uint32_t> letters(chain.num_states(), 0);
    for (StateId s = 0; s < chain.num_states(); ++s)
        for (std::size_t i = 0; i < ap_map.size(); ++i)
            if (chain.has_label(s, ap_map[i])) letters[s] |= 1u << i;
    return letters;
}

bool is_accepting_set(const std::vector<StateId>& product_states, const RabinAutomaton& dra,
                      std::uint32_t n_automaton_states) {
    for (std::uint32_t pair = 0; pair < dra.num_pairs(); ++pair) {
        bool hits_fin = false, hits_inf = false;
        for (const StateId ps : product_states) {
            const std::uint32_t q = ps % n_automaton_states;
            hits_fin = hits_fin || dra.in_fin(q, pair);
            hits_inf = hits_inf || dra.in_inf(q, pair);
        }
        if (!hits_fin && hits_inf) return true;
    }
    return false;
}

LtlSample single_path_ltl(const MarkovChain& chain, const RabinAutomaton& dra,
                          const std::vector<std::uint32_t>& letters, const SampleOptions& opt,
                          std::uint64_t master_seed, std::uint64_t path_index) {
    const std::uint32_t nq = dra.num_states();
    const std::uint64_t n_product = static_cast<std::uint64_t>(chain.num_states()) * nq;
    if (n_product > kNoState)
        throw ValidationError("product has " + std::to_string(n_product) + " states, too many");

    // Product transitions inherit the chain's probabilities, so the chain's
    // pmin is a valid lower bound for the product too.
    CandidateTracker tracker(static_cast<StateId>(n_product),
                             CandidateTracker::Config{opt.check_bound});

    PathState path(master_seed, path_index);
    StateId s = next_state(chain, path);
    std::uint32_t q = dra.step(dra.start(), letters[s]);
    tracker.advance(static_cast<StateId>(static_cast<std::uint64_t>(s) * nq + q));

    LtlSample sample;
    std::uint64_t known_candidate = 0, k_needed = 0; // threshold fixed per candidate
    while (true) {
        if (tracker.has_candidate() && tracker.candidate_index() != known_candidate) {
            known_candidate = tracker.candidate_index();
            k_needed = static_cast<std::uint64_t>(
                std::ceil(k_threshold(known_candidate, opt.delta, opt.pmin)));
        }
        if (tracker.has_candidate() && tracker.is_strong_k_candidate(k_needed)) {
            sample.bit = is_accepting_set(tracker.candidate(), dra, nq) ? 1 : 0;
            sample.verdict = PathVerdict::BsccDetected;
            sample.path_length = path.length;
            sample.candidate_index = tracker.candidate_index();
            return sample;
        }
        if (path.length >= opt.max_steps) break;
        s = next_state(chain, path);
        q = dra.step(q, letters[s]);
        tracker.advance(static_cast<StateId>(static_cast<std::uint64_t>(s) * nq + q));
    }
    sample.path_length = path.length;
    return sample; // verdict stays Diverged
}

VerificationReport verify_ltl(const MarkovChain& chain, const RabinAutomaton& dra,
                              const HypothesisSpec& spec, std::uint64_t master_seed,
                              const VerifyOptions& opt) {
    spec.validate();
    const auto letters = letters_by_state(chain, map_propositions(chain, dra));
    SampleOptions sopt;
    sopt.delta = spec.delta;
    sopt.pmin = opt.pmin > 0 ? opt.pmin : chain.declared_pmin();
    sopt.check_bound = opt.check_bound;
    sopt.max_steps = opt.max_steps;

    return detail::run_sprt(spec, ltl_hypotheses(spec), master_seed, opt,
                            [&](std::uint64_t path_index) {
                                return single_path_ltl(chain, dra, letters, sopt, master_seed,
                                                       path_index);
                            });
}

} // namespace smca
