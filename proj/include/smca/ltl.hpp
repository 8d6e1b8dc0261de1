#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smca/chain.hpp"
#include "smca/rabin.hpp"
#include "smca/reach.hpp"
#include "smca/stats.hpp"

namespace smca {

/// Maps each automaton proposition to a chain label. Throws ValidationError,
/// listing the chain's labels, if a proposition name matches none of them.
std::vector<LabelId> map_propositions(const MarkovChain& chain, const RabinAutomaton& dra);

/// Letter read by the automaton in chain state s: bit i set iff the state
/// carries the label mapped to proposition i.
std::vector<std::uint32_t> letters_by_state(const MarkovChain& chain,
                                            const std::vector<LabelId>& ap_map);

struct LtlSample {
    int bit = 0; // 1 iff the detected product BSCC is Rabin-accepting
    PathVerdict verdict = PathVerdict::Diverged;
    std::uint64_t path_length = 0;
    std::uint64_t candidate_index = 0;
};

/// True iff some Rabin pair holds on this set of product states: the set
/// avoids Fin(i) entirely and touches Inf(i). States are packed s*nQ+q.
bool is_accepting_set(const std::vector<StateId>& product_states, const RabinAutomaton& dra,
                      std::uint32_t n_automaton_states);

/// Simulates one path of the chain x automaton product until a BSCC of the
/// product is detected with confidence 1-delta, then checks Rabin acceptance.
/// The product is never materialized; the tracker runs on packed pair ids.
/// Verdict is Diverged if no BSCC is detected within opt.max_steps.
LtlSample single_path_ltl(const MarkovChain& chain, const RabinAutomaton& dra,
                          const std::vector<std::uint32_t>& letters, const SampleOptions& opt,
                          std::uint64_t master_seed, std::uint64_t path_index);

/// SPRT over single_path_ltl outcomes, testing P(paths accepted) against
/// spec.p with the two-sided indifference region of width 2*(epsilon-delta).
VerificationReport verify_ltl(const MarkovChain& chain, const RabinAutomaton& dra,
                              const HypothesisSpec& spec, std::uint64_t master_seed,
                              const VerifyOptions& opt = {});

} // namespace smca
