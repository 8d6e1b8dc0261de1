#pragma once

#include <cstdint>
#include <vector>

#include "smca/chain.hpp"
#include "smca/rabin.hpp"
#include "smca/stats.hpp"

namespace smca {

/// Bottom strongly connected components of the whole chain: SCCs with no
/// outgoing transition. Each component is sorted ascending; components are
/// ordered by smallest member.
std::vector<std::vector<StateId>> bsccs(const MarkovChain& chain);

/// Probability of ever visiting a goal state, from the initial distribution.
/// Computed by removing probability-0 states graph-theoretically and solving
/// the linear system on the rest: dense LU up to 2000 unknowns, Gauss-Seidel
/// to residual 1e-10 beyond. Accurate to ~1e-9.
double exact_reachability(const MarkovChain& chain, const std::vector<bool>& goal);

/// Expected long-run average reward: sum over BSCCs C of
/// P[reach C] * (mean payoff of C under the true transition probabilities).
double exact_mp(const MarkovChain& chain);

/// Explicit chain x automaton product, restricted to reachable states.
struct Product {
    MarkovChain chain;                        // product dynamics, dense state ids
    std::vector<StateId> chain_state;         // product id -> chain state
    std::vector<std::uint32_t> automaton_state; // product id -> automaton state
};

Product build_product(const MarkovChain& chain, const RabinAutomaton& dra);

/// Probability that a run satisfies the automaton's Rabin condition: the
/// probability of reaching an accepting BSCC of the explicit product.
double exact_ltl(const MarkovChain& chain, const RabinAutomaton& dra);

/// One sample of the termination-based baseline estimator: follow the chain,
/// return 1 on reaching the goal, and stop with probability p_term after
/// every non-goal step, returning 0. Underestimates unbounded reachability
/// unless p_term is far below the chain's smallest relevant probabilities.
int sim_termination_sample(const MarkovChain& chain, const std::vector<bool>& goal,
                           double p_term, std::uint64_t master_seed, std::uint64_t path_index);

struct BaselineReport {
    double mean = 0.0;
    Interval interval;       // Hoeffding, confidence 1 - alpha
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

BaselineReport baseline_estimate(const MarkovChain& chain, const std::vector<bool>& goal,
                                 double p_term, std::uint64_t n_samples, double alpha,
                                 std::uint64_t master_seed, unsigned threads = 1);

} // namespace smca
