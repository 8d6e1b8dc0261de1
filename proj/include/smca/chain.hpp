#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smca/rng.hpp"

namespace smca {

using StateId = std::uint32_t;
using LabelId = std::uint16_t;

inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();

struct Transition {
    StateId target;
    double prob;
};

/// Finite discrete-time Markov chain with state labels, optional state
/// rewards in [0, 1], an initial distribution, and a declared lower bound
/// on its positive transition probabilities.
///
/// Construction validates everything once (row sums within 1e-6 of 1,
/// indices in range, positive probabilities, no duplicate edges) and
/// renormalizes rows, so later code can rely on the invariants without
/// re-checking. Successor sampling uses precomputed cumulative rows with
/// the last entry pinned to exactly 1.0, so any uniform draw in [0, 1)
/// maps to a valid transition.
class MarkovChain {
public:
    struct Data {
        StateId n_states = 0;
        std::vector<std::vector<Transition>> rows;
        std::vector<std::pair<StateId, double>> initial;      // empty: all mass on state 0
        std::vector<std::string> label_names;
        std::vector<std::vector<LabelId>> state_labels;       // may be shorter than n_states
        std::vector<double> rewards;                          // empty: all zero
        double declared_pmin = 0.0;                           // 0: use actual_pmin
    };

    explicit MarkovChain(Data data);

    StateId num_states() const { return n_states_; }
    std::uint64_t num_transitions() const { return targets_.size(); }

    std::span<const StateId> row_targets(StateId s) const {
        return {targets_.data() + row_off_[s], targets_.data() + row_off_[s + 1]};
    }
    std::span<const double> row_probs(StateId s) const {
        return {probs_.data() + row_off_[s], probs_.data() + row_off_[s + 1]};
    }
    /// Probability of the edge s -> t, 0 if absent.
    double prob(StateId s, StateId t) const;

    std::span<const std::pair<StateId, double>> initial() const { return initial_; }

    const std::vector<std::string>& label_names() const { return label_names_; }
    std::span<const LabelId> labels_of(StateId s) const { return state_labels_[s]; }
    bool has_label(StateId s, LabelId label) const;
    std::optional<LabelId> label_id(std::string_view name) const;
    /// Goal mask for a named label; empty optional if the label is unknown.
    std::optional<std::vector<bool>> label_mask(std::string_view name) const;

    double reward(StateId s) const { return rewards_[s]; }
    const std::vector<double>& rewards() const { return rewards_; }
    bool has_rewards() const { return has_rewards_; }

    /// Smallest positive transition probability in the chain.
    double actual_pmin() const { return actual_pmin_; }
    double declared_pmin() const { return declared_pmin_; }

    StateId sample_initial(RngStream& rng) const;
    StateId sample_successor(StateId s, RngStream& rng) const;

private:
    StateId n_states_ = 0;
    std::vector<std::uint64_t> row_off_;       // n_states + 1
    std::vector<StateId> targets_;             // flattened rows, targets ascending per row
    std::vector<double> probs_;
    std::vector<double> cum_;                  // per-row cumulative sums, last pinned to 1.0
    std::vector<std::pair<StateId, double>> initial_;
    std::vector<double> initial_cum_;
    std::vector<std::string> label_names_;
    std::vector<std::vector<LabelId>> state_labels_;
    std::vector<double> rewards_;
    bool has_rewards_ = false;
    double actual_pmin_ = 1.0;
    double declared_pmin_ = 0.0;
};

/// Lazily extended sampled path: the current state, the number of states
/// appended so far, and the path's private random stream.
struct PathState {
    RngStream rng;
    StateId current = kNoState;
    std::uint64_t length = 0;

    PathState(std::uint64_t master_seed, std::uint64_t path_index) : rng(master_seed, path_index) {}
};

/// Appends one state (the initial state on the first call, a successor of
/// the current state afterwards) and returns it.
StateId next_state(const MarkovChain& chain, PathState& path);

// Synthetic families used throughout the tests and the experiments.

/// Coin flip into either a goal branch (r, then a v-chain ending in a
/// self-loop) or a two-state trap {t, u} that exits each state with
/// probability 0.99 and self-loops with 0.01. Goal label sits on r.
/// States: s, r, v_1..v_m, t, u. Reachability of the goal is exactly 0.5.
MarkovChain gen_fig1(std::uint32_t m);

/// Ladder s_0..s_n: each s_i (i < n) advances with probability 0.5 and
/// falls back to s_0 with 0.5; s_n is absorbing and carries the goal label.
MarkovChain gen_fig3(std::uint32_t n);

/// Coin flip into one of two arms of N self-looping states (advance 0.5,
/// stay 0.5), each arm ending in a deterministic cycle of M states. The
/// second arm's cycle carries the goal label and reward 1. 2N + 2M + 1 states.
MarkovChain gen_fig4(std::uint32_t n_arm, std::uint32_t m_cycle);

/// Reproducible random chain: per-state out-degree uniform in
/// [1, max_out_degree], distinct random targets, dyadic probabilities
/// (multiples of 1/1024) that sum to exactly 1 per row and stay at or above
/// 1/(2 * out_degree). State n-1 carries the goal label.
MarkovChain gen_random(StateId n_states, StateId max_out_degree, std::uint64_t seed);

/// Reproducible random irreducible aperiodic chain: every row has full
/// support with dyadic entries at or above floor(0.9 * 1024 / n) / 1024.
/// Rewards are random dyadic values in [0, 1].
MarkovChain gen_random_ergodic(StateId n_states, std::uint64_t seed);

} // namespace smca
