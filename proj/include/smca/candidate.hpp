#pragma once

#include <cstdint>
#include <vector>

#include "smca/chain.hpp"

namespace smca {

/// Occurrence threshold for the i-th candidate on a path: a non-bottom
/// candidate survives k full rounds of observations with probability at
/// most (1 - pmin)^k, and (i - log2(delta)) / (-log2(1 - pmin)) makes that
/// bound delta / 2^i, so the error over all candidates ever detected on a
/// path telescopes to at most delta.
double k_threshold(std::uint64_t candidate_index, double delta, double pmin);

struct TrackerConfig {
    std::uint32_t check_bound = 1000; // steps between full SCC recomputations
};

/// Watches a single sampled path and maintains its current BSCC candidate:
/// the strongly connected component of the traversed-edge graph that
/// contains the last state, provided that component has no traversed edge
/// out of it and has a traversed cycle through every state (a singleton
/// needs a self-loop). If no such component exists the candidate is NONE.
///
/// Besides the candidate set the tracker maintains, per current candidate,
/// its 1-based birthday (the first prefix length at which this set became
/// the candidate) and occurrence counts since the birthday, which feed the
/// strong-k-candidate test and the per-edge counts used by mean-payoff
/// estimation.
///
/// Full SCC recomputation runs every `check_bound` steps while no candidate
/// is present, and immediately on the step that leaves the current
/// candidate. Steps inside the current candidate cannot change it, so they
/// only bump counters. A larger check_bound can only delay candidate
/// detection (lowering the candidate index below the prefix-exact one);
/// counts against the detected candidate's threshold stay exact, so a
/// positive strong-candidacy verdict is never weaker than the per-prefix one.
class CandidateTracker {
public:
    using Config = TrackerConfig;

    explicit CandidateTracker(StateId n_states, Config config = Config());

    void advance(StateId s);

    std::uint64_t steps() const { return static_cast<std::uint64_t>(path_.size()); }
    const std::vector<StateId>& path() const { return path_; }

    bool has_candidate() const { return has_candidate_; }
    /// States of the current candidate, ascending. Empty when NONE.
    const std::vector<StateId>& candidate() const { return cand_states_; }
    /// Number of distinct candidates seen so far (the index i of the
    /// current one). Stays put when the candidate dies.
    std::uint64_t candidate_index() const { return candidate_index_; }
    /// 1-based position at which the current candidate was born.
    std::uint64_t birthday() const { return birthday_; }
    /// 1-based position of the first visit to the current candidate set.
    std::uint64_t first_entry() const { return first_entry_; }

    /// Every candidate state occurs >= k times since the first entry and
    /// the last state >= k+1 times. False when no candidate is present.
    bool is_k_candidate(std::uint64_t k) const;

    /// Every candidate state occurs >= k times since the birthday and the
    /// last state >= k+1 times. False when no candidate is present.
    bool is_strong_k_candidate(std::uint64_t k) const {
        return has_candidate_ && min_count_ >= k && counts_[path_.back()] >= k + 1;
    }

    std::uint64_t count_since_birth(StateId s) const { return counts_[s]; }

    /// Transition counts over the birth segment, |K| x |K| row-major in
    /// the order of candidate().
    const std::vector<std::int64_t>& transition_counts() const { return pair_counts_; }

private:
    void add_edge(StateId from, StateId to);
    void drop_candidate();
    void recompute();
    void adopt_candidate(std::vector<StateId> members);
    std::uint64_t find_birthday(std::uint64_t first_entry) const;
    bool segment_connects_candidate(std::uint64_t begin, std::uint64_t end) const;
    void bump_count(StateId s);

    std::uint32_t check_bound_;
    std::vector<StateId> path_;
    std::vector<std::uint8_t> visited_;
    std::vector<std::uint32_t> visited_list_;
    std::vector<std::vector<StateId>> adj_;    // deduplicated traversed edges

    bool has_candidate_ = false;
    std::vector<StateId> cand_states_;
    std::vector<std::uint8_t> in_cand_;
    std::vector<std::int32_t> local_;          // state -> index in cand_states_, -1 outside
    std::vector<std::uint64_t> counts_;        // occurrences since birthday, by state
    std::vector<std::int64_t> pair_counts_;
    std::uint64_t min_count_ = 0;              // min of counts_ over the candidate
    std::uint64_t n_at_min_ = 0;
    std::uint64_t candidate_index_ = 0;
    std::uint64_t birthday_ = 0;
    std::uint64_t first_entry_ = 0;
};

/// True iff a candidate is present and it is a strong-k-candidate for
/// k = ceil(k_threshold(candidate_index, delta, pmin)): the path has then
/// seen a full exit-free round of length k from every candidate state, so
/// a non-BSCC explains the observation with probability at most delta/2^i.
bool reached_bscc(const CandidateTracker& tracker, double delta, double pmin);

} // namespace smca
