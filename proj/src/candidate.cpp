#include "smca/candidate.hpp"

#include <algorithm>
#include <cmath>

#include "smca/errors.hpp"
#include "scc.hpp"

namespace smca {

double k_threshold(std::uint64_t candidate_index, double delta, double pmin) {
    if (candidate_index == 0) throw ValidationError("candidate index starts at 1");
    if (!(delta > 0.0) || !(delta < 1.0)) throw ValidationError("delta must be in (0, 1)");
    if (!(pmin > 0.0) || !(pmin < 1.0)) throw ValidationError("pmin must be in (0, 1)");
    return (static_cast<double>(candidate_index) - std::log2(delta)) / -std::log2(1.0 - pmin);
}

bool reached_bscc(const CandidateTracker& tracker, double delta, double pmin) {
    if (!tracker.has_candidate()) return false;
    const double k = k_threshold(tracker.candidate_index(), delta, pmin);
    return tracker.is_strong_k_candidate(static_cast<std::uint64_t>(std::ceil(k)));
}

CandidateTracker::CandidateTracker(StateId n_states, Config config)
    : check_bound_(config.check_bound) {
    if (check_bound_ == 0) throw ValidationError("check bound must be >= 1");
    visited_.assign(n_states, 0);
    adj_.resize(n_states);
    in_cand_.assign(n_states, 0);
    local_.assign(n_states, -1);
    counts_.assign(n_states, 0);
}

void CandidateTracker::advance(StateId s) {
    const StateId prev = path_.empty() ? kNoState : path_.back();
    path_.push_back(s);

    if (has_candidate_) {
        if (in_cand_[s]) {
            // Steps inside the candidate cannot merge it with anything or
            // open an exit, so the set is unchanged; only counts move.
            bump_count(s);
            pair_counts_[static_cast<std::size_t>(local_[prev]) * cand_states_.size() +
                         static_cast<std::size_t>(local_[s])]++;
            return;
        }
        // The edge prev -> s leaves the candidate, which kills it; recompute
        // immediately instead of waiting for the periodic check.
        drop_candidate();
        if (!visited_[s]) {
            visited_[s] = 1;
            visited_list_.push_back(s);
        }
        add_edge(prev, s);
        recompute();
        return;
    }

    if (!visited_[s]) {
        visited_[s] = 1;
        visited_list_.push_back(s);
    }
    if (prev != kNoState) add_edge(prev, s);
    if (path_.size() % check_bound_ == 0) recompute();
}

void CandidateTracker::add_edge(StateId from, StateId to) {
    auto& succ = adj_[from];
    if (std::find(succ.begin(), succ.end(), to) == succ.end()) succ.push_back(to);
}

void CandidateTracker::drop_candidate() {
    has_candidate_ = false;
    for (StateId s : cand_states_) {
        counts_[s] = 0;
        local_[s] = -1;
        in_cand_[s] = 0;
    }
    cand_states_.clear();
    pair_counts_.clear();
    min_count_ = 0;
    n_at_min_ = 0;
}

void CandidateTracker::recompute() {
    const StateId last = path_.back();
    const auto scc = detail::tarjan_scc(
        static_cast<StateId>(visited_.size()), visited_list_,
        [&](StateId v, std::vector<StateId>& out) {
            out.insert(out.end(), adj_[v].begin(), adj_[v].end());
        });
    const std::int32_t comp = scc.component[last];
    std::vector<StateId> members;
    for (StateId v : visited_list_)
        if (scc.component[v] == comp) members.push_back(v);

    // Candidate requires a bottom component with a cycle through every
    // state; for a singleton that means a traversed self-loop.
    if (members.size() == 1) {
        const auto& succ = adj_[members[0]];
        if (std::find(succ.begin(), succ.end(), members[0]) == succ.end()) return;
    }
    for (StateId v : members)
        for (StateId w : adj_[v])
            if (scc.component[w] != comp) return;

    adopt_candidate(std::move(members));
}

void CandidateTracker::adopt_candidate(std::vector<StateId> members) {
    // A dropped candidate can never come back: dropping it recorded an edge
    // out of the set, which the bottom check above would reject. So this
    // component is always a fresh candidate.
    std::sort(members.begin(), members.end());
    cand_states_ = std::move(members);
    has_candidate_ = true;
    ++candidate_index_;
    const auto k = cand_states_.size();
    for (std::size_t i = 0; i < k; ++i) {
        in_cand_[cand_states_[i]] = 1;
        local_[cand_states_[i]] = static_cast<std::int32_t>(i);
    }

    // First entry: the path can never have left this set after touching it,
    // so the maximal all-inside suffix starts at the first visit.
    std::uint64_t e = path_.size();
    while (e > 1 && in_cand_[path_[e - 2]]) --e;
    first_entry_ = e;
    birthday_ = find_birthday(e);

    for (StateId s : cand_states_) counts_[s] = 0;
    pair_counts_.assign(k * k, 0);
    for (std::uint64_t pos = birthday_; pos <= path_.size(); ++pos) {
        counts_[path_[pos - 1]]++;
        if (pos > birthday_)
            pair_counts_[static_cast<std::size_t>(local_[path_[pos - 2]]) * k +
                         static_cast<std::size_t>(local_[path_[pos - 1]])]++;
    }
    min_count_ = counts_[cand_states_[0]];
    for (StateId s : cand_states_) min_count_ = std::min(min_count_, counts_[s]);
    n_at_min_ = 0;
    for (StateId s : cand_states_)
        if (counts_[s] == min_count_) ++n_at_min_;
}

// Smallest prefix length at which this set was the candidate: the first
// position where the edges traversed since the first entry strongly connect
// the whole set. Strong connectivity only grows with more edges, so the
// position can be found by bisection over the segment.
std::uint64_t CandidateTracker::find_birthday(std::uint64_t first_entry) const {
    std::uint64_t lo = first_entry, hi = path_.size();
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (segment_connects_candidate(first_entry, mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

bool CandidateTracker::segment_connects_candidate(std::uint64_t begin, std::uint64_t end) const {
    const std::size_t k = cand_states_.size();
    // Singleton: every step inside the segment is the self-loop, so the set
    // is born at the second occurrence.
    if (k == 1) return end > begin;

    std::vector<std::uint8_t> edge(k * k, 0);
    std::vector<std::vector<std::uint32_t>> fwd(k), bwd(k);
    for (std::uint64_t pos = begin + 1; pos <= end; ++pos) {
        const auto a = static_cast<std::uint32_t>(local_[path_[pos - 2]]);
        const auto b = static_cast<std::uint32_t>(local_[path_[pos - 1]]);
        if (!edge[a * k + b]) {
            edge[a * k + b] = 1;
            fwd[a].push_back(b);
            bwd[b].push_back(a);
        }
    }
    // Strongly connected iff everything is forward- and backward-reachable
    // from one vertex.
    const auto covers = [&](const std::vector<std::vector<std::uint32_t>>& g) {
        std::vector<std::uint8_t> seen(k, 0);
        std::vector<std::uint32_t> work{0};
        seen[0] = 1;
        std::size_t found = 1;
        while (!work.empty()) {
            const auto v = work.back();
            work.pop_back();
            for (auto w : g[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++found;
                    work.push_back(w);
                }
        }
        return found == k;
    };
    return covers(fwd) && covers(bwd);
}

void CandidateTracker::bump_count(StateId s) {
    const std::uint64_t before = counts_[s]++;
    if (before == min_count_) {
        if (--n_at_min_ == 0) {
            ++min_count_;
            for (StateId t : cand_states_)
                if (counts_[t] == min_count_) ++n_at_min_;
        }
    }
}

bool CandidateTracker::is_k_candidate(std::uint64_t k) const {
    if (!has_candidate_) return false;
    std::vector<std::uint64_t> occ(cand_states_.size(), 0);
    for (std::uint64_t pos = first_entry_; pos <= path_.size(); ++pos)
        occ[static_cast<std::size_t>(local_[path_[pos - 1]])]++;
    for (std::uint64_t c : occ)
        if (c < k) return false;
    return occ[static_cast<std::size_t>(local_[path_.back()])] >= k + 1;
}

} // namespace smca
