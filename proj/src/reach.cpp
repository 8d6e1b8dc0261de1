#include "smca/reach.hpp"

#include <cmath>

#include "smca/candidate.hpp"
#include "sprt_driver.hpp"

namespace smca {

ReachSample single_path_reach(const MarkovChain& chain, const std::vector<bool>& goal,
                              const SampleOptions& opt, std::uint64_t master_seed,
                              std::uint64_t path_index) {
    PathState path(master_seed, path_index);
    CandidateTracker tracker(chain.num_states(), {.check_bound = opt.check_bound});
    std::uint64_t known_candidate = 0, k_needed = 0; // threshold fixed per candidate
    while (path.length < opt.max_steps) {
        const StateId s = next_state(chain, path);
        if (goal[s]) return {1, PathVerdict::Goal, path.length, tracker.candidate_index()};
        tracker.advance(s);
        if (!tracker.has_candidate()) continue;
        if (tracker.candidate_index() != known_candidate) {
            known_candidate = tracker.candidate_index();
            k_needed = static_cast<std::uint64_t>(
                std::ceil(k_threshold(known_candidate, opt.delta, opt.pmin)));
        }
        if (tracker.is_strong_k_candidate(k_needed))
            return {0, PathVerdict::BsccDetected, path.length, tracker.candidate_index()};
    }
    return {0, PathVerdict::Diverged, path.length, tracker.candidate_index()};
}

VerificationReport verify_reach(const MarkovChain& chain, const std::vector<bool>& goal,
                                const HypothesisSpec& spec, std::uint64_t seed,
                                const VerifyOptions& opt) {
    const Hypotheses hyp = reach_hypotheses(spec);
    const SampleOptions sopt{spec.delta, opt.pmin > 0.0 ? opt.pmin : chain.declared_pmin(),
                             opt.check_bound, opt.max_steps};
    return detail::run_sprt(spec, hyp, seed, opt, [&](std::uint64_t idx) {
        return single_path_reach(chain, goal, sopt, seed, idx);
    });
}

} // namespace smca
