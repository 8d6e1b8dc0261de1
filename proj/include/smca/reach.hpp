#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smca/chain.hpp"
#include "smca/stats.hpp"

namespace smca {

enum class PathVerdict {
    Goal,           // a goal state was appended
    BsccDetected,   // the candidate passed the strong-candidacy threshold
    Diverged,       // hit the hard step cap
};

/// One Bernoulli sample for unbounded reachability, biased down by at most
/// delta: 1 whenever the path reached the goal, 0 when it stopped inside a
/// BSCC candidate instead.
struct ReachSample {
    int bit = 0;
    PathVerdict verdict = PathVerdict::Diverged;
    std::uint64_t path_length = 0;
    std::uint64_t candidate_index = 0;
};

/// Per-path knobs shared by the samplers.
struct SampleOptions {
    double delta;
    double pmin;
    std::uint32_t check_bound = 1000;
    std::uint64_t max_steps = 100'000'000;
};

/// Extends a fresh path state by state. Returns Goal the moment a goal
/// state is appended (before any candidate bookkeeping), BsccDetected once
/// the tracker's candidate is a strong-ceil(k_i)-candidate, Diverged if
/// max_steps states were appended without either.
ReachSample single_path_reach(const MarkovChain& chain, const std::vector<bool>& goal,
                              const SampleOptions& opt, std::uint64_t master_seed,
                              std::uint64_t path_index);

struct VerifyOptions {
    std::uint32_t check_bound = 1000;
    std::uint64_t max_steps = 100'000'000;
    std::uint64_t max_samples = 10'000'000;
    unsigned threads = 1;
    double pmin = 0.0;   // 0: use the chain's declared pmin
};

/// Outcome of a sequential verification together with run diagnostics.
struct VerificationReport {
    std::string decision;   // "H0" or "H1"
    std::uint64_t n_samples = 0;
    double llr = 0.0;
    double mean_path_length = 0.0;
    std::uint64_t max_path_length = 0;
    std::uint64_t positive_samples = 0;
    double sim_bound = 0.0;
    std::uint64_t seed = 0;
};

/// Sequentially samples reachability bits in path-index order and feeds
/// them to the SPRT until it decides. Throws DivergedError if any consumed
/// sample diverged, ValidationError if max_samples is exhausted first.
VerificationReport verify_reach(const MarkovChain& chain, const std::vector<bool>& goal,
                                const HypothesisSpec& spec, std::uint64_t seed,
                                const VerifyOptions& opt = {});

} // namespace smca
