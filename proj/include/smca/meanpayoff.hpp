#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smca/candidate.hpp"
#include "smca/chain.hpp"
#include "smca/reach.hpp"
#include "smca/stats.hpp"

namespace smca {

/// Transition-probability tolerance that keeps the mean-payoff perturbation
/// below mperr on a candidate of k_size states:
///   trerr = pmin * ((1 + mperr)^(1/(2*k_size)) - 1).
double trerr_from_mperr(double mperr, double pmin, std::size_t k_size);

/// Occurrence count per candidate state so that all k_size^2 transition
/// estimates are within trerr with probability 1 - delta/2 (Hoeffding plus
/// union bound):
///   k = (ln(2*k_size^2) - ln(delta/2)) / (2*trerr^2).
double k_from_trerr(std::size_t k_size, double delta, double trerr);

/// Maximum-likelihood transition estimates from consecutive-pair counts over
/// a path segment. pair_counts is row-major k_size x k_size; the estimate for
/// row s divides by s's total outgoing observations. Rows sum to exactly 1.0:
/// the counts are integers, and the largest entry of each row is rebalanced to
/// absorb the rounding of the others.
/// Throws ValidationError if some state has no outgoing observation.
std::vector<double> estimate_transitions(std::span<const std::int64_t> pair_counts,
                                         std::size_t k_size);

/// Mean payoff of the BSCC described by a row-stochastic matrix (row-major
/// k x k) and per-state rewards: solves the stationary equations pi*P = pi,
/// sum(pi) = 1 by LU decomposition and returns sum(pi[s] * rewards[s]).
/// Throws SingularSystem if the solve degenerates, which cannot happen for
/// an irreducible stochastic matrix.
double mp_of_bscc(std::span<const double> matrix, std::span<const double> rewards);

struct MpSample {
    double value = 0.0; // estimated mean payoff of the path's BSCC, in [0,1]
    PathVerdict verdict = PathVerdict::Diverged;
    std::uint64_t path_length = 0;
    std::uint32_t bscc_size = 0;
    std::uint64_t candidate_index = 0;
};

struct MpSampleOptions {
    double mperr = 0.0;  // absolute mean-payoff tolerance per sample
    double delta = 0.0;  // per-sample failure probability, split half/half
                         // between BSCC detection and transition estimation
    double pmin = 0.0;
    std::uint32_t check_bound = 1000;
    std::uint64_t max_steps = 100'000'000;
};

/// Extends one path until a BSCC is detected with confidence 1 - delta/2 and
/// every candidate state has been seen at least ceil(k) times since the
/// candidate's birthday, with k sized so the transition estimates are within
/// trerr with probability 1 - delta/2. Then estimates the transition matrix
/// from the birthday segment and returns its mean payoff, so that
/// P[|value - MP| > mperr] <= delta. Rewards must be attached to the chain.
MpSample single_path_mp(const MarkovChain& chain, const MpSampleOptions& opt,
                        std::uint64_t master_seed, std::uint64_t path_index);

struct MpEstimateOptions {
    double alpha = 0.05;  // CI miss probability
    double mperr = 0.0;
    double delta = 0.0;
    std::uint64_t n_samples = 0;
    double pmin = 0.0; // 0: use the chain's declared bound
    std::uint32_t check_bound = 1000;
    std::uint64_t max_steps = 100'000'000;
    unsigned threads = 1;
};

struct MpReport {
    double mean = 0.0;          // sample mean of the per-path estimates
    Interval interval;          // Hoeffding CI widened by mperr + delta, clamped to [0,1]
    double stat_halfwidth = 0.0;
    double widening = 0.0;      // mperr + delta
    std::uint64_t n_samples = 0;
    double mean_path_length = 0.0;
    std::uint64_t max_path_length = 0;
    double mean_bscc_size = 0.0;
    std::uint64_t seed = 0;
};

/// Collects n per-path mean-payoff samples and reports a confidence interval
/// for the chain's expected mean payoff: a (1 - alpha) Hoeffding interval on
/// the sample values, widened on both sides by mperr + delta to absorb the
/// per-sample bias bound.
MpReport estimate_mp(const MarkovChain& chain, const MpEstimateOptions& opt,
                     std::uint64_t master_seed);

} // namespace smca
