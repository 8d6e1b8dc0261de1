#include "smca/meanpayoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "smca/errors.hpp"
#include "smca/parallel.hpp"

namespace smca {

double trerr_from_mperr(double mperr, double pmin, std::size_t k_size) {
    if (!(mperr > 0)) throw ValidationError("mean-payoff tolerance must be positive");
    if (!(pmin > 0) || pmin > 1) throw ValidationError("pmin must be in (0,1]");
    if (k_size == 0) throw ValidationError("candidate size must be at least 1");
    return pmin * (std::pow(1.0 + mperr, 1.0 / (2.0 * static_cast<double>(k_size))) - 1.0);
}

double k_from_trerr(std::size_t k_size, double delta, double trerr) {
    if (!(trerr > 0)) throw ValidationError("transition tolerance must be positive");
    if (!(delta > 0) || delta > 1) throw ValidationError("delta must be in (0,1]");
    if (k_size == 0) throw ValidationError("candidate size must be at least 1");
    const double k = static_cast<double>(k_size);
    return (std::log(2.0 * k * k) - std::log(delta / 2.0)) / (2.0 * trerr * trerr);
}

std::vector<double> estimate_transitions(std::span<const std::int64_t> pair_counts,
                                         std::size_t k_size) {
    if (pair_counts.size() != k_size * k_size)
        throw ValidationError("pair-count matrix size mismatch");
    std::vector<double> matrix(k_size * k_size, 0.0);
    for (std::size_t s = 0; s < k_size; ++s) {
        std::int64_t out = 0;
        for (std::size_t t = 0; t < k_size; ++t) out += pair_counts[s * k_size + t];
        if (out <= 0)
            throw ValidationError("candidate state " + std::to_string(s) +
                                  " has no outgoing observation");
        // Divide through, then recompute the largest entry from the others so
        // the row sums to exactly 1.0 despite rounding.
        std::size_t largest = 0;
        for (std::size_t t = 0; t < k_size; ++t) {
            matrix[s * k_size + t] =
                static_cast<double>(pair_counts[s * k_size + t]) / static_cast<double>(out);
            if (pair_counts[s * k_size + t] > pair_counts[s * k_size + largest]) largest = t;
        }
        double rest = 0.0;
        for (std::size_t t = 0; t < k_size; ++t)
            if (t != largest) rest += matrix[s * k_size + t];
        matrix[s * k_size + largest] = 1.0 - rest;
    }
    return matrix;
}

double mp_of_bscc(std::span<const double> matrix, std::span<const double> rewards) {
    const std::size_t k = rewards.size();
    if (matrix.size() != k * k) throw ValidationError("matrix/reward size mismatch");
    if (k == 0) throw ValidationError("empty component");
    if (k == 1) return rewards[0];

    // Stationary equations pi*(P - I) = 0 with the last one replaced by the
    // normalization sum(pi) = 1.
    Eigen::MatrixXd a(k, k);
    for (std::size_t row = 0; row < k; ++row)
        for (std::size_t col = 0; col < k; ++col)
            a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                row + 1 == k ? 1.0
                             : matrix[col * k + row] - (row == col ? 1.0 : 0.0);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    b(static_cast<Eigen::Index>(k - 1)) = 1.0;

    const Eigen::VectorXd pi = a.partialPivLu().solve(b);
    if (!pi.allFinite() || (a * pi - b).cwiseAbs().maxCoeff() > 1e-8)
        throw SingularSystem("stationary distribution solve degenerated");

    double mp = 0.0;
    for (std::size_t s = 0; s < k; ++s) mp += pi(static_cast<Eigen::Index>(s)) * rewards[s];
    return mp;
}

MpSample single_path_mp(const MarkovChain& chain, const MpSampleOptions& opt,
                        std::uint64_t master_seed, std::uint64_t path_index) {
    if (!chain.has_rewards()) throw ValidationError("chain has no rewards attached");
    if (!(opt.pmin > 0) || opt.pmin > 1) throw ValidationError("pmin must be in (0,1]");
    const double half_delta = opt.delta / 2.0;

    CandidateTracker tracker(chain.num_states(), CandidateTracker::Config{opt.check_bound});
    PathState path(master_seed, path_index);

    MpSample sample;
    std::uint64_t known_candidate = 0; // candidate_index the cached k belongs to
    std::uint64_t k_needed = 0;

    while (path.length < opt.max_steps) {
        tracker.advance(next_state(chain, path));
        if (!tracker.has_candidate()) continue;
        if (tracker.candidate_index() != known_candidate) {
            // Both termination thresholds are fixed per candidate; fold them
            // into one count so the per-step test is two comparisons.
            known_candidate = tracker.candidate_index();
            const std::size_t k_size = tracker.candidate().size();
            const double trerr = trerr_from_mperr(opt.mperr, opt.pmin, k_size);
            k_needed = std::max(
                static_cast<std::uint64_t>(std::ceil(k_from_trerr(k_size, opt.delta, trerr))),
                static_cast<std::uint64_t>(
                    std::ceil(k_threshold(known_candidate, half_delta, opt.pmin))));
        }
        if (!tracker.is_strong_k_candidate(k_needed)) continue;

        const auto& members = tracker.candidate();
        std::vector<double> rewards(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) rewards[i] = chain.reward(members[i]);
        const auto matrix = estimate_transitions(tracker.transition_counts(), members.size());

        sample.value = std::clamp(mp_of_bscc(matrix, rewards), 0.0, 1.0);
        sample.verdict = PathVerdict::BsccDetected;
        sample.path_length = path.length;
        sample.bscc_size = static_cast<std::uint32_t>(members.size());
        sample.candidate_index = tracker.candidate_index();
        return sample;
    }
    sample.path_length = path.length;
    return sample; // verdict stays Diverged
}

MpReport estimate_mp(const MarkovChain& chain, const MpEstimateOptions& opt,
                     std::uint64_t master_seed) {
    if (!(opt.alpha > 0) || opt.alpha >= 1) throw ValidationError("alpha must be in (0,1)");
    if (!(opt.delta > 0) || opt.delta >= 1) throw ValidationError("delta must be in (0,1)");
    if (opt.n_samples == 0) throw ValidationError("need at least one sample");

    MpSampleOptions sopt;
    sopt.mperr = opt.mperr;
    sopt.delta = opt.delta;
    sopt.pmin = opt.pmin > 0 ? opt.pmin : chain.declared_pmin();
    sopt.check_bound = opt.check_bound;
    sopt.max_steps = opt.max_steps;
    trerr_from_mperr(opt.mperr, sopt.pmin, 1); // validate mperr/pmin up front

    double sum = 0.0;
    std::uint64_t total_len = 0, max_len = 0, total_size = 0;
    sample_ordered(
        opt.threads,
        [&](std::uint64_t idx) { return single_path_mp(chain, sopt, master_seed, idx); },
        [&](std::uint64_t idx, const MpSample& s) {
            if (s.verdict == PathVerdict::Diverged) throw DivergedError(idx, sopt.max_steps);
            sum += s.value;
            total_len += s.path_length;
            max_len = std::max(max_len, s.path_length);
            total_size += s.bscc_size;
            return idx + 1 < opt.n_samples;
        });

    const double n = static_cast<double>(opt.n_samples);
    MpReport rep;
    rep.mean = sum / n;
    rep.n_samples = opt.n_samples;
    const Interval stat = hoeffding_ci(rep.mean, opt.n_samples, opt.alpha);
    rep.stat_halfwidth = std::sqrt(std::log(2.0 / opt.alpha) / (2.0 * n));
    rep.widening = opt.mperr + opt.delta;
    rep.interval.lo = std::clamp(stat.lo - rep.widening, 0.0, 1.0);
    rep.interval.hi = std::clamp(stat.hi + rep.widening, 0.0, 1.0);
    rep.mean_path_length = static_cast<double>(total_len) / n;
    rep.max_path_length = max_len;
    rep.mean_bscc_size = static_cast<double>(total_size) / n;
    rep.seed = master_seed;
    return rep;
}

} // namespace smca
