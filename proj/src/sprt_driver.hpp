#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "smca/errors.hpp"
#include "smca/parallel.hpp"
#include "smca/reach.hpp"
#include "smca/stats.hpp"

namespace smca::detail {

// Shared by the reach and LTL drivers: pump per-path bits into the SPRT in
// path-index order until it decides.
template <typename SampleFn>
VerificationReport run_sprt(const HypothesisSpec& spec, const Hypotheses& hyp,
                            std::uint64_t seed, const VerifyOptions& opt, SampleFn&& sample) {
    SprtSession sprt(hyp.p0, hyp.p1, spec.alpha, spec.beta);
    std::uint64_t total_len = 0, max_len = 0, positives = 0;

    sample_ordered(opt.threads, std::forward<SampleFn>(sample),
                   [&](std::uint64_t idx, auto&& s) {
                       if (s.verdict == PathVerdict::Diverged)
                           throw DivergedError(idx, opt.max_steps);
                       total_len += s.path_length;
                       max_len = std::max(max_len, s.path_length);
                       positives += static_cast<std::uint64_t>(s.bit);
                       sprt.feed(s.bit);
                       if (sprt.decision() != SprtSession::Decision::Undecided) return false;
                       if (idx + 1 >= opt.max_samples)
                           throw ValidationError("no decision after " +
                                                 std::to_string(opt.max_samples) + " samples");
                       return true;
                   });

    VerificationReport rep;
    rep.decision = sprt.decision() == SprtSession::Decision::AcceptH0 ? "H0" : "H1";
    rep.n_samples = sprt.n();
    rep.llr = sprt.llr();
    rep.mean_path_length = static_cast<double>(total_len) / static_cast<double>(sprt.n());
    rep.max_path_length = max_len;
    rep.positive_samples = positives;
    rep.sim_bound = sim_bound(spec);
    rep.seed = seed;
    return rep;
}

} // namespace smca::detail
