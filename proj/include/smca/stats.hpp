#pragma once

#include <cstdint>

namespace smca {

/// Query "is P >= p + epsilon or <= p - epsilon?" with error budgets alpha
/// (wrongly accepting the low side) and beta (wrongly accepting the high
/// side). delta is the one-sided bias allowance of the path sampler; it is
/// absorbed into the tested hypotheses, so the overall error stays within
/// alpha respectively beta.
struct HypothesisSpec {
    double p;
    double epsilon;
    double alpha;
    double beta;
    double delta;

    /// Throws ValidationError unless 0 < p - eps, p + eps < 1, 0 < delta < eps,
    /// and alpha, beta in (0, 1).
    void validate() const;
};

/// Simple hypotheses fed to the sequential test: H0 accepts when the sample
/// mean is at or above p0, H1 when it is at or below p1, with p1 < p0.
struct Hypotheses {
    double p0;
    double p1;
};

/// Samples are biased down by at most delta, so the high hypothesis is
/// narrowed by delta while the low one keeps its full margin.
Hypotheses reach_hypotheses(const HypothesisSpec& spec);

/// Two-sided bias of at most delta narrows both hypotheses.
Hypotheses ltl_hypotheses(const HypothesisSpec& spec);

/// Wald's sequential probability ratio test over Bernoulli samples.
/// Accepts H1 once the log-likelihood ratio log(L1/L0) reaches
/// log((1-beta)/alpha), H0 once it falls to log(beta/(1-alpha)).
class SprtSession {
public:
    enum class Decision { Undecided, AcceptH0, AcceptH1 };

    SprtSession(double p0, double p1, double alpha, double beta);

    /// Feeds one Bernoulli observation; no effect once decided.
    void feed(int x);

    Decision decision() const { return decision_; }
    double llr() const { return llr_; }
    std::uint64_t n() const { return n_; }

private:
    double inc1_;   // llr increment for x = 1
    double inc0_;   // llr increment for x = 0
    double accept_h1_at_;
    double accept_h0_at_;
    double llr_ = 0.0;
    std::uint64_t n_ = 0;
    Decision decision_ = Decision::Undecided;
};

/// A-priori estimate of the expected number of samples a verification
/// needs, from the test strength and the narrowed hypothesis gap.
double sim_bound(const HypothesisSpec& spec);

struct Interval {
    double lo;
    double hi;
};

/// Two-sided Hoeffding confidence interval for a [0,1]-valued mean:
/// mean +/- sqrt(ln(2/alpha) / (2n)), clamped to [0, 1].
Interval hoeffding_ci(double mean, std::uint64_t n, double alpha);

} // namespace smca
