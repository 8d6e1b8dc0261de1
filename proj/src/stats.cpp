#include "smca/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smca/errors.hpp"

namespace smca {

void HypothesisSpec::validate() const {
    const auto check = [](bool ok, const std::string& what) {
        if (!ok) throw ValidationError(what);
    };
    check(std::isfinite(p) && std::isfinite(epsilon) && std::isfinite(alpha) &&
              std::isfinite(beta) && std::isfinite(delta),
          "hypothesis parameters must be finite");
    check(epsilon > 0.0, "epsilon must be positive");
    check(p - epsilon > 0.0 && p + epsilon < 1.0,
          "p +/- epsilon must stay inside (0, 1), got p = " + std::to_string(p) +
              ", epsilon = " + std::to_string(epsilon));
    check(delta > 0.0 && delta < epsilon,
          "delta must be in (0, epsilon), got delta = " + std::to_string(delta) +
              ", epsilon = " + std::to_string(epsilon));
    check(alpha > 0.0 && alpha < 1.0, "alpha must be in (0, 1)");
    check(beta > 0.0 && beta < 1.0, "beta must be in (0, 1)");
}

Hypotheses reach_hypotheses(const HypothesisSpec& spec) {
    spec.validate();
    return {spec.p + (spec.epsilon - spec.delta), spec.p - spec.epsilon};
}

Hypotheses ltl_hypotheses(const HypothesisSpec& spec) {
    spec.validate();
    return {spec.p + (spec.epsilon - spec.delta), spec.p - (spec.epsilon - spec.delta)};
}

SprtSession::SprtSession(double p0, double p1, double alpha, double beta) {
    if (!(p0 > 0.0) || !(p0 < 1.0) || !(p1 > 0.0) || !(p1 < 1.0))
        throw ValidationError("SPRT hypotheses must lie in (0, 1)");
    if (!(p1 < p0)) throw ValidationError("SPRT needs p1 < p0");
    if (!(alpha > 0.0) || !(alpha < 1.0) || !(beta > 0.0) || !(beta < 1.0))
        throw ValidationError("SPRT strength parameters must lie in (0, 1)");
    inc1_ = std::log(p1 / p0);
    inc0_ = std::log((1.0 - p1) / (1.0 - p0));
    accept_h1_at_ = std::log((1.0 - beta) / alpha);
    accept_h0_at_ = std::log(beta / (1.0 - alpha));
}

void SprtSession::feed(int x) {
    if (decision_ != Decision::Undecided) return;
    llr_ += x ? inc1_ : inc0_;
    ++n_;
    if (llr_ >= accept_h1_at_)
        decision_ = Decision::AcceptH1;
    else if (llr_ <= accept_h0_at_)
        decision_ = Decision::AcceptH0;
}

double sim_bound(const HypothesisSpec& spec) {
    spec.validate();
    const double p = spec.p, eps = spec.epsilon, d = spec.delta;
    const double num =
        -std::log(spec.beta / (1.0 - spec.alpha)) * std::log((1.0 - spec.beta) / spec.alpha);
    const double den = std::log((p - eps + d) / (p + eps - d)) *
                       std::log((1.0 - p - eps + d) / (1.0 - p + eps - d));
    // Both denominator logs are negative for a valid spec, so the quotient
    // is already positive; the absolute value just pins that down.
    return std::abs(num / den);
}

Interval hoeffding_ci(double mean, std::uint64_t n, double alpha) {
    if (n == 0) throw ValidationError("confidence interval needs at least one sample");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ValidationError("alpha must be in (0, 1)");
    const double halfwidth = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
    return {std::max(0.0, mean - halfwidth), std::min(1.0, mean + halfwidth)};
}

} // namespace smca
