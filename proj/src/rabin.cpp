#include "smca/rabin.hpp"

#include <utility>

#include "smca/errors.hpp"

namespace smca {

LabelExpr LabelExpr::atom(std::uint32_t ap_index) {
    LabelExpr e;
    e.kind = Kind::Ap;
    e.ap = ap_index;
    return e;
}

LabelExpr LabelExpr::negate(LabelExpr operand) {
    LabelExpr e;
    e.kind = Kind::Not;
    e.lhs = std::make_unique<LabelExpr>(std::move(operand));
    return e;
}

LabelExpr LabelExpr::combine(Kind op, LabelExpr a, LabelExpr b) {
    LabelExpr e;
    e.kind = op;
    e.lhs = std::make_unique<LabelExpr>(std::move(a));
    e.rhs = std::make_unique<LabelExpr>(std::move(b));
    return e;
}

bool eval_label_expr(const LabelExpr& expr, std::uint32_t letter) {
    switch (expr.kind) {
        case LabelExpr::Kind::True: return true;
        case LabelExpr::Kind::False: return false;
        case LabelExpr::Kind::Ap: return (letter >> expr.ap) & 1u;
        case LabelExpr::Kind::Not: return !eval_label_expr(*expr.lhs, letter);
        case LabelExpr::Kind::And:
            return eval_label_expr(*expr.lhs, letter) && eval_label_expr(*expr.rhs, letter);
        case LabelExpr::Kind::Or:
            return eval_label_expr(*expr.lhs, letter) || eval_label_expr(*expr.rhs, letter);
    }
    return false;
}

RabinAutomaton::RabinAutomaton(Data data) {
    if (data.n_states == 0) throw ValidationError("automaton must have at least one state");
    if (data.ap_names.size() > kMaxAps)
        throw ValidationError("automaton uses " + std::to_string(data.ap_names.size()) +
                              " propositions, supported maximum is " + std::to_string(kMaxAps));
    if (data.start >= data.n_states)
        throw ValidationError("automaton start state out of range");
    if (data.n_pairs == 0 || data.n_pairs > 16)
        throw ValidationError("automaton needs between 1 and 16 acceptance pairs");
    if (data.state_sets.size() != data.n_states || data.edges.size() != data.n_states)
        throw ValidationError("automaton state data incomplete");

    n_states_ = data.n_states;
    start_ = data.start;
    n_pairs_ = data.n_pairs;
    ap_names_ = std::move(data.ap_names);
    n_letters_ = 1u << ap_names_.size();
    state_sets_ = std::move(data.state_sets);
    for (std::uint32_t q = 0; q < n_states_; ++q)
        if (state_sets_[q] >> (2 * n_pairs_))
            throw ValidationError("state " + std::to_string(q) +
                                  " is in an acceptance set beyond the declared pairs");

    // Flatten guards into the letter table, checking that exactly one edge
    // matches every letter in every state.
    delta_.assign(static_cast<std::size_t>(n_states_) * n_letters_, 0);
    for (std::uint32_t q = 0; q < n_states_; ++q) {
        for (std::uint32_t letter = 0; letter < n_letters_; ++letter) {
            std::uint32_t matches = 0, dst = 0;
            for (const Edge& e : data.edges[q]) {
                if (eval_label_expr(e.guard, letter)) {
                    if (e.dst >= n_states_)
                        throw ValidationError("state " + std::to_string(q) +
                                              " has an edge to state " + std::to_string(e.dst) +
                                              ", beyond the state space");
                    ++matches;
                    dst = e.dst;
                }
            }
            if (matches != 1)
                throw ValidationError(
                    "state " + std::to_string(q) + ", letter " + std::to_string(letter) + ": " +
                    (matches == 0 ? "no edge matches (automaton incomplete)"
                                  : "several edges match (automaton nondeterministic)"));
            delta_[static_cast<std::size_t>(q) * n_letters_ + letter] = dst;
        }
    }
}

} // namespace smca
