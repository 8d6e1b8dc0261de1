#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace smca {

/// Boolean formula over atomic propositions, used as an edge guard.
/// Letters are bitmasks with bit i set when proposition i holds.
struct LabelExpr {
    enum class Kind { True, False, Ap, Not, And, Or };

    Kind kind = Kind::False;
    std::uint32_t ap = 0;
    std::unique_ptr<LabelExpr> lhs, rhs;

    static LabelExpr constant(bool value) {
        LabelExpr e;
        e.kind = value ? Kind::True : Kind::False;
        return e;
    }
    static LabelExpr atom(std::uint32_t ap_index);
    static LabelExpr negate(LabelExpr operand);
    static LabelExpr combine(Kind op, LabelExpr a, LabelExpr b);
};

bool eval_label_expr(const LabelExpr& expr, std::uint32_t letter);

/// Deterministic complete Rabin automaton with state-based acceptance.
/// Acceptance pair i is (Fin set 2i, Inf set 2i+1): a run is accepting iff
/// for some pair it eventually avoids set 2i and visits set 2i+1 infinitely
/// often. Construction checks that every state has exactly one outgoing
/// edge per letter and flattens the guards into a dense transition table,
/// so stepping is a single lookup.
class RabinAutomaton {
public:
    struct Edge {
        LabelExpr guard;
        std::uint32_t dst;
    };

    struct Data {
        std::uint32_t n_states = 0;
        std::uint32_t start = 0;
        std::vector<std::string> ap_names;
        std::uint32_t n_pairs = 0;
        std::vector<std::uint32_t> state_sets;       // per state, bitmask over acceptance sets
        std::vector<std::vector<Edge>> edges;
    };

    explicit RabinAutomaton(Data data);

    std::uint32_t num_states() const { return n_states_; }
    std::uint32_t start() const { return start_; }
    const std::vector<std::string>& ap_names() const { return ap_names_; }
    std::uint32_t num_aps() const { return static_cast<std::uint32_t>(ap_names_.size()); }
    std::uint32_t num_pairs() const { return n_pairs_; }
    std::uint32_t num_letters() const { return 1u << ap_names_.size(); }

    /// Bitmask over acceptance sets 0..2*num_pairs()-1 containing q.
    std::uint32_t sets_of(std::uint32_t q) const { return state_sets_[q]; }
    bool in_fin(std::uint32_t q, std::uint32_t pair) const {
        return (state_sets_[q] >> (2 * pair)) & 1u;
    }
    bool in_inf(std::uint32_t q, std::uint32_t pair) const {
        return (state_sets_[q] >> (2 * pair + 1)) & 1u;
    }

    std::uint32_t step(std::uint32_t q, std::uint32_t letter) const {
        return delta_[static_cast<std::size_t>(q) * n_letters_ + letter];
    }

private:
    std::uint32_t n_states_ = 0;
    std::uint32_t start_ = 0;
    std::uint32_t n_pairs_ = 0;
    std::uint32_t n_letters_ = 1;
    std::vector<std::string> ap_names_;
    std::vector<std::uint32_t> state_sets_;
    std::vector<std::uint32_t> delta_;
};

inline constexpr std::uint32_t kMaxAps = 16;

} // namespace smca
