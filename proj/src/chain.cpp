#include "smca/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "smca/errors.hpp"

namespace smca {

namespace {

constexpr double kRowSumTolerance = 1e-6;

// Skip renormalization when the sum is already within a few ulp of 1, so
// parsing an already-normalized chain leaves every probability bit-identical.
bool needs_renormalization(double sum, std::size_t row_len) {
    const double ulp_band = static_cast<double>(row_len + 1) * 4.0 *
                            std::numeric_limits<double>::epsilon();
    return std::abs(sum - 1.0) > ulp_band;
}

} // namespace

MarkovChain::MarkovChain(Data data) {
    if (data.n_states == 0) throw ValidationError("chain must have at least one state");
    n_states_ = data.n_states;
    if (data.rows.size() != n_states_)
        throw ValidationError("transition rows cover " + std::to_string(data.rows.size()) +
                              " states, expected " + std::to_string(n_states_));

    row_off_.assign(n_states_ + 1, 0);
    std::uint64_t total = 0;
    for (StateId s = 0; s < n_states_; ++s) {
        if (data.rows[s].empty())
            throw ValidationError("state " + std::to_string(s) + " has no outgoing transitions");
        total += data.rows[s].size();
        row_off_[s + 1] = total;
    }
    targets_.reserve(total);
    probs_.reserve(total);
    cum_.reserve(total);

    for (StateId s = 0; s < n_states_; ++s) {
        auto& row = data.rows[s];
        std::sort(row.begin(), row.end(),
                  [](const Transition& a, const Transition& b) { return a.target < b.target; });
        double sum = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& tr = row[i];
            if (tr.target >= n_states_)
                throw ValidationError("state " + std::to_string(s) + " has transition to " +
                                      std::to_string(tr.target) + ", beyond state space");
            if (i > 0 && tr.target == row[i - 1].target)
                throw ValidationError("state " + std::to_string(s) +
                                      " has duplicate transition to " + std::to_string(tr.target));
            if (!(tr.prob > 0.0) || !(tr.prob <= 1.0 + kRowSumTolerance))
                throw ValidationError("state " + std::to_string(s) + " -> " +
                                      std::to_string(tr.target) + " has probability " +
                                      std::to_string(tr.prob) + " outside (0, 1]");
            sum += tr.prob;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw ValidationError("row of state " + std::to_string(s) + " sums to " +
                                  std::to_string(sum) + ", outside 1 +/- 1e-6");
        const bool renorm = needs_renormalization(sum, row.size());
        double cum = 0.0;
        for (const auto& tr : row) {
            const double p = renorm ? tr.prob / sum : tr.prob;
            targets_.push_back(tr.target);
            probs_.push_back(p);
            cum += p;
            cum_.push_back(cum);
            actual_pmin_ = std::min(actual_pmin_, p);
        }
        cum_.back() = 1.0; // pin so any uniform draw in [0,1) lands inside the row
    }

    if (data.initial.empty()) data.initial.emplace_back(0, 1.0);
    std::sort(data.initial.begin(), data.initial.end());
    double init_sum = 0.0;
    for (std::size_t i = 0; i < data.initial.size(); ++i) {
        const auto& [s, p] = data.initial[i];
        if (s >= n_states_)
            throw ValidationError("initial distribution names state " + std::to_string(s));
        if (i > 0 && s == data.initial[i - 1].first)
            throw ValidationError("initial distribution repeats state " + std::to_string(s));
        if (!(p > 0.0))
            throw ValidationError("initial probability of state " + std::to_string(s) +
                                  " must be positive");
        init_sum += p;
    }
    if (std::abs(init_sum - 1.0) > kRowSumTolerance)
        throw ValidationError("initial distribution sums to " + std::to_string(init_sum));
    const bool renorm_init = needs_renormalization(init_sum, data.initial.size());
    initial_ = std::move(data.initial);
    double cum = 0.0;
    for (auto& [s, p] : initial_) {
        if (renorm_init) p /= init_sum;
        cum += p;
        initial_cum_.push_back(cum);
    }
    initial_cum_.back() = 1.0;

    label_names_ = std::move(data.label_names);
    state_labels_ = std::move(data.state_labels);
    state_labels_.resize(n_states_);
    for (StateId s = 0; s < n_states_; ++s) {
        auto& ls = state_labels_[s];
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        for (LabelId l : ls)
            if (l >= label_names_.size())
                throw ValidationError("state " + std::to_string(s) + " uses unknown label id " +
                                      std::to_string(l));
    }

    has_rewards_ = !data.rewards.empty();
    rewards_ = std::move(data.rewards);
    rewards_.resize(n_states_, 0.0);
    for (StateId s = 0; s < n_states_; ++s)
        if (!(rewards_[s] >= 0.0) || !(rewards_[s] <= 1.0))
            throw ValidationError("reward of state " + std::to_string(s) + " is " +
                                  std::to_string(rewards_[s]) + ", outside [0, 1]");

    if (data.declared_pmin < 0.0)
        throw ValidationError("declared pmin must be nonnegative");
    if (data.declared_pmin == 0.0) {
        declared_pmin_ = actual_pmin_;
    } else {
        if (data.declared_pmin > actual_pmin_)
            throw ValidationError("declared pmin " + std::to_string(data.declared_pmin) +
                                  " exceeds the smallest transition probability " +
                                  std::to_string(actual_pmin_));
        declared_pmin_ = data.declared_pmin;
    }
}

double MarkovChain::prob(StateId s, StateId t) const {
    const auto targets = row_targets(s);
    const auto it = std::lower_bound(targets.begin(), targets.end(), t);
    if (it == targets.end() || *it != t) return 0.0;
    return probs_[row_off_[s] + static_cast<std::uint64_t>(it - targets.begin())];
}

bool MarkovChain::has_label(StateId s, LabelId label) const {
    const auto& ls = state_labels_[s];
    return std::binary_search(ls.begin(), ls.end(), label);
}

std::optional<LabelId> MarkovChain::label_id(std::string_view name) const {
    for (std::size_t i = 0; i < label_names_.size(); ++i)
        if (label_names_[i] == name) return static_cast<LabelId>(i);
    return std::nullopt;
}

std::optional<std::vector<bool>> MarkovChain::label_mask(std::string_view name) const {
    const auto id = label_id(name);
    if (!id) return std::nullopt;
    std::vector<bool> mask(n_states_, false);
    for (StateId s = 0; s < n_states_; ++s)
        if (has_label(s, *id)) mask[s] = true;
    return mask;
}

StateId MarkovChain::sample_initial(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(initial_cum_.begin(), initial_cum_.end(), u);
    return initial_[static_cast<std::size_t>(it - initial_cum_.begin())].first;
}

StateId MarkovChain::sample_successor(StateId s, RngStream& rng) const {
    const double u = rng.uniform();
    const double* first = cum_.data() + row_off_[s];
    const double* last = cum_.data() + row_off_[s + 1];
    const double* it = std::upper_bound(first, last, u);
    return targets_[static_cast<std::uint64_t>(it - cum_.data())];
}

StateId next_state(const MarkovChain& chain, PathState& path) {
    path.current = path.length == 0 ? chain.sample_initial(path.rng)
                                    : chain.sample_successor(path.current, path.rng);
    ++path.length;
    return path.current;
}

namespace {

MarkovChain::Data with_goal_label(MarkovChain::Data data, const std::vector<StateId>& goal_states) {
    data.label_names = {"goal"};
    data.state_labels.resize(data.n_states);
    for (StateId s : goal_states) data.state_labels[s].push_back(0);
    return data;
}

} // namespace

MarkovChain gen_fig1(std::uint32_t m) {
    if (m == 0) throw ValidationError("fig1 needs m >= 1");
    // Layout: 0 = s, 1 = r, 2..m+1 = v_1..v_m, m+2 = t, m+3 = u.
    const StateId r = 1, v1 = 2, vm = m + 1, t = m + 2, u = m + 3;
    MarkovChain::Data d;
    d.n_states = m + 4;
    d.rows.resize(d.n_states);
    d.rows[0] = {{r, 0.5}, {t, 0.5}};
    d.rows[r] = {{v1, 1.0}};
    for (StateId v = v1; v < vm; ++v) d.rows[v] = {{v + 1, 1.0}};
    d.rows[vm] = {{vm, 1.0}};
    d.rows[t] = {{t, 0.01}, {u, 0.99}};
    d.rows[u] = {{u, 0.01}, {t, 0.99}};
    d.rewards.assign(d.n_states, 0.0);
    d.rewards[r] = 1.0;
    return MarkovChain(with_goal_label(std::move(d), {r}));
}

MarkovChain gen_fig3(std::uint32_t n) {
    if (n == 0) throw ValidationError("fig3 needs n >= 1");
    MarkovChain::Data d;
    d.n_states = n + 1;
    d.rows.resize(d.n_states);
    for (StateId i = 0; i < n; ++i) d.rows[i] = {{0, 0.5}, {i + 1, 0.5}};
    d.rows[n] = {{n, 1.0}};
    d.rewards.assign(d.n_states, 0.0);
    d.rewards[n] = 1.0;
    return MarkovChain(with_goal_label(std::move(d), {n}));
}

MarkovChain gen_fig4(std::uint32_t n_arm, std::uint32_t m_cycle) {
    if (n_arm == 0 || m_cycle == 0) throw ValidationError("fig4 needs N >= 1 and M >= 1");
    const StateId n = n_arm, m = m_cycle;
    // Layout: 0 = initial; arm A = 1..n; cycle A = n+1..n+m;
    // arm B = n+m+1..2n+m; cycle B = 2n+m+1..2n+2m (goal, reward 1).
    MarkovChain::Data d;
    d.n_states = 2 * n + 2 * m + 1;
    d.rows.resize(d.n_states);
    const StateId arm_a = 1, cyc_a = n + 1, arm_b = n + m + 1, cyc_b = 2 * n + m + 1;
    d.rows[0] = {{arm_a, 0.5}, {arm_b, 0.5}};
    for (StateId i = 0; i < n; ++i) {
        const StateId a = arm_a + i, b = arm_b + i;
        d.rows[a] = {{a, 0.5}, {i + 1 < n ? a + 1 : cyc_a, 0.5}};
        d.rows[b] = {{b, 0.5}, {i + 1 < n ? b + 1 : cyc_b, 0.5}};
    }
    for (StateId i = 0; i < m; ++i) {
        d.rows[cyc_a + i] = {{i + 1 < m ? cyc_a + i + 1 : cyc_a, 1.0}};
        d.rows[cyc_b + i] = {{i + 1 < m ? cyc_b + i + 1 : cyc_b, 1.0}};
    }
    d.rewards.assign(d.n_states, 0.0);
    std::vector<StateId> goal;
    for (StateId i = 0; i < m; ++i) {
        goal.push_back(cyc_b + i);
        d.rewards[cyc_b + i] = 1.0;
    }
    return MarkovChain(with_goal_label(std::move(d), goal));
}

namespace {

// Random dyadic weights: each of the `k` entries gets at least `floor_units`
// of the 1024 units, the rest land uniformly at random. Exact unit sums make
// every row sum to exactly 1.0 in double arithmetic.
std::vector<double> dyadic_weights(std::uint32_t k, std::uint32_t floor_units, RngStream& rng) {
    std::vector<std::uint32_t> units(k, floor_units);
    for (std::uint32_t left = 1024 - k * floor_units; left > 0; --left)
        ++units[rng.next() % k];
    std::vector<double> w(k);
    for (std::uint32_t i = 0; i < k; ++i) w[i] = static_cast<double>(units[i]) / 1024.0;
    return w;
}

} // namespace

MarkovChain gen_random(StateId n_states, StateId max_out_degree, std::uint64_t seed) {
    if (n_states == 0) throw ValidationError("random chain needs at least one state");
    if (max_out_degree == 0 || max_out_degree > n_states)
        throw ValidationError("max out-degree must be in [1, n_states]");
    RngStream rng(seed, 0);
    MarkovChain::Data d;
    d.n_states = n_states;
    d.rows.resize(n_states);
    std::vector<StateId> pool(n_states);
    for (StateId s = 0; s < n_states; ++s) {
        const StateId degree = 1 + static_cast<StateId>(rng.next() % max_out_degree);
        // Partial Fisher-Yates draw of `degree` distinct targets.
        for (StateId i = 0; i < n_states; ++i) pool[i] = i;
        for (StateId i = 0; i < degree; ++i)
            std::swap(pool[i], pool[i + rng.next() % (n_states - i)]);
        const auto w = dyadic_weights(degree, 512 / degree, rng);
        for (StateId i = 0; i < degree; ++i) d.rows[s].push_back({pool[i], w[i]});
    }
    return MarkovChain(with_goal_label(std::move(d), {n_states - 1}));
}

MarkovChain gen_random_ergodic(StateId n_states, std::uint64_t seed) {
    if (n_states == 0) throw ValidationError("ergodic chain needs at least one state");
    RngStream rng(seed, 0);
    MarkovChain::Data d;
    d.n_states = n_states;
    d.rows.resize(n_states);
    const auto floor_units = static_cast<std::uint32_t>(1024 * 9 / 10 / n_states);
    for (StateId s = 0; s < n_states; ++s) {
        const auto w = dyadic_weights(n_states, floor_units, rng);
        for (StateId t = 0; t < n_states; ++t) d.rows[s].push_back({t, w[t]});
    }
    d.rewards.resize(n_states);
    for (StateId s = 0; s < n_states; ++s)
        d.rewards[s] = static_cast<double>(rng.next() % 1025) / 1024.0;
    return MarkovChain(with_goal_label(std::move(d), {n_states - 1}));
}

} // namespace smca
