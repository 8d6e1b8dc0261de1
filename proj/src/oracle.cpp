#include "smca/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include <Eigen/Dense>

#include "smca/errors.hpp"
#include "smca/ltl.hpp"
#include "smca/meanpayoff.hpp"
#include "smca/parallel.hpp"
#include "scc.hpp"

namespace smca {

namespace {

detail::SccResult chain_sccs(const MarkovChain& chain) {
    std::vector<std::uint32_t> all(chain.num_states());
    std::iota(all.begin(), all.end(), 0u);
    return detail::tarjan_scc(chain.num_states(), all,
                              [&](std::uint32_t v, std::vector<std::uint32_t>& out) {
                                  const auto targets = chain.row_targets(v);
                                  out.insert(out.end(), targets.begin(), targets.end());
                              });
}

} // namespace

std::vector<std::vector<StateId>> bsccs(const MarkovChain& chain) {
    const auto scc = chain_sccs(chain);
    std::vector<std::uint8_t> bottom(static_cast<std::size_t>(scc.n_components), 1);
    for (StateId s = 0; s < chain.num_states(); ++s)
        for (const StateId t : chain.row_targets(s))
            if (scc.component[t] != scc.component[s]) bottom[scc.component[s]] = 0;

    std::vector<std::vector<StateId>> out(static_cast<std::size_t>(scc.n_components));
    for (StateId s = 0; s < chain.num_states(); ++s)
        if (bottom[scc.component[s]]) out[scc.component[s]].push_back(s);
    std::erase_if(out, [](const auto& c) { return c.empty(); });
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

namespace {

// States that can reach the goal, by backward BFS over reversed edges.
std::vector<std::uint8_t> can_reach(const MarkovChain& chain, const std::vector<bool>& goal) {
    std::vector<std::vector<StateId>> preds(chain.num_states());
    for (StateId s = 0; s < chain.num_states(); ++s)
        for (const StateId t : chain.row_targets(s)) preds[t].push_back(s);

    std::vector<std::uint8_t> reach(chain.num_states(), 0);
    std::vector<StateId> queue;
    for (StateId s = 0; s < chain.num_states(); ++s)
        if (goal[s]) {
            reach[s] = 1;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        const StateId t = queue.back();
        queue.pop_back();
        for (const StateId s : preds[t])
            if (!reach[s]) {
                reach[s] = 1;
                queue.push_back(s);
            }
    }
    return reach;
}

// Solves (I - P_SS) x = b. P_SS is handed over as per-unknown rows of
// (local column, probability) pairs. Dense LU at desk scale, Gauss-Seidel
// sweeps beyond.
std::vector<double> solve_hitting(
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& rows,
    const std::vector<double>& b) {
    const std::size_t n = rows.size();
    if (n == 0) return {};

    if (n <= 2000) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [j, p] : rows[i])
                a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= p;
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = b[i];
        const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
        if (!x.allFinite() || (a * x - rhs).cwiseAbs().maxCoeff() > 1e-8)
            throw SingularSystem("reachability solve degenerated");
        return std::vector<double>(x.data(), x.data() + n);
    }

    std::vector<double> x(n, 0.0);
    for (std::uint64_t sweep = 0; sweep < 1'000'000; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = b[i], diag = 1.0;
            for (const auto& [j, p] : rows[i]) {
                if (j == i)
                    diag -= p;
                else
                    acc += p * x[j];
            }
            x[i] = acc / diag;
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = x[i] - b[i];
            for (const auto& [j, p] : rows[i]) acc -= p * x[j];
            residual = std::max(residual, std::abs(acc));
        }
        if (residual <= 1e-10) return x;
    }
    throw SingularSystem("iterative reachability solve did not converge");
}

} // namespace

double exact_reachability(const MarkovChain& chain, const std::vector<bool>& goal) {
    if (goal.size() != chain.num_states()) throw ValidationError("goal vector size mismatch");
    const auto reach = can_reach(chain, goal);

    // Unknowns: states that can reach the goal but are not in it.
    std::vector<std::int64_t> local(chain.num_states(), -1);
    std::vector<StateId> unknowns;
    for (StateId s = 0; s < chain.num_states(); ++s)
        if (reach[s] && !goal[s]) {
            local[s] = static_cast<std::int64_t>(unknowns.size());
            unknowns.push_back(s);
        }

    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(unknowns.size());
    std::vector<double> b(unknowns.size(), 0.0);
    for (std::size_t i = 0; i < unknowns.size(); ++i) {
        const StateId s = unknowns[i];
        const auto targets = chain.row_targets(s);
        const auto probs = chain.row_probs(s);
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const StateId t = targets[j];
            if (goal[t])
                b[i] += probs[j];
            else if (local[t] >= 0)
                rows[i].push_back({static_cast<std::uint32_t>(local[t]), probs[j]});
        }
    }
    const auto x = solve_hitting(rows, b);

    double total = 0.0;
    for (const auto& [s, p] : chain.initial()) {
        if (goal[s])
            total += p;
        else if (local[s] >= 0)
            total += p * x[static_cast<std::size_t>(local[s])];
    }
    return total;
}

double exact_mp(const MarkovChain& chain) {
    if (!chain.has_rewards()) throw ValidationError("chain has no rewards attached");
    double total = 0.0;
    for (const auto& component : bsccs(chain)) {
        std::vector<std::int64_t> local(chain.num_states(), -1);
        for (std::size_t i = 0; i < component.size(); ++i) local[component[i]] = static_cast<std::int64_t>(i);

        const std::size_t k = component.size();
        std::vector<double> matrix(k * k, 0.0), rewards(k);
        for (std::size_t i = 0; i < k; ++i) {
            const StateId s = component[i];
            rewards[i] = chain.reward(s);
            const auto targets = chain.row_targets(s);
            const auto probs = chain.row_probs(s);
            for (std::size_t j = 0; j < targets.size(); ++j)
                matrix[i * k + static_cast<std::size_t>(local[targets[j]])] = probs[j];
        }

        std::vector<bool> goal(chain.num_states(), false);
        for (const StateId s : component) goal[s] = true;
        total += exact_reachability(chain, goal) * mp_of_bscc(matrix, rewards);
    }
    return total;
}

Product build_product(const MarkovChain& chain, const RabinAutomaton& dra) {
    const std::uint32_t nq = dra.num_states();
    const auto letters = letters_by_state(chain, map_propositions(chain, dra));
    const std::uint64_t packed_limit = static_cast<std::uint64_t>(chain.num_states()) * nq;
    if (packed_limit > kNoState)
        throw ValidationError("product has " + std::to_string(packed_limit) +
                              " states, too many");

    std::vector<StateId> id_of(packed_limit, kNoState);
    std::vector<StateId> chain_state;
    std::vector<std::uint32_t> automaton_state;
    const auto intern = [&](StateId s, std::uint32_t q) {
        const std::uint64_t packed = static_cast<std::uint64_t>(s) * nq + q;
        if (id_of[packed] == kNoState) {
            id_of[packed] = static_cast<StateId>(chain_state.size());
            chain_state.push_back(s);
            automaton_state.push_back(q);
        }
        return id_of[packed];
    };

    MarkovChain::Data data;
    for (const auto& [s, p] : chain.initial())
        data.initial.emplace_back(intern(s, dra.step(dra.start(), letters[s])), p);

    // BFS over reachable product states; new states keep appending.
    for (StateId id = 0; id < chain_state.size(); ++id) {
        const StateId s = chain_state[id];
        const std::uint32_t q = automaton_state[id];
        data.rows.resize(chain_state.size());
        auto& row = data.rows[id];
        const auto targets = chain.row_targets(s);
        const auto probs = chain.row_probs(s);
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const StateId t = targets[j];
            row.push_back({intern(t, dra.step(q, letters[t])), probs[j]});
        }
        std::sort(row.begin(), row.end(),
                  [](const Transition& a, const Transition& b) { return a.target < b.target; });
    }
    data.rows.resize(chain_state.size());
    data.n_states = static_cast<StateId>(chain_state.size());
    data.declared_pmin = chain.declared_pmin();
    return Product{MarkovChain(std::move(data)), std::move(chain_state),
                   std::move(automaton_state)};
}

double exact_ltl(const MarkovChain& chain, const RabinAutomaton& dra) {
    const Product product = build_product(chain, dra);
    const std::uint32_t nq = dra.num_states();

    std::vector<bool> goal(product.chain.num_states(), false);
    for (const auto& component : bsccs(product.chain)) {
        std::vector<StateId> packed;
        packed.reserve(component.size());
        for (const StateId id : component)
            packed.push_back(static_cast<StateId>(
                static_cast<std::uint64_t>(product.chain_state[id]) * nq +
                product.automaton_state[id]));
        if (is_accepting_set(packed, dra, nq))
            for (const StateId id : component) goal[id] = true;
    }
    return exact_reachability(product.chain, goal);
}

int sim_termination_sample(const MarkovChain& chain, const std::vector<bool>& goal,
                           double p_term, std::uint64_t master_seed, std::uint64_t path_index) {
    if (!(p_term > 0) || p_term >= 1) throw ValidationError("p_term must be in (0,1)");
    PathState path(master_seed, path_index);
    while (true) {
        const StateId s = next_state(chain, path);
        if (goal[s]) return 1;
        if (path.rng.uniform() < p_term) return 0;
    }
}

BaselineReport baseline_estimate(const MarkovChain& chain, const std::vector<bool>& goal,
                                 double p_term, std::uint64_t n_samples, double alpha,
                                 std::uint64_t master_seed, unsigned threads) {
    if (n_samples == 0) throw ValidationError("need at least one sample");
    std::uint64_t positives = 0;
    sample_ordered(
        threads,
        [&](std::uint64_t idx) {
            return sim_termination_sample(chain, goal, p_term, master_seed, idx);
        },
        [&](std::uint64_t idx, int bit) {
            positives += static_cast<std::uint64_t>(bit);
            return idx + 1 < n_samples;
        });

    BaselineReport rep;
    rep.mean = static_cast<double>(positives) / static_cast<double>(n_samples);
    rep.interval = hoeffding_ci(rep.mean, n_samples, alpha);
    rep.n_samples = n_samples;
    rep.seed = master_seed;
    return rep;
}

} // namespace smca
