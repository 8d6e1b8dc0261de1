#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "smca/chain.hpp"
#include "smca/errors.hpp"
#include "smca/oracle.hpp"
#include "smca/rabin.hpp"

using namespace smca;

namespace {

// every component must be closed under transitions and strongly connected,
// and no state may appear in two components
void check_bscc_structure(const MarkovChain& c, const std::vector<std::vector<StateId>>& comps) {
    std::vector<int> owner(c.num_states(), -1);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        REQUIRE(!comps[i].empty());
        for (const StateId s : comps[i]) {
            CHECK(owner[s] == -1);
            owner[s] = static_cast<int>(i);
        }
    }
    for (const auto& comp : comps) {
        std::vector<bool> inside(c.num_states(), false);
        for (const StateId s : comp) inside[s] = true;
        for (const StateId s : comp)
            for (const StateId t : c.row_targets(s)) CHECK(inside[t]);
        for (const StateId from : comp) {
            std::vector<bool> seen(c.num_states(), false);
            std::queue<StateId> work;
            work.push(from);
            seen[from] = true;
            while (!work.empty()) {
                const StateId s = work.front();
                work.pop();
                for (const StateId t : c.row_targets(s))
                    if (!seen[t]) {
                        seen[t] = true;
                        work.push(t);
                    }
            }
            for (const StateId s : comp) CHECK(seen[s]);
        }
    }
}

RabinAutomaton one_state(std::uint32_t sets) {
    RabinAutomaton::Data d;
    d.n_states = 1;
    d.start = 0;
    d.ap_names = {"goal"};
    d.n_pairs = 1;
    d.state_sets = {sets};
    d.edges.resize(1);
    d.edges[0].push_back({LabelExpr::constant(true), 0});
    return RabinAutomaton(std::move(d));
}

RabinAutomaton eventually() {
    RabinAutomaton::Data d;
    d.n_states = 2;
    d.start = 0;
    d.ap_names = {"goal"};
    d.n_pairs = 1;
    d.state_sets = {0, 0b10};
    d.edges.resize(2);
    d.edges[0].push_back({LabelExpr::atom(0), 1});
    d.edges[0].push_back({LabelExpr::negate(LabelExpr::atom(0)), 0});
    d.edges[1].push_back({LabelExpr::constant(true), 1});
    return RabinAutomaton(std::move(d));
}

RabinAutomaton infinitely_often() {
    RabinAutomaton::Data d;
    d.n_states = 2;
    d.start = 0;
    d.ap_names = {"goal"};
    d.n_pairs = 1;
    d.state_sets = {0, 0b10};
    d.edges.resize(2);
    for (std::uint32_t q = 0; q < 2; ++q) {
        d.edges[q].push_back({LabelExpr::atom(0), 1});
        d.edges[q].push_back({LabelExpr::negate(LabelExpr::atom(0)), 0});
    }
    return RabinAutomaton(std::move(d));
}

std::vector<bool> goal_of(const MarkovChain& c) { return c.label_mask("goal").value(); }

} // namespace

TEST_CASE("bottom components of the generated families") {
    const auto f1 = gen_fig1(5); // 0=s, 1=r, 2..6=v, 7=t, 8=u
    const auto b1 = bsccs(f1);
    REQUIRE(b1.size() == 2);
    CHECK(b1[0] == std::vector<StateId>{6});
    CHECK(b1[1] == std::vector<StateId>{7, 8});
    check_bscc_structure(f1, b1);

    const auto f3 = gen_fig3(16);
    const auto b3 = bsccs(f3);
    REQUIRE(b3.size() == 1);
    CHECK(b3[0] == std::vector<StateId>{16});

    const auto f4 = gen_fig4(8, 3);
    const auto b4 = bsccs(f4);
    REQUIRE(b4.size() == 2);
    CHECK(b4[0].size() == 3);
    CHECK(b4[1].size() == 3);
    check_bscc_structure(f4, b4);

    for (const std::uint64_t seed : {1, 2, 3, 4}) {
        const auto r = gen_random(12, 3, seed);
        const auto br = bsccs(r);
        CHECK(!br.empty());
        check_bscc_structure(r, br);
    }
}

TEST_CASE("reachability probabilities on solvable families") {
    const auto f1 = gen_fig1(3);
    CHECK(exact_reachability(f1, goal_of(f1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(exact_reachability(f1, std::vector<bool>(f1.num_states(), true)) == 1.0);

    const auto f3 = gen_fig3(8);
    CHECK(exact_reachability(f3, goal_of(f3)) == doctest::Approx(1.0).epsilon(1e-12));

    const auto f4 = gen_fig4(3, 2);
    CHECK(exact_reachability(f4, goal_of(f4)) == doctest::Approx(0.5).epsilon(1e-12));

    // enlarging the goal set can only increase the probability
    for (const std::uint64_t seed : {5, 6, 7}) {
        const auto r = gen_random(10, 3, seed);
        std::vector<bool> small(r.num_states(), false), large(r.num_states(), false);
        small[9] = large[9] = large[8] = true;
        CHECK(exact_reachability(r, small) <= exact_reachability(r, large) + 1e-12);
    }
}

TEST_CASE("reachability agrees with brute-force simulation") {
    const auto c = gen_random(10, 3, 7);
    std::vector<bool> goal(c.num_states(), false);
    goal[9] = true;
    const double exact = exact_reachability(c, goal);

    const int n = 4000, horizon = 400;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        PathState path(33, i);
        for (int step = 0; step < horizon; ++step)
            if (goal[next_state(c, path)]) {
                ++hits;
                break;
            }
    }
    const double mean = static_cast<double>(hits) / n;
    const double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(mean - exact) < 3 * sigma + 1e-3);
}

TEST_CASE("linear systems larger than the dense cutoff still solve") {
    const auto c = gen_fig4(2500, 5); // 5011 states forces the iterative path
    CHECK(exact_reachability(c, goal_of(c)) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(exact_mp(c) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("mean payoff weights component payoffs by absorption mass") {
    CHECK(exact_mp(gen_fig4(5, 2)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(exact_mp(gen_fig3(8)) == doctest::Approx(1.0).epsilon(1e-12));
    // the only reward sits on a transient state
    CHECK(exact_mp(gen_fig1(3)) == doctest::Approx(0.0).epsilon(1e-12));

    // ergodic: the whole chain is one component, so compare with a direct
    // stationary computation by power iteration
    const auto e = gen_random_ergodic(3, 19);
    std::vector<double> mu{1.0 / 3, 1.0 / 3, 1.0 / 3}, next(3);
    for (int it = 0; it < 200000; ++it) {
        for (StateId t = 0; t < 3; ++t) {
            next[t] = 0.0;
            for (StateId s = 0; s < 3; ++s) next[t] += mu[s] * e.prob(s, t);
        }
        mu.swap(next);
    }
    double by_power = 0.0;
    for (StateId s = 0; s < 3; ++s) by_power += mu[s] * e.reward(s);
    CHECK(exact_mp(e) == doctest::Approx(by_power).epsilon(1e-8));
}

TEST_CASE("product construction mirrors chain rows through the automaton") {
    const auto c = gen_fig1(1);
    const auto dra = eventually();
    const auto product = build_product(c, dra);
    const auto& pc = product.chain;

    REQUIRE(pc.num_states() == product.chain_state.size());
    REQUIRE(pc.num_states() == product.automaton_state.size());
    CHECK(pc.num_states() <= c.num_states() * dra.num_states());
    CHECK(pc.actual_pmin() == c.actual_pmin());

    // recompute the expected letter of each chain state
    const auto goal = goal_of(c);
    const auto letter = [&](StateId s) { return goal[s] ? 1u : 0u; };

    for (StateId id = 0; id < pc.num_states(); ++id) {
        const StateId cs = product.chain_state[id];
        const std::uint32_t as = product.automaton_state[id];
        const auto targets = pc.row_targets(id);
        const auto probs = pc.row_probs(id);
        REQUIRE(targets.size() == c.row_targets(cs).size());
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const StateId tc = product.chain_state[targets[i]];
            CHECK(probs[i] == c.prob(cs, tc));
            CHECK(product.automaton_state[targets[i]] == dra.step(as, letter(tc)));
        }
    }

    const auto init = pc.initial();
    REQUIRE(init.size() == 1);
    CHECK(product.chain_state[init[0].first] == 0);
    CHECK(product.automaton_state[init[0].first] == dra.step(dra.start(), letter(0)));

    // a one-state automaton leaves the component structure untouched
    const auto trivial = build_product(c, one_state(0b10));
    CHECK(bsccs(trivial.chain).size() == bsccs(c).size());
}

TEST_CASE("automaton probabilities reduce to reachability when they should") {
    const auto c = gen_fig1(3);
    CHECK(exact_ltl(c, one_state(0b10)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact_ltl(c, one_state(0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(exact_ltl(c, eventually()) - exact_reachability(c, goal_of(c))) < 1e-9);

    // recurrence splits along the two bottoms
    CHECK(exact_ltl(gen_fig4(3, 2), infinitely_often()) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(exact_ltl(c, infinitely_often()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("termination-probability baseline samples and estimates") {
    const auto f1 = gen_fig1(1);
    CHECK(sim_termination_sample(f1, std::vector<bool>(f1.num_states(), true), 0.5, 3, 0) == 1);

    MarkovChain::Data d;
    d.n_states = 1;
    d.rows = {{{0, 1.0}}};
    const MarkovChain trap(std::move(d));
    CHECK(sim_termination_sample(trap, {false}, 0.5, 3, 0) == 0);
    CHECK_THROWS_AS(sim_termination_sample(trap, {false}, 0.0, 3, 0), ValidationError);
    CHECK_THROWS_AS(sim_termination_sample(trap, {false}, 1.0, 3, 0), ValidationError);

    // goal two cheap steps away: a tiny kill rate barely biases the estimate
    const auto c = gen_fig1(3);
    const auto quick = baseline_estimate(c, goal_of(c), 1e-4, 2000, 0.05, 11);
    CHECK(quick.n_samples == 2000);
    CHECK(quick.seed == 11);
    CHECK(quick.interval.lo <= quick.mean);
    CHECK(quick.interval.hi >= quick.mean);
    CHECK(std::abs(quick.mean - 0.5) < 3 * std::sqrt(0.25 / 2000) + 0.01);

    const auto again = baseline_estimate(c, goal_of(c), 1e-4, 2000, 0.05, 11);
    CHECK(again.mean == quick.mean);

    // deep ladder: the kill rate truncates paths long before the goal,
    // so the estimate collapses even though the true probability is 1
    const auto f3 = gen_fig3(18);
    const auto rep = baseline_estimate(f3, goal_of(f3), 1e-3, 2000, 0.05, 11);
    CHECK(exact_reachability(f3, goal_of(f3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.mean < 0.5);
}
