#pragma once

// Shared helpers for the test binaries: tiny hand-built instances and an
// independent forward path-enumeration evaluator used as a reference for the
// backward dynamic-programming one in the library.

#include <cmath>
#include <vector>

#include "ccmdp/evaluate.hpp"
#include "ccmdp/instance.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/policy.hpp"
#include "ccmdp/rng.hpp"

namespace ccmdp::test {

// Expected value and risk/cost by explicit enumeration of every run.  A run's
// failure probability is 1 - prod(1 - r(s)) over all visited states.
struct PathStats {
    double value = 0;
    double risk_or_cost = 0;
};

inline void walk_paths(const MdpInstance& inst, const Policy& policy, int k, int s, double prob,
                       double value, double survive, double cost, PathStats& out) {
    const bool cc = inst.mode == Mode::ChanceConstrained;
    if (cc) survive *= 1.0 - inst.state_risk[s];
    const auto finish = [&] {
        out.value += prob * value;
        out.risk_or_cost += cc ? prob * (1.0 - survive) : prob * cost;
    };
    if (k == inst.horizon) return finish();
    const int a = *policy.get(k, s);
    value += inst.utility[s][a];
    cost += inst.action_cost[s][a];
    const auto& list = inst.transitions[s][a];
    if (list.empty()) return finish();  // terminal action
    for (const Outcome& o : list)
        walk_paths(inst, policy, k + 1, o.state, prob * o.prob, value, survive, cost, out);
}

inline PathStats enumerate_runs(const MdpInstance& inst, const Policy& policy) {
    PathStats out;
    walk_paths(inst, policy, 0, inst.initial, 1.0, 0.0, 1.0, 0.0, out);
    return out;
}

// Random layered DAG over `width` fresh states per level; every (state,
// action) gets 1..max_branch successors at the next level.  Not the library
// generator: deliberately unstructured, for property tests of the evaluator.
inline MdpInstance random_layered(std::uint64_t seed, int horizon = 3, int width = 3,
                                  int n_actions = 2, int max_branch = 3,
                                  Mode mode = Mode::ChanceConstrained) {
    Rng rng(seed);
    MdpInstance inst;
    inst.mode = mode;
    inst.horizon = horizon;
    std::vector<std::vector<int>> levels(horizon + 1);
    levels[0].push_back(inst.add_state("s0", mode == Mode::ChanceConstrained
                                                 ? rng.uniform(0.0, 0.3)
                                                 : 0.0));
    for (int k = 1; k <= horizon; ++k)
        for (int i = 0; i < width; ++i)
            levels[k].push_back(inst.add_state(
                "s" + std::to_string(k) + "_" + std::to_string(i),
                mode == Mode::ChanceConstrained ? rng.uniform(0.0, 0.3) : 0.0));
    for (int a = 0; a < n_actions; ++a) inst.add_action("a" + std::to_string(a));
    for (int k = 0; k < horizon; ++k)
        for (int s : levels[k])
            for (int a = 0; a < n_actions; ++a) {
                const int deg =
                    static_cast<int>(rng.uniform_int(1, std::min<int>(max_branch, width)));
                std::vector<int> pool = levels[k + 1];
                std::vector<double> weights;
                for (int i = 0; i < deg; ++i) {
                    const int pick = static_cast<int>(rng.uniform_int(0, pool.size() - 1));
                    weights.push_back(rng.uniform(0.05, 1.0));
                    inst.add_transition(s, a, pool[pick], weights.back());
                    pool.erase(pool.begin() + pick);
                }
                double total = 0;
                for (double w : weights) total += w;
                for (Outcome& o : inst.transitions[s][a]) o.prob /= total;
                inst.set_utility(s, a, rng.uniform(0.0, 2.0));
                if (mode == Mode::CostConstrained) inst.set_cost(s, a, rng.uniform(0.0, 1.0));
            }
    inst.budget = mode == Mode::ChanceConstrained ? 0.5 : 2.0;
    return inst;
}

inline Policy random_policy(const MdpInstance&, const LayeredGraph& g, std::uint64_t seed) {
    Rng rng(seed);
    Policy p;
    for (int k = 0; k < g.horizon; ++k)
        for (size_t i = 0; i < g.levels[k].size(); ++i) {
            const auto& actions = g.avail[k][i];
            p.set(k, g.levels[k][i],
                  actions[static_cast<size_t>(rng.uniform_int(0, actions.size() - 1))]);
        }
    return p;
}

}  // namespace ccmdp::test
