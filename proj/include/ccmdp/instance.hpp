#pragma once

#include <string>
#include <vector>

#include "ccmdp/errors.hpp"

namespace ccmdp {

// Which budget semantics the instance carries: a bound on the probability of
// ever entering a risky state (chance-constrained) or on expected accumulated
// cost (cost-constrained).
enum class Mode { ChanceConstrained, CostConstrained };

struct Outcome {
    int state = 0;    // successor state index
    double prob = 0;  // strictly positive
};

// Finite-horizon MDP with per-state risk (CC mode) or per-action cost (C mode).
//
// Conventions:
//  - transitions[s][a] is the successor distribution of action a at state s,
//    sorted by successor index, probabilities summing to 1 (within 1e-9).
//  - An action is "declared" at s if the pair appears in the model at all.
//    A declared pair with an empty successor list is a terminal action: it may
//    only be chosen at the final decision step (horizon - 1), where it ends the
//    run.  An undeclared pair is unavailable everywhere.
//  - Zero-probability successor entries must be omitted.
struct MdpInstance {
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::vector<std::vector<char>> declared;                   // [s][a]
    std::vector<std::vector<std::vector<Outcome>>> transitions;  // [s][a]
    std::vector<std::vector<double>> utility;                  // [s][a], >= 0
    std::vector<double> state_risk;                            // [s], in [0,1]
    std::vector<std::vector<double>> action_cost;              // [s][a], >= 0
    int initial = 0;
    int horizon = 1;
    double budget = 0;
    Mode mode = Mode::ChanceConstrained;

    int num_states() const { return static_cast<int>(state_names.size()); }
    int num_actions() const { return static_cast<int>(action_names.size()); }

    int state_index(const std::string& name) const;   // -1 if absent
    int action_index(const std::string& name) const;  // -1 if absent

    // Construction helpers; they keep successor lists sorted.
    int add_state(const std::string& name, double risk = 0.0);
    int add_action(const std::string& name);
    void declare(int s, int a);  // marks (s, a) available with no successors yet
    void add_transition(int s, int a, int succ, double prob);
    void set_utility(int s, int a, double u);
    void set_cost(int s, int a, double c);
};

// Returns its argument iff every model invariant holds; otherwise throws
// ValidationError naming the first violated invariant.
const MdpInstance& validate_instance(const MdpInstance& inst);

// Absolute tolerance for successor probability sums.
inline constexpr double kProbSumTol = 1e-9;

// Absolute slack allowed when comparing realized risk/cost against the budget.
inline constexpr double kFeasibilitySlack = 1e-12;

}  // namespace ccmdp
