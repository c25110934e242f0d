#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ccmdp/instance.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/policy.hpp"

namespace ccmdp {

struct OracleResult {
  // Best feasible expected utility; -inf when no feasible policy exists.
  double optimal_value = -std::numeric_limits<double>::infinity();
  std::optional<Policy> optimal_policy;
  std::int64_t feasible_count = 0;
  std::int64_t total_count = 0;  // distinct policies over reached states
};

// Exhaustive reference optimizer.  Enumerates every deterministic
// step-dependent policy, assigning actions only at (step, state) pairs the
// policy actually reaches, and evaluates each exactly.  Ties in value resolve
// to the assignment that is lexicographically smallest in
// (step, state, action) order.
//
// allowed, when given, restricts the action set per (level, ordinal) of the
// layered graph (must be subsets of the available actions).  Throws SizeError
// when the static bound on the number of assignments exceeds product_cap.
OracleResult enumerate_optimal(
    const MdpInstance& inst, double product_cap = 1e7,
    const std::vector<std::vector<std::vector<int>>>* allowed = nullptr);

// Budget-free optimum by backward induction over the layered graph.  Throws
// StructureError when no everywhere-defined policy exists.
double unconstrained_value(const MdpInstance& inst);

// Smallest horizon under which some policy reaches goal_state from the
// initial state with probability >= threshold.  For each candidate horizon h
// the flat MDP is unrolled into a chance-constrained instance ("name@k"
// states, the goal made absorbing, failure risk 1 on non-goal final states,
// budget 1 - threshold) and handed to solve; the first horizon for which
// solve returns a policy wins.  Throws std::runtime_error if none does up to
// max_horizon.
struct SspResult {
  int horizon = 0;
  Policy policy;
  MdpInstance instance;  // the unrolled instance the policy applies to
};

using SolveCallback = std::function<std::optional<Policy>(const MdpInstance&)>;

SspResult ssp_solve(const MdpInstance& base, int goal_state, double threshold,
                    int max_horizon, const SolveCallback& solve);

}  // namespace ccmdp
