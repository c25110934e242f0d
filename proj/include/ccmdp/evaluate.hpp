#pragma once

#include <cstdint>

#include "ccmdp/instance.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/policy.hpp"

namespace ccmdp {

struct EvalReport {
    double value = 0;         // expected accumulated utility from the initial state
    double risk_or_cost = 0;  // execution risk (CC) or expected accumulated cost (C)
    bool feasible = false;    // risk_or_cost <= budget + kFeasibilitySlack
};

// Exact backward evaluation of a policy over the layered graph.  Visits only
// policy-reachable (step, state) pairs; throws ValidationError if the policy is
// undefined there, names an unavailable action, or picks a terminal action
// before the final decision step.
EvalReport evaluate_policy(const MdpInstance& inst, const LayeredGraph& g, const Policy& policy);

// Monte Carlo estimate: failure frequency (CC) or mean accumulated cost (C).
// Deterministic for a given (n_samples, seed) regardless of thread count: the
// sample space is split into fixed-size chunks, each with its own generator.
double simulate_risk(const MdpInstance& inst, const Policy& policy, std::int64_t n_samples,
                     std::uint64_t seed, int threads = 1);

}  // namespace ccmdp
