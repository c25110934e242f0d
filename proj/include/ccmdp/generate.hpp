#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ccmdp/instance.hpp"

namespace ccmdp {

// Random layered instances with controlled structure.  States are arranged in
// levels 0..horizon; level 0 is a single initial state and transitions only go
// one level forward.  Each level is partitioned into clusters of size at most
// cluster_target, every cluster's successors stay inside the pool formed by
// its own child clusters on the next level, and members of a multi-state
// cluster share a forced common successor.  As a result the reachable-future
// sets of states in different clusters are disjoint, so
//   cluster_target == 1  ->  all same-level overlap counts are zero, and
//   cluster_target >= 2  ->  the largest overlapping group has exactly
//                            cluster_target states (requires horizon >= 2).
// Per-action branching never exceeds gamma_target.
struct LayeredParams {
  int n_states_per_level = 3;  // upper bound per level (level 0 always has 1)
  int n_actions = 2;
  int horizon = 3;
  int gamma_target = 2;    // max successors per (state, action)
  int cluster_target = 1;  // max cluster size (1 = fully disjoint futures)
  double risk_lo = 0.0;    // CC: per-state failure chance; C: per-action cost
  double risk_hi = 0.3;
  double utility_lo = 0.6;
  double utility_hi = 1.0;
  double budget = 0.3;
  Mode mode = Mode::ChanceConstrained;
  std::uint64_t seed = 1;
};

MdpInstance generate_layered(const LayeredParams& params);

// Deterministic gridworld: cells c{x}_{y}, moves up/down/left/right with a
// slip chance split between the two perpendicular directions, walls clamp
// (probability mass merges onto the resulting cell), the goal is absorbing
// and pays utility 1 per step spent on it, and cliff cells carry cliff_risk.
// Always chance-constrained.  seed is accepted for interface uniformity but
// the construction is deterministic.
struct GridworldParams {
  int width = 3;
  int height = 3;
  std::pair<int, int> start = {0, 0};
  std::pair<int, int> goal = {2, 2};
  std::vector<std::pair<int, int>> cliffs;
  double cliff_risk = 1.0;
  double slip = 0.0;
  int horizon = 4;
  double budget = 0.1;
  std::uint64_t seed = 0;
};

MdpInstance generate_gridworld(const GridworldParams& params);

}  // namespace ccmdp
