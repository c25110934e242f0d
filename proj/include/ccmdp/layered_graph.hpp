#pragma once

#include <boost/dynamic_bitset.hpp>
#include <vector>

#include "ccmdp/instance.hpp"

namespace ccmdp {

// Time-unrolled view of an instance.  Level k holds the states reachable at
// step k from the initial state (level 0 = {initial}); states never reached at
// a step are absent from that level.  Positions within a level ("ordinals")
// follow ascending state index and are the indexing scheme used by solvers.
struct LayeredGraph {
    int horizon = 0;

    std::vector<std::vector<int>> levels;   // [k] -> state indices, ascending
    std::vector<std::vector<int>> ordinal;  // [k][state index] -> ordinal or -1

    // Available actions per (level, ordinal), ascending action index.  At
    // levels before the final decision step only actions with successors are
    // available; at the final decision step declared terminal actions are too.
    std::vector<std::vector<std::vector<int>>> avail;

    // succ[k][i][j]: successor distribution of action avail[k][i][j], with
    // Outcome.state remapped to the ordinal in level k+1 (ascending).  All
    // evaluation sums successor contributions in exactly this order.
    std::vector<std::vector<std::vector<std::vector<Outcome>>>> succ;

    // reach[k][i]: set of level-h ordinals reachable from (k, i); at the last
    // level, the singleton containing the state itself.
    std::vector<std::vector<boost::dynamic_bitset<>>> reach;

    // clusters[k]: partition of the ordinals of level k into connected
    // components of the "reach sets intersect" relation.  Members ascending;
    // clusters ordered by smallest member.  cluster_of[k][i] -> cluster index.
    std::vector<std::vector<std::vector<int>>> clusters;
    std::vector<std::vector<int>> cluster_of;

    int gamma = 0;          // max successor count over available pairs
    int psi_inclusive = 0;  // max #same-level states with intersecting reach, incl. self
    int psi_exclusive = 0;  // same, excluding the state itself

    bool disjoint() const { return psi_exclusive == 0; }
    int max_cluster_size() const;

    int state_at(int k, int i) const { return levels[k][i]; }
};

// Unrolls a validated instance into levels, measures branching (gamma) and
// locality (psi), and clusters same-level states with entangled futures.
LayeredGraph build_layers(const MdpInstance& inst);

}  // namespace ccmdp
