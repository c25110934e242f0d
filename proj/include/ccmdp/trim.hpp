#pragma once

#include <vector>

#include "ccmdp/instance.hpp"
#include "ccmdp/layered_graph.hpp"

namespace ccmdp {

struct TrimResult {
    // allowed[k][i]: surviving actions at (level k, ordinal i), ascending;
    // subset of LayeredGraph::avail.  Sized for levels 0..h-1.
    std::vector<std::vector<std::vector<int>>> allowed;
    double u_max = 0;      // largest utility among surviving pairs
    bool feasible = true;  // false once trimming proves no policy fits the budget
};

// Tightens the utility ceiling that grids are scaled by.  Repeatedly takes the
// largest-utility available (state, action) pair and checks whether forcing it
// at some level, completed by a minimum-risk (or minimum-cost) policy
// everywhere else, stays within budget; pairs failing at every placement are
// removed.  Stops at the first survivor, whose utility becomes u_max.
TrimResult trim_umax(const MdpInstance& inst, const LayeredGraph& g);

// Availability and utility ceiling without any trimming.
TrimResult no_trim(const MdpInstance& inst, const LayeredGraph& g);

}  // namespace ccmdp
