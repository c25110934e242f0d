#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ccmdp/evaluate.hpp"
#include "ccmdp/grids.hpp"
#include "ccmdp/instance.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/policy.hpp"
#include "ccmdp/trim.hpp"

namespace ccmdp {

enum class Algorithm { Auto, Limited, Disjoint, Local };

struct SolveOptions {
    double eps = 0.1;  // approximation parameter, open interval (0, 1)
    Algorithm algorithm = Algorithm::Auto;
    bool trim = true;  // tighten the utility ceiling before discretizing
    int gamma_cap = 3;  // largest branching the enumeration route accepts
    int psi_cap = 3;    // largest cluster the cluster route accepts
    int threads = 1;    // reserved for interface stability; solving is sequential
};

// Backward dynamic program over demand-indexed cells.  Each level holds one
// block per cluster (aligned with LayeredGraph::clusters); a block's entries
// sweep the joint demand vectors of its members in mixed-radix order with the
// first member most significant, so ascending entry index is ascending
// lexicographic demand order.  A cell stores the minimum execution risk (or
// accumulated cost) of a policy subtree whose discretized value meets the
// member's demand, the action behind it, and the demand indices allocated to
// that action's successors.  Dead cells keep +infinity risk and action -1;
// they mean "no subtree delivers this demand", never "certain failure".
struct DpTable {
    struct Block {
        std::vector<int> members;  // level ordinals, ascending
        std::int64_t entries = 0;  // grid count ^ members.size()

        // Cell arrays indexed entry * members.size() + member position.
        std::vector<double> er;               // +inf marks a dead cell
        std::vector<int> action;              // -1 on dead cells
        std::vector<std::int32_t> alloc_off;  // slice start in `alloc`
        std::vector<std::int32_t> alloc_len;  // slice length (successor count)
        std::vector<std::int32_t> alloc;      // demand indices, successor order

        int size() const { return static_cast<int>(members.size()); }
        double er_at(std::int64_t entry, int member) const {
            return er[entry * size() + member];
        }
        int action_at(std::int64_t entry, int member) const {
            return action[entry * size() + member];
        }
        // Demand index per successor of the cell's action, in successor order.
        std::vector<std::int32_t> alloc_at(std::int64_t entry, int member) const {
            const std::int64_t cell = entry * size() + member;
            const auto first = alloc.begin() + alloc_off[cell];
            return {first, first + alloc_len[cell]};
        }
    };

    int horizon = 0;
    Mode mode = Mode::ChanceConstrained;
    std::vector<ValueGrid> grids;     // value grids, levels 0..h
    std::vector<double> demand_step;  // cover-table value step per level 0..h-1
    std::vector<std::vector<Block>> level;

    std::int64_t cells() const;                   // total cells over all blocks
    std::vector<std::int64_t> cells_by_level() const;
};

// Fills the table for a route: Limited enumerates successor allocations on the
// given grids; Disjoint builds one scalar cover table per (state, action);
// Local builds one vector cover table per (cluster, action profile) and keeps,
// per joint demand entry, the profile with the smallest summed risk, with each
// member's risk re-derived from the child cells the allocation pins so stored
// risks equal realized ones.  `allowed` follows TrimResult::allowed.  Throws
// SizeError when a block or cover table would exceed internal cell caps.
DpTable build_table(const MdpInstance& inst, const LayeredGraph& g,
                    const std::vector<std::vector<std::vector<int>>>& allowed,
                    const std::vector<ValueGrid>& grids, Algorithm route);

struct FetchResult {
    int demand_index = 0;  // chosen demand index at the initial state
    Policy policy;
};

// Scans the initial state's row for the largest demand whose risk fits the
// budget, then walks the table forward level by level: every live member of a
// touched cluster is pinned to its stored action, and successors are pushed at
// their allocated demands (members nobody routes to sit at demand 0).  Returns
// nullopt when no demand at the initial state fits the budget.
std::optional<FetchResult> fetch_policy(const DpTable& table, const LayeredGraph& g,
                                        double budget);

// Value of `policy` under the floor-discretized Bellman recursion on `grids`
// (each level's sum is floored onto that level's grid; values clamp to the
// grid top).  Visits policy-reachable states only and applies the same policy
// checks as evaluate_policy.
double discretized_value(const MdpInstance& inst, const LayeredGraph& g, const Policy& policy,
                         const std::vector<ValueGrid>& grids);

enum class SolveStatus { Feasible, Infeasible };

struct SolveStats {
    Algorithm route = Algorithm::Auto;  // route actually run
    GridScheme scheme = GridScheme::OnePart;
    double eps = 0;
    double u_max = 0;      // utility ceiling the grids were scaled by
    bool trimmed = false;  // whether the ceiling came from trim_umax
    int gamma = 0;
    int psi_inclusive = 0;
    int max_cluster = 0;
    int demand_index = -1;  // root demand chosen by fetch, -1 when none fits
    std::int64_t table_cells = 0;
    std::vector<std::int64_t> cells_per_level;
    std::vector<std::int64_t> grid_counts;  // grid size per level 0..h
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    Policy policy;      // empty when infeasible
    EvalReport report;  // exact evaluation of `policy`; zeroed when infeasible
    double value_bar = 0;  // guaranteed discretized value at the initial state
    SolveStats stats;
};

// Route picked by `solve` for this structure: Limited when reach sets are
// disjoint and branching fits gamma_cap, Disjoint when only disjoint, Local
// when the largest cluster fits psi_cap; StructureError otherwise.
Algorithm resolve_route(const LayeredGraph& g, const SolveOptions& opts);

// Route-specific solvers.  Preconditions raise StructureError ("structure
// violation" for disjointness/branching, "cluster too large" for oversized
// clusters); eps outside (0, 1) raises std::invalid_argument.  A budget no
// policy can meet yields status Infeasible, not an exception.
SolveResult solve_lim(const MdpInstance& inst, const SolveOptions& opts);
SolveResult solve_dis(const MdpInstance& inst, const SolveOptions& opts);
SolveResult solve_local(const MdpInstance& inst, const SolveOptions& opts);

// Solves with opts.algorithm; Auto resolves the route via resolve_route.
SolveResult solve(const MdpInstance& inst, const SolveOptions& opts);

}  // namespace ccmdp
