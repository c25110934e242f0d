#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccmdp/errors.hpp"
#include "ccmdp/solver.hpp"

namespace ccmdp {

namespace {

int member_position(const std::vector<int>& members, int ordinal) {
    return static_cast<int>(std::lower_bound(members.begin(), members.end(), ordinal) -
                            members.begin());
}

}  // namespace

std::optional<FetchResult> fetch_policy(const DpTable& table, const LayeredGraph& g,
                                        double budget) {
    const int h = table.horizon;
    const int root_cluster = g.cluster_of[0][0];
    const DpTable::Block& root = table.level[0][root_cluster];
    const int root_pos = member_position(root.members, 0);

    std::int64_t pick = -1;
    for (std::int64_t l = root.entries - 1; l >= 0; --l) {
        if (root.er_at(l, root_pos) <= budget + kFeasibilitySlack) {
            pick = l;
            break;
        }
    }
    if (pick < 0) return std::nullopt;

    FetchResult out;
    out.demand_index = static_cast<int>(pick);

    // Entry chosen per cluster at the current level; -1 marks untouched.
    std::vector<std::int64_t> cur(table.level[0].size(), -1);
    cur[root_cluster] = pick;
    for (int k = 0; k < h; ++k) {
        const ValueGrid& g1 = table.grids[k + 1];
        const std::size_t n_child = table.level[k + 1].size();
        // Demand components assigned to child cluster members; -1 = unassigned.
        std::vector<std::vector<std::int32_t>> pending(n_child);
        std::vector<bool> touched(n_child, false);
        for (std::size_t ci = 0; ci < table.level[k].size(); ++ci) {
            if (cur[ci] < 0) continue;
            const DpTable::Block& b = table.level[k][ci];
            const std::int64_t e = cur[ci];
            for (int c = 0; c < b.size(); ++c) {
                const int a = b.action_at(e, c);
                if (a < 0) continue;  // member without any allowed action
                const int i = b.members[c];
                out.policy.set(k, g.state_at(k, i), a);
                const auto& actions = g.avail[k][i];
                const auto pos = std::lower_bound(actions.begin(), actions.end(), a);
                const auto& outs = g.succ[k][i][pos - actions.begin()];
                const std::vector<std::int32_t> alloc = b.alloc_at(e, c);
                for (std::size_t z = 0; z < outs.size(); ++z) {
                    const int ord = outs[z].state;
                    const int cc = g.cluster_of[k + 1][ord];
                    const DpTable::Block& cb = table.level[k + 1][cc];
                    if (!touched[cc]) {
                        touched[cc] = true;
                        pending[cc].assign(cb.size(), -1);
                    }
                    const int p = member_position(cb.members, ord);
                    std::int32_t& slot = pending[cc][p];
                    if (slot == -1) {
                        slot = alloc[z];
                    } else if (slot != alloc[z]) {
                        throw std::logic_error("inconsistent demand assignment");
                    }
                }
            }
        }
        std::vector<std::int64_t> next(n_child, -1);
        for (std::size_t cc = 0; cc < n_child; ++cc) {
            if (!touched[cc]) continue;
            const DpTable::Block& cb = table.level[k + 1][cc];
            std::int64_t entry = 0;
            for (int p = 0; p < cb.size(); ++p) {
                entry *= g1.count;
                if (pending[cc][p] > 0) entry += pending[cc][p];
            }
            next[cc] = entry;
        }
        cur = std::move(next);
    }
    return out;
}

double discretized_value(const MdpInstance& inst, const LayeredGraph& g, const Policy& policy,
                         const std::vector<ValueGrid>& grids) {
    const int h = g.horizon;
    // Memoized value per (level, ordinal); NaN marks "not computed yet".
    std::vector<std::vector<double>> memo(h + 1);
    for (int k = 0; k <= h; ++k)
        memo[k].assign(g.levels[k].size(), std::numeric_limits<double>::quiet_NaN());

    auto go = [&](auto&& self, int k, int i) -> double {
        if (k == h) return 0.0;
        double& cell = memo[k][i];
        if (!std::isnan(cell)) return cell;
        const int s = g.state_at(k, i);
        const auto chosen = policy.get(k, s);
        if (!chosen)
            throw ValidationError("policy undefined at ('" + inst.state_names[s] + "', step " +
                                  std::to_string(k) + ")");
        const auto& actions = g.avail[k][i];
        const auto pos = std::lower_bound(actions.begin(), actions.end(), *chosen);
        if (pos == actions.end() || *pos != *chosen)
            throw ValidationError("policy picks unavailable action '" +
                                  inst.action_names[*chosen] + "' at ('" + inst.state_names[s] +
                                  "', step " + std::to_string(k) + ")");
        const auto& outcomes = g.succ[k][i][pos - actions.begin()];
        double v = inst.utility[s][*chosen];
        for (const Outcome& o : outcomes) v += o.prob * self(self, k + 1, o.state);
        cell = grids[k].value_of(round_down(v, grids[k]));
        return cell;
    };
    return go(go, 0, 0);
}

}  // namespace ccmdp
