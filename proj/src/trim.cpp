#include "ccmdp/trim.hpp"

#include <algorithm>
#include <optional>

namespace ccmdp {

namespace {

using Allowed = std::vector<std::vector<std::vector<int>>>;

// Minimum achievable risk (CC) or expected cost (C) from the initial state
// when actions are restricted to `allowed`, optionally forcing one cell's
// action.  nullopt = no completion exists (a dead end is unavoidable).
std::optional<double> min_er_root(const MdpInstance& inst, const LayeredGraph& g,
                                  const Allowed& allowed, int forced_k = -1, int forced_i = -1,
                                  int forced_a = -1) {
    const bool cc = inst.mode == Mode::ChanceConstrained;
    const int h = g.horizon;
    std::vector<std::vector<std::optional<double>>> er(h + 1);
    er[h].resize(g.levels[h].size());
    for (size_t i = 0; i < g.levels[h].size(); ++i)
        er[h][i] = cc ? inst.state_risk[g.levels[h][i]] : 0.0;
    for (int k = h - 1; k >= 0; --k) {
        er[k].resize(g.levels[k].size());
        for (size_t i = 0; i < g.levels[k].size(); ++i) {
            const int s = g.levels[k][i];
            const bool forced = (k == forced_k && static_cast<int>(i) == forced_i);
            std::optional<double> best;
            for (int a : allowed[k][i]) {
                if (forced && a != forced_a) continue;
                const auto& actions = g.avail[k][i];
                const size_t pos =
                    std::lower_bound(actions.begin(), actions.end(), a) - actions.begin();
                const auto& outcomes = g.succ[k][i][pos];
                double acc = 0;
                bool ok = true;
                for (const Outcome& o : outcomes) {
                    if (!er[k + 1][o.state]) {
                        ok = false;
                        break;
                    }
                    acc += o.prob * *er[k + 1][o.state];
                }
                if (!ok) continue;
                const double r = inst.state_risk[s];
                const double val =
                    cc ? r + (1.0 - r) * acc : inst.action_cost[s][a] + acc;
                if (!best || val < *best) best = val;
            }
            er[k][i] = best;
        }
    }
    return er[0][0];
}

}  // namespace

TrimResult no_trim(const MdpInstance& inst, const LayeredGraph& g) {
    TrimResult res;
    res.allowed.assign(g.avail.begin(), g.avail.begin() + g.horizon);
    res.u_max = 0;
    for (int k = 0; k < g.horizon; ++k)
        for (size_t i = 0; i < g.levels[k].size(); ++i)
            for (int a : res.allowed[k][i])
                res.u_max = std::max(res.u_max, inst.utility[g.levels[k][i]][a]);
    res.feasible = true;
    return res;
}

TrimResult trim_umax(const MdpInstance& inst, const LayeredGraph& g) {
    TrimResult res = no_trim(inst, g);
    struct Cand {
        double u;
        int s, a;
    };
    std::vector<Cand> cands;
    {
        std::vector<std::vector<char>> seen(inst.num_states(),
                                            std::vector<char>(inst.num_actions(), 0));
        for (int k = 0; k < g.horizon; ++k)
            for (size_t i = 0; i < g.levels[k].size(); ++i)
                for (int a : res.allowed[k][i]) {
                    const int s = g.levels[k][i];
                    if (!seen[s][a]) {
                        seen[s][a] = 1;
                        cands.push_back({inst.utility[s][a], s, a});
                    }
                }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.u != y.u) return x.u > y.u;
        if (x.s != y.s) return x.s < y.s;
        return x.a < y.a;
    });

    for (const Cand& c : cands) {
        bool survives = false;
        for (int k = 0; k < g.horizon && !survives; ++k) {
            const int i = g.ordinal[k][c.s];
            if (i < 0) continue;
            const auto& acts = res.allowed[k][i];
            if (!std::binary_search(acts.begin(), acts.end(), c.a)) continue;
            auto root = min_er_root(inst, g, res.allowed, k, i, c.a);
            if (root && *root <= inst.budget + kFeasibilitySlack) survives = true;
        }
        if (survives) {
            res.u_max = c.u;
            res.feasible = true;
            return res;
        }
        for (int k = 0; k < g.horizon; ++k) {
            const int i = g.ordinal[k][c.s];
            if (i < 0) continue;
            auto& acts = res.allowed[k][i];
            acts.erase(std::remove(acts.begin(), acts.end(), c.a), acts.end());
        }
    }
    res.u_max = 0;
    res.feasible = false;
    return res;
}

}  // namespace ccmdp
