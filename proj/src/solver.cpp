#include "ccmdp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "ccmdp/errors.hpp"
#include "ccmdp/knapsack.hpp"

namespace ccmdp {

std::int64_t DpTable::cells() const {
    std::int64_t total = 0;
    for (const auto& blocks : level)
        for (const auto& b : blocks) total += b.entries * b.size();
    return total;
}

std::vector<std::int64_t> DpTable::cells_by_level() const {
    std::vector<std::int64_t> out(level.size(), 0);
    for (std::size_t k = 0; k < level.size(); ++k)
        for (const auto& b : level[k]) out[k] += b.entries * b.size();
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Memory/work guards; exceeding one raises SizeError rather than thrashing.
constexpr std::int64_t kBlockCellCap = 4'000'000;  // cells per DP block
constexpr std::int64_t kCoverCellCap = 8'000'000;  // cells per vector cover table
constexpr std::int64_t kLimEnumCap = 20'000'000;   // allocations per (state, action)

std::int64_t checked_entries(std::int64_t count, int q) {
    std::int64_t out = 1;
    for (int c = 0; c < q; ++c) {
        if (count != 0 && out > kBlockCellCap / count)
            throw SizeError("joint demand table exceeds the cell cap");
        out *= count;
    }
    if (out * q > kBlockCellCap) throw SizeError("joint demand table exceeds the cell cap");
    return out;
}

int position_of(const std::vector<int>& sorted, int x) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

bool lex_less(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Best candidate so far per demand index of a singleton cluster.
struct Row {
    std::vector<double> er;
    std::vector<int> act;
    std::vector<std::vector<std::int32_t>> alloc;
    explicit Row(std::int64_t n) : er(n, kInf), act(n, -1), alloc(n) {}
};

struct Builder {
    const MdpInstance& inst;
    const LayeredGraph& g;
    const std::vector<std::vector<std::vector<int>>>& allowed;
    const std::vector<ValueGrid>& grids;
    const Algorithm route;
    const bool cc;
    DpTable t;
    // Per-state minimum risk over stored cells sharing the own-demand
    // component, for the level below the one being built; parent-side item
    // weights are priced from these.
    std::vector<std::vector<double>> marg;

    Builder(const MdpInstance& i, const LayeredGraph& gr,
            const std::vector<std::vector<std::vector<int>>>& alw,
            const std::vector<ValueGrid>& gs, Algorithm r)
        : inst(i), g(gr), allowed(alw), grids(gs), route(r),
          cc(i.mode == Mode::ChanceConstrained) {}

    double combine(int s, int a, double acc) const {
        if (cc) {
            const double r = inst.state_risk[s];
            return r + (1.0 - r) * acc;
        }
        return inst.action_cost[s][a] + acc;
    }

    const std::vector<Outcome>& outcomes_of(int k, int i, int a) const {
        const auto& actions = g.avail[k][i];
        return g.succ[k][i][position_of(actions, a)];
    }

    DpTable run() {
        const int h = g.horizon;
        t.horizon = h;
        t.mode = inst.mode;
        t.grids = grids;
        t.demand_step.resize(h);
        const int gamma = std::max(1, g.gamma);
        for (int k = 0; k < h; ++k)
            t.demand_step[k] = grids[k].step / static_cast<double>(gamma);
        t.level.resize(h + 1);

        // Final level: one singleton block per state, one entry at demand 0.
        t.level[h].resize(g.clusters[h].size());
        for (std::size_t ci = 0; ci < g.clusters[h].size(); ++ci) {
            DpTable::Block& b = t.level[h][ci];
            b.members = g.clusters[h][ci];
            b.entries = 1;
            const int s = g.state_at(h, b.members[0]);
            b.er.assign(1, cc ? inst.state_risk[s] : 0.0);
            b.action.assign(1, -1);
            b.alloc_off.assign(1, 0);
            b.alloc_len.assign(1, 0);
        }
        build_marg(h);

        for (int k = h - 1; k >= 0; --k) {
            if (grids[k].count > kBlockCellCap)
                throw SizeError("value grid exceeds the cell cap");
            t.level[k].resize(g.clusters[k].size());
            for (std::size_t ci = 0; ci < g.clusters[k].size(); ++ci) {
                const auto& members = g.clusters[k][ci];
                if (route == Algorithm::Local) {
                    local_block(k, ci);
                } else {
                    if (members.size() != 1)
                        throw StructureError(
                            "structure violation: same-level states share future states");
                    Row row(grids[k].count);
                    if (route == Algorithm::Limited)
                        lim_row(k, members[0], row);
                    else
                        dis_row(k, members[0], row);
                    store_row(k, ci, members, std::move(row));
                }
            }
            build_marg(k);
        }
        return std::move(t);
    }

    // ---- limited route: full allocation enumeration on the value grids ----

    void lim_row(int k, int i, Row& row) {
        const int s = g.state_at(k, i);
        const ValueGrid& gk = grids[k];
        const ValueGrid& g1 = grids[k + 1];
        const double l1 = g1.step;
        for (int a : allowed[k][i]) {
            const auto& outs = outcomes_of(k, i, a);
            const double u = inst.utility[s][a];
            const int d = static_cast<int>(outs.size());
            double total = 1;
            for (int j = 0; j < d; ++j) {
                total *= static_cast<double>(g1.count);
                if (total > static_cast<double>(kLimEnumCap))
                    throw SizeError("allocation enumeration exceeds the work cap");
            }
            Row bucket(gk.count);
            if (d == 0) {
                const std::int64_t vbar = round_down(u, gk);
                bucket.er[vbar] = combine(s, a, 0.0);
            } else {
                std::vector<std::int32_t> m(d, 0);
                for (;;) {
                    double acc = 0, v = u;
                    bool dead = false;
                    for (int j = 0; j < d; ++j) {
                        const Outcome& o = outs[j];
                        const double ce = marg[o.state][m[j]];
                        if (ce == kInf) {
                            dead = true;
                            break;
                        }
                        acc += o.prob * ce;
                        v += o.prob * (l1 * static_cast<double>(m[j]));
                    }
                    if (!dead) {
                        const std::int64_t vbar = round_down(v, gk);
                        const double er = combine(s, a, acc);
                        if (er < bucket.er[vbar]) {
                            bucket.er[vbar] = er;
                            bucket.alloc[vbar] = m;
                        }
                    }
                    int j = d - 1;
                    while (j >= 0 && m[j] + 1 == g1.count) m[j--] = 0;
                    if (j < 0) break;
                    ++m[j];
                }
            }
            fold_suffix(bucket, a, row);
        }
    }

    // Folds one action's bucket (best candidate per achieved value index) into
    // the row: each demand takes the best candidate at or above it.  Ties keep
    // the earlier action, then the lexicographically smallest allocation.
    static void fold_suffix(const Row& bucket, int a, Row& row) {
        const std::int64_t n = static_cast<std::int64_t>(row.er.size());
        double cur = kInf;
        const std::vector<std::int32_t>* cur_alloc = nullptr;
        for (std::int64_t l = n - 1; l >= 0; --l) {
            if (bucket.er[l] < cur ||
                (bucket.er[l] == cur && cur != kInf && lex_less(bucket.alloc[l], *cur_alloc))) {
                cur = bucket.er[l];
                cur_alloc = &bucket.alloc[l];
            }
            if (cur < row.er[l]) {
                row.er[l] = cur;
                row.act[l] = a;
                row.alloc[l] = *cur_alloc;
            }
        }
    }

    // ---- disjoint route: one scalar cover table per (state, action) ----

    void dis_row(int k, int i, Row& row) {
        const int s = g.state_at(k, i);
        const ValueGrid& gk = grids[k];
        const ValueGrid& g1 = grids[k + 1];
        const double l1 = g1.step;
        const double step = t.demand_step[k];
        for (int a : allowed[k][i]) {
            const auto& outs = outcomes_of(k, i, a);
            const double u = inst.utility[s][a];
            const int d = static_cast<int>(outs.size());
            if (d == 0) {
                const std::int64_t vbar = round_down(u, gk);
                const double er = combine(s, a, 0.0);
                for (std::int64_t l = 0; l <= vbar; ++l)
                    if (er < row.er[l]) {
                        row.er[l] = er;
                        row.act[l] = a;
                        row.alloc[l].clear();
                    }
                continue;
            }
            std::vector<std::vector<ScalarCoverTable::Choice>> cats(d);
            std::int64_t achievable = 0;
            bool dead = false;
            for (int j = 0; j < d && !dead; ++j) {
                const Outcome& o = outs[j];
                std::int64_t top = 0;
                for (std::int64_t m = 0; m < g1.count; ++m) {
                    const double ce = marg[o.state][m];
                    if (ce == kInf) break;  // reachable demands are downward closed
                    const std::int64_t vidx =
                        guarded_floor_div(o.prob * (l1 * static_cast<double>(m)), step);
                    cats[j].push_back({o.prob * ce, vidx, static_cast<int>(m)});
                    top = vidx;
                }
                if (cats[j].empty()) dead = true;
                achievable += top;
            }
            if (dead) continue;
            const double top_demand = gk.value_of(gk.max_index()) - u;
            const std::int64_t cap = std::min(achievable, cover_index(top_demand, step));
            ScalarCoverTable tab(cap, std::move(cats));
            for (std::int64_t l = 0; l < gk.count; ++l) {
                const std::int64_t rho = cover_index(gk.value_of(l) - u, step);
                if (rho > cap) break;  // demands only grow with l
                auto chosen = tab.backtrack(rho);
                assert(chosen);
                double acc = 0;
                for (int j = 0; j < d; ++j) acc += outs[j].prob * marg[outs[j].state][(*chosen)[j]];
                const double er = combine(s, a, acc);
                if (er < row.er[l]) {
                    row.er[l] = er;
                    row.act[l] = a;
                    row.alloc[l].assign(chosen->begin(), chosen->end());
                }
            }
        }
    }

    void store_row(int k, std::size_t ci, const std::vector<int>& members, Row&& row) {
        DpTable::Block& b = t.level[k][ci];
        b.members = members;
        b.entries = grids[k].count;
        const std::int64_t n = b.entries;
        b.er = std::move(row.er);
        b.action = std::move(row.act);
        b.alloc_off.resize(n);
        b.alloc_len.resize(n);
        std::int64_t total = 0;
        for (std::int64_t l = 0; l < n; ++l) total += static_cast<std::int64_t>(row.alloc[l].size());
        b.alloc.reserve(total);
        for (std::int64_t l = 0; l < n; ++l) {
            b.alloc_off[l] = static_cast<std::int32_t>(b.alloc.size());
            b.alloc_len[l] = static_cast<std::int32_t>(row.alloc[l].size());
            b.alloc.insert(b.alloc.end(), row.alloc[l].begin(), row.alloc[l].end());
        }
    }

    // ---- local route: joint demand blocks per cluster ----

    struct CatInfo {
        int ordinal = 0;        // successor ordinal at level k+1
        int child_cluster = 0;  // cluster index at level k+1
        int child_pos = 0;      // member position inside the child block
        std::int64_t child_stride = 1;
        int slot = 0;  // index into the per-profile distinct child cluster list
    };

    void local_block(int k, std::size_t ci) {
        const std::vector<int>& members = g.clusters[k][ci];
        const int q = static_cast<int>(members.size());
        const ValueGrid& gk = grids[k];
        const std::int64_t cnt = gk.count;
        const std::int64_t entries = checked_entries(cnt, q);

        DpTable::Block& b = t.level[k][ci];
        b.members = members;
        b.entries = entries;
        b.er.assign(entries * q, kInf);
        b.action.assign(entries * q, -1);
        b.alloc_off.assign(entries * q, 0);
        b.alloc_len.assign(entries * q, 0);

        std::vector<int> live;  // member positions with at least one action
        for (int c = 0; c < q; ++c)
            if (!allowed[k][members[c]].empty()) live.push_back(c);
        if (live.empty()) return;
        const int nl = static_cast<int>(live.size());

        int gmax = 1;
        for (int c : live)
            for (int a : allowed[k][members[c]])
                gmax = std::max(gmax, static_cast<int>(outcomes_of(k, members[c], a).size()));

        std::vector<double> best_total(entries, kInf);
        // Scratch allocation storage: fixed-width slices, compacted at the end.
        std::vector<std::int32_t> tmp_alloc(entries * q * gmax, 0);
        std::vector<std::int32_t> tmp_len(entries * q, 0);

        // Action profile odometer over live members.
        std::vector<int> ix(nl, 0);
        for (;;) {
            run_profile(k, ci, live, ix, gmax, best_total, tmp_alloc, tmp_len);
            int j = nl - 1;
            while (j >= 0 &&
                   ix[j] + 1 == static_cast<int>(allowed[k][members[live[j]]].size()))
                ix[j--] = 0;
            if (j < 0) break;
            ++ix[j];
        }

        std::int64_t total_len = 0;
        for (std::int64_t cell = 0; cell < entries * q; ++cell) total_len += tmp_len[cell];
        b.alloc.reserve(total_len);
        for (std::int64_t cell = 0; cell < entries * q; ++cell) {
            b.alloc_off[cell] = static_cast<std::int32_t>(b.alloc.size());
            b.alloc_len[cell] = tmp_len[cell];
            const std::int32_t* src = tmp_alloc.data() + cell * gmax;
            b.alloc.insert(b.alloc.end(), src, src + tmp_len[cell]);
        }
    }

    void run_profile(int k, std::size_t ci, const std::vector<int>& live,
                     const std::vector<int>& ix, int gmax, std::vector<double>& best_total,
                     std::vector<std::int32_t>& tmp_alloc, std::vector<std::int32_t>& tmp_len) {
        const std::vector<int>& members = g.clusters[k][ci];
        const int q = static_cast<int>(members.size());
        const int nl = static_cast<int>(live.size());
        const ValueGrid& gk = grids[k];
        const ValueGrid& g1 = grids[k + 1];
        const double l1 = g1.step;
        const double step = t.demand_step[k];
        const std::int64_t cnt = gk.count;
        DpTable::Block& b = t.level[k][ci];
        const std::int64_t entries = b.entries;

        // Per live member: action, state, outcomes, utility.
        std::vector<int> act(nl), state(nl);
        std::vector<const std::vector<Outcome>*> outs(nl);
        std::vector<double> util(nl);
        for (int j = 0; j < nl; ++j) {
            const int i = members[live[j]];
            act[j] = allowed[k][i][ix[j]];
            state[j] = g.state_at(k, i);
            outs[j] = &outcomes_of(k, i, act[j]);
            util[j] = inst.utility[state[j]][act[j]];
        }

        // Merged successor categories, ascending ordinal.
        std::vector<int> ords;
        for (int j = 0; j < nl; ++j)
            for (const Outcome& o : *outs[j]) ords.push_back(o.state);
        std::sort(ords.begin(), ords.end());
        ords.erase(std::unique(ords.begin(), ords.end()), ords.end());
        const int nc = static_cast<int>(ords.size());

        std::vector<CatInfo> cats(nc);
        std::vector<int> slots;  // distinct child cluster indices, first-seen order
        for (int tcat = 0; tcat < nc; ++tcat) {
            CatInfo& c = cats[tcat];
            c.ordinal = ords[tcat];
            c.child_cluster = g.cluster_of[k + 1][c.ordinal];
            const DpTable::Block& cb = t.level[k + 1][c.child_cluster];
            c.child_pos = position_of(cb.members, c.ordinal);
            c.child_stride = 1;
            for (int p = c.child_pos + 1; p < cb.size(); ++p) c.child_stride *= g1.count;
            int slot = -1;
            for (std::size_t z = 0; z < slots.size(); ++z)
                if (slots[z] == c.child_cluster) slot = static_cast<int>(z);
            if (slot < 0) {
                slot = static_cast<int>(slots.size());
                slots.push_back(c.child_cluster);
            }
            c.slot = slot;
        }
        const int ns = static_cast<int>(slots.size());

        // Transition probability per (category, live member) and the category
        // index of each member's successors.
        std::vector<double> tp(nc * nl, 0.0);
        std::vector<std::vector<int>> cat_of(nl);
        for (int j = 0; j < nl; ++j) {
            cat_of[j].reserve(outs[j]->size());
            for (const Outcome& o : *outs[j]) {
                const int tcat = position_of(ords, o.state);
                cat_of[j].push_back(tcat);
                tp[tcat * nl + j] += o.prob;
            }
        }

        // Items: per category, one choice per reachable child demand.
        std::vector<std::vector<VectorCoverTable::Choice>> items(nc);
        std::vector<std::int64_t> achievable(nl, 0);
        for (int tcat = 0; tcat < nc; ++tcat) {
            const int ord = cats[tcat].ordinal;
            double t_total = 0;
            for (int j = 0; j < nl; ++j) t_total += tp[tcat * nl + j];
            std::vector<std::int64_t> top(nl, 0);
            for (std::int64_t m = 0; m < g1.count; ++m) {
                const double ce = marg[ord][m];
                if (ce == kInf) break;  // reachable demands are downward closed
                VectorCoverTable::Choice ch;
                ch.weight = t_total * ce;
                ch.orig = static_cast<int>(m);
                ch.vidx.resize(nl);
                for (int j = 0; j < nl; ++j) {
                    ch.vidx[j] = guarded_floor_div(
                        tp[tcat * nl + j] * (l1 * static_cast<double>(m)), step);
                    top[j] = ch.vidx[j];
                }
                items[tcat].push_back(std::move(ch));
            }
            if (items[tcat].empty()) return;  // successor unreachable at any demand
            for (int j = 0; j < nl; ++j) achievable[j] += top[j];
        }

        // Demand index per (live member, own demand component).
        std::vector<std::vector<std::int64_t>> rho_of(nl);
        std::vector<std::int64_t> caps(nl);
        for (int j = 0; j < nl; ++j) {
            rho_of[j].resize(cnt);
            for (std::int64_t l = 0; l < cnt; ++l)
                rho_of[j][l] = cover_index(gk.value_of(l) - util[j], step);
            caps[j] = std::min(achievable[j], rho_of[j][cnt - 1]);
        }
        std::int64_t cover_cells = 1;
        for (int j = 0; j < nl; ++j) {
            if (cover_cells > kCoverCellCap / (caps[j] + 1))
                throw SizeError("cover table exceeds the cell cap");
            cover_cells *= caps[j] + 1;
        }
        VectorCoverTable tab(caps, std::move(items));

        std::vector<int> comp(q, 0);  // demand components of the current entry
        std::vector<std::int64_t> rho(nl), child_entry(ns);
        std::vector<double> member_er(nl);
        for (std::int64_t e = 0; e < entries; ++e, advance(comp, cnt)) {
            // A member with no allowed action delivers nothing, so any entry
            // that asks it for a positive demand is unreachable.
            bool skip = false;
            if (nl < q) {
                int lj = 0;
                for (int c = 0; c < q; ++c) {
                    if (lj < nl && live[lj] == c) {
                        ++lj;
                    } else if (comp[c] != 0) {
                        skip = true;
                        break;
                    }
                }
            }
            if (skip) continue;
            bool dead = false;
            for (int j = 0; j < nl; ++j) {
                rho[j] = rho_of[j][comp[live[j]]];
                if (rho[j] > caps[j]) {
                    dead = true;
                    break;
                }
            }
            if (dead) continue;
            auto chosen = tab.backtrack(rho);
            assert(chosen);
            if (!chosen) continue;
            std::fill(child_entry.begin(), child_entry.end(), 0);
            for (int tcat = 0; tcat < nc; ++tcat)
                child_entry[cats[tcat].slot] +=
                    static_cast<std::int64_t>((*chosen)[tcat]) * cats[tcat].child_stride;
            double total = 0;
            for (int j = 0; j < nl && !dead; ++j) {
                double acc = 0;
                const auto& olist = *outs[j];
                for (std::size_t z = 0; z < olist.size(); ++z) {
                    const int tcat = cat_of[j][z];
                    const CatInfo& c = cats[tcat];
                    const DpTable::Block& cb = t.level[k + 1][c.child_cluster];
                    const double ce =
                        cb.er[child_entry[c.slot] * cb.size() + c.child_pos];
                    if (ce == kInf) {
                        // The child cells this allocation pins are not jointly
                        // deliverable; the candidate cannot be realized.
                        dead = true;
                        break;
                    }
                    acc += olist[z].prob * ce;
                }
                if (dead) break;
                member_er[j] = combine(state[j], act[j], acc);
                total += member_er[j];
            }
            if (dead) continue;
            if (total < best_total[e]) {
                best_total[e] = total;
                for (int j = 0; j < nl; ++j) {
                    const std::int64_t cell = e * q + live[j];
                    b.er[cell] = member_er[j];
                    b.action[cell] = act[j];
                    const auto& olist = *outs[j];
                    tmp_len[cell] = static_cast<std::int32_t>(olist.size());
                    std::int32_t* dst = tmp_alloc.data() + cell * gmax;
                    for (std::size_t z = 0; z < olist.size(); ++z)
                        dst[z] = static_cast<std::int32_t>((*chosen)[cat_of[j][z]]);
                }
            }
        }
    }

    static void advance(std::vector<int>& comp, std::int64_t cnt) {
        int c = static_cast<int>(comp.size()) - 1;
        while (c >= 0 && comp[c] + 1 == cnt) comp[c--] = 0;
        if (c >= 0) ++comp[c];
    }

    void build_marg(int k) {
        const std::int64_t cnt = grids[k].count;
        marg.assign(g.levels[k].size(), std::vector<double>(cnt, kInf));
        for (const DpTable::Block& b : t.level[k]) {
            const int q = b.size();
            std::vector<int> comp(q, 0);
            for (std::int64_t e = 0; e < b.entries; ++e, advance(comp, cnt)) {
                for (int c = 0; c < q; ++c) {
                    double& slot = marg[b.members[c]][comp[c]];
                    const double v = b.er[e * q + c];
                    if (v < slot) slot = v;
                }
            }
        }
    }
};

}  // namespace

DpTable build_table(const MdpInstance& inst, const LayeredGraph& g,
                    const std::vector<std::vector<std::vector<int>>>& allowed,
                    const std::vector<ValueGrid>& grids, Algorithm route) {
    if (route == Algorithm::Auto)
        throw std::invalid_argument("build_table needs a concrete route");
    if (static_cast<int>(grids.size()) != g.horizon + 1)
        throw std::invalid_argument("grids must cover levels 0..horizon");
    Builder builder(inst, g, allowed, grids, route);
    return builder.run();
}

Algorithm resolve_route(const LayeredGraph& g, const SolveOptions& opts) {
    if (g.disjoint())
        return g.gamma <= opts.gamma_cap ? Algorithm::Limited : Algorithm::Disjoint;
    if (g.max_cluster_size() <= opts.psi_cap) return Algorithm::Local;
    throw StructureError(
        "structure violation: no route fits (gamma=" + std::to_string(g.gamma) +
        ", max cluster=" + std::to_string(g.max_cluster_size()) +
        ", cluster cap=" + std::to_string(opts.psi_cap) + ")");
}

namespace {

void check_route(const LayeredGraph& g, const SolveOptions& opts, Algorithm route) {
    if (route == Algorithm::Limited || route == Algorithm::Disjoint) {
        if (!g.disjoint())
            throw StructureError(
                "structure violation: same-level states share future states (psi_exclusive=" +
                std::to_string(g.psi_exclusive) + ")");
        if (route == Algorithm::Limited && g.gamma > opts.gamma_cap)
            throw StructureError("structure violation: branching gamma=" +
                                 std::to_string(g.gamma) + " exceeds the enumeration cap " +
                                 std::to_string(opts.gamma_cap));
        return;
    }
    for (std::size_t k = 0; k < g.clusters.size(); ++k)
        for (const auto& cluster : g.clusters[k])
            if (static_cast<int>(cluster.size()) > opts.psi_cap)
                throw StructureError("cluster too large: level " + std::to_string(k) +
                                     " holds a cluster of size " +
                                     std::to_string(cluster.size()) + " (cap " +
                                     std::to_string(opts.psi_cap) + ")");
}

SolveResult run_solve(const MdpInstance& inst, const SolveOptions& opts, Algorithm request) {
    if (!(opts.eps > 0.0 && opts.eps < 1.0))
        throw std::invalid_argument("eps must lie in the open interval (0, 1)");
    validate_instance(inst);
    const LayeredGraph g = build_layers(inst);
    const Algorithm route = request == Algorithm::Auto ? resolve_route(g, opts) : request;
    check_route(g, opts, route);

    SolveResult res;
    res.stats.route = route;
    res.stats.scheme = route == Algorithm::Limited ? GridScheme::OnePart : GridScheme::ThreePart;
    res.stats.eps = opts.eps;
    res.stats.trimmed = opts.trim;
    res.stats.gamma = g.gamma;
    res.stats.psi_inclusive = g.psi_inclusive;
    res.stats.max_cluster = g.max_cluster_size();

    const TrimResult tr = opts.trim ? trim_umax(inst, g) : no_trim(inst, g);
    res.stats.u_max = tr.u_max;
    if (!tr.feasible) return res;  // no policy fits the budget at all

    const std::vector<ValueGrid> grids =
        build_grids(g.horizon, opts.eps, tr.u_max, res.stats.scheme);
    res.stats.grid_counts.reserve(grids.size());
    for (const ValueGrid& vg : grids) res.stats.grid_counts.push_back(vg.count);

    const DpTable table = build_table(inst, g, tr.allowed, grids, route);
    res.stats.table_cells = table.cells();
    res.stats.cells_per_level = table.cells_by_level();

    auto fetched = fetch_policy(table, g, inst.budget);
    if (!fetched) return res;

    res.status = SolveStatus::Feasible;
    res.policy = std::move(fetched->policy);
    res.report = evaluate_policy(inst, g, res.policy);
    res.stats.demand_index = fetched->demand_index;
    res.value_bar = grids[0].value_of(fetched->demand_index);
    return res;
}

}  // namespace

SolveResult solve_lim(const MdpInstance& inst, const SolveOptions& opts) {
    return run_solve(inst, opts, Algorithm::Limited);
}

SolveResult solve_dis(const MdpInstance& inst, const SolveOptions& opts) {
    return run_solve(inst, opts, Algorithm::Disjoint);
}

SolveResult solve_local(const MdpInstance& inst, const SolveOptions& opts) {
    return run_solve(inst, opts, Algorithm::Local);
}

SolveResult solve(const MdpInstance& inst, const SolveOptions& opts) {
    return run_solve(inst, opts, opts.algorithm);
}

}  // namespace ccmdp
