#include "ccmdp/layered_graph.hpp"

#include <algorithm>
#include <numeric>

namespace ccmdp {

int LayeredGraph::max_cluster_size() const {
    size_t best = 0;
    for (const auto& level : clusters)
        for (const auto& c : level) best = std::max(best, c.size());
    return static_cast<int>(best);
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a), b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

LayeredGraph build_layers(const MdpInstance& inst) {
    const int S = inst.num_states(), h = inst.horizon;
    LayeredGraph g;
    g.horizon = h;
    g.levels.resize(h + 1);
    g.ordinal.assign(h + 1, std::vector<int>(S, -1));
    g.avail.resize(h + 1);
    g.succ.resize(h + 1);
    g.reach.resize(h + 1);
    g.clusters.resize(h + 1);
    g.cluster_of.resize(h + 1);

    // Forward pass: levels and availability.
    std::vector<char> cur(S, 0);
    cur[inst.initial] = 1;
    for (int k = 0; k <= h; ++k) {
        auto& level = g.levels[k];
        for (int s = 0; s < S; ++s)
            if (cur[s]) {
                g.ordinal[k][s] = static_cast<int>(level.size());
                level.push_back(s);
            }
        if (k == h) break;
        const bool last_decision = (k == h - 1);
        std::vector<char> next(S, 0);
        g.avail[k].resize(level.size());
        for (size_t i = 0; i < level.size(); ++i) {
            const int s = level[i];
            for (int a = 0; a < inst.num_actions(); ++a) {
                if (!inst.declared[s][a]) continue;
                const auto& list = inst.transitions[s][a];
                if (list.empty() && !last_decision) continue;
                g.avail[k][i].push_back(a);
                for (const Outcome& o : list) next[o.state] = 1;
            }
        }
        cur.swap(next);
    }

    // Successor lists remapped to ordinals.
    for (int k = 0; k < h; ++k) {
        g.succ[k].resize(g.levels[k].size());
        for (size_t i = 0; i < g.levels[k].size(); ++i) {
            const int s = g.levels[k][i];
            g.succ[k][i].resize(g.avail[k][i].size());
            for (size_t j = 0; j < g.avail[k][i].size(); ++j) {
                const int a = g.avail[k][i][j];
                auto& out = g.succ[k][i][j];
                out.reserve(inst.transitions[s][a].size());
                for (const Outcome& o : inst.transitions[s][a])
                    out.push_back(Outcome{g.ordinal[k + 1][o.state], o.prob});
                g.gamma = std::max(g.gamma, static_cast<int>(out.size()));
            }
        }
    }

    // Backward pass: reach sets over level-h ordinals.
    const size_t leaves = g.levels[h].size();
    g.reach[h].resize(leaves);
    for (size_t i = 0; i < leaves; ++i) {
        g.reach[h][i].resize(leaves);
        g.reach[h][i].set(i);
    }
    for (int k = h - 1; k >= 0; --k) {
        g.reach[k].assign(g.levels[k].size(), boost::dynamic_bitset<>(leaves));
        for (size_t i = 0; i < g.levels[k].size(); ++i)
            for (const auto& outcomes : g.succ[k][i])
                for (const Outcome& o : outcomes) g.reach[k][i] |= g.reach[k + 1][o.state];
    }

    // Locality: pairwise reach intersections within each level.
    for (int k = 0; k <= h; ++k) {
        const int n = static_cast<int>(g.levels[k].size());
        UnionFind uf(n);
        std::vector<int> count(n, 0);
        for (int i = 0; i < n; ++i) {
            if (g.reach[k][i].any()) count[i] += 1;  // self
            for (int j = i + 1; j < n; ++j)
                if (g.reach[k][i].intersects(g.reach[k][j])) {
                    count[i] += 1;
                    count[j] += 1;
                    uf.unite(i, j);
                }
        }
        for (int i = 0; i < n; ++i) {
            g.psi_inclusive = std::max(g.psi_inclusive, count[i]);
            g.psi_exclusive = std::max(g.psi_exclusive, count[i] - (g.reach[k][i].any() ? 1 : 0));
        }
        std::vector<int> root_to_cluster(n, -1);
        g.cluster_of[k].assign(n, -1);
        for (int i = 0; i < n; ++i) {
            const int r = uf.find(i);
            if (root_to_cluster[r] < 0) {
                root_to_cluster[r] = static_cast<int>(g.clusters[k].size());
                g.clusters[k].emplace_back();
            }
            g.cluster_of[k][i] = root_to_cluster[r];
            g.clusters[k][root_to_cluster[r]].push_back(i);
        }
    }
    return g;
}

}  // namespace ccmdp
