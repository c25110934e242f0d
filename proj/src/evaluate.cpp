#include "ccmdp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "ccmdp/rng.hpp"

namespace ccmdp {

namespace {

struct Cell {
    double value = 0, er = 0;
    bool done = false;
};

struct Evaluator {
    const MdpInstance& inst;
    const LayeredGraph& g;
    const Policy& policy;
    const bool cc;
    std::vector<std::vector<Cell>> memo;

    Evaluator(const MdpInstance& i, const LayeredGraph& gr, const Policy& p)
        : inst(i), g(gr), policy(p), cc(i.mode == Mode::ChanceConstrained) {
        memo.resize(g.horizon + 1);
        for (int k = 0; k <= g.horizon; ++k) memo[k].resize(g.levels[k].size());
    }

    const Cell& go(int k, int i) {
        Cell& cell = memo[k][i];
        if (cell.done) return cell;
        cell.done = true;
        const int s = g.levels[k][i];
        if (k == g.horizon) {
            cell.er = cc ? inst.state_risk[s] : 0.0;
            return cell;
        }
        auto chosen = policy.get(k, s);
        if (!chosen)
            throw ValidationError("policy undefined at ('" + inst.state_names[s] + "', step " +
                                  std::to_string(k) + ")");
        const auto& actions = g.avail[k][i];
        auto pos = std::lower_bound(actions.begin(), actions.end(), *chosen);
        if (pos == actions.end() || *pos != *chosen)
            throw ValidationError("policy picks unavailable action '" +
                                  inst.action_names[*chosen] + "' at ('" + inst.state_names[s] +
                                  "', step " + std::to_string(k) + ")");
        const auto& outcomes = g.succ[k][i][pos - actions.begin()];
        cell.value = inst.utility[s][*chosen];
        double acc = 0;
        for (const Outcome& o : outcomes) {
            const Cell& child = go(k + 1, o.state);
            cell.value += o.prob * child.value;
            acc += o.prob * child.er;
        }
        if (cc) {
            const double r = inst.state_risk[s];
            cell.er = r + (1.0 - r) * acc;
        } else {
            cell.er = inst.action_cost[s][*chosen] + acc;
        }
        return cell;
    }
};

}  // namespace

EvalReport evaluate_policy(const MdpInstance& inst, const LayeredGraph& g, const Policy& policy) {
    Evaluator ev(inst, g, policy);
    const Cell& root = ev.go(0, 0);
    EvalReport rep;
    rep.value = root.value;
    rep.risk_or_cost = root.er;
    rep.feasible = rep.risk_or_cost <= inst.budget + kFeasibilitySlack;
    return rep;
}

namespace {

constexpr std::int64_t kChunk = 1024;

// Accumulated failure count (CC) or cost sum (C) over one chunk of runs.
double run_chunk(const MdpInstance& inst, const Policy& policy, std::int64_t runs,
                 std::uint64_t chunk_seed) {
    Rng rng(chunk_seed);
    const bool cc = inst.mode == Mode::ChanceConstrained;
    double acc = 0;
    for (std::int64_t n = 0; n < runs; ++n) {
        int s = inst.initial;
        double cost = 0;
        bool failed = false;
        for (int k = 0; k <= inst.horizon; ++k) {
            if (cc) {
                if (rng.uniform() < inst.state_risk[s]) {
                    failed = true;
                    break;
                }
            }
            if (k == inst.horizon) break;
            auto a = policy.get(k, s);
            if (!a)
                throw ValidationError("policy undefined at ('" + inst.state_names[s] +
                                      "', step " + std::to_string(k) + ")");
            if (!cc) cost += inst.action_cost[s][*a];
            const auto& list = inst.transitions[s][*a];
            if (list.empty()) break;  // terminal action at the final decision step
            double u = rng.uniform(), cum = 0;
            s = list.back().state;
            for (const Outcome& o : list) {
                cum += o.prob;
                if (u < cum) {
                    s = o.state;
                    break;
                }
            }
        }
        acc += cc ? (failed ? 1.0 : 0.0) : cost;
    }
    return acc;
}

}  // namespace

double simulate_risk(const MdpInstance& inst, const Policy& policy, std::int64_t n_samples,
                     std::uint64_t seed, int threads) {
    if (n_samples <= 0) throw std::invalid_argument("n_samples must be positive");
    const std::int64_t chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    const int workers =
        static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, chunks)));
    auto work = [&](int w) {
        for (std::int64_t c = w; c < chunks; c += workers) {
            const std::int64_t runs = std::min(kChunk, n_samples - c * kChunk);
            partial[c] = run_chunk(inst, policy, runs, splitmix64(seed + 0x9e3779b97f4a7c15ULL * c));
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    double total = 0;
    for (double p : partial) total += p;  // fixed chunk order keeps sums reproducible
    return total / static_cast<double>(n_samples);
}

}  // namespace ccmdp
