#include "ccmdp/generate.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "ccmdp/errors.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/rng.hpp"

namespace ccmdp {

namespace {

struct LevelPlan {
  std::vector<int> cluster_size;            // per cluster
  std::vector<int> parent_cluster;          // per cluster, index on level k-1
  std::vector<int> first_state;             // per cluster, level-local state id
  int n_states = 0;
};

void check_params(const LayeredParams& p) {
  if (p.n_states_per_level < 1) throw std::invalid_argument("n_states_per_level must be >= 1");
  if (p.n_actions < 1) throw std::invalid_argument("n_actions must be >= 1");
  if (p.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (p.gamma_target < 1) throw std::invalid_argument("gamma_target must be >= 1");
  if (p.cluster_target < 1) throw std::invalid_argument("cluster_target must be >= 1");
  if (p.cluster_target > p.n_states_per_level) {
    throw std::invalid_argument("cluster_target cannot exceed n_states_per_level");
  }
  if (p.cluster_target >= 2 && p.horizon < 2) {
    throw std::invalid_argument("cluster_target >= 2 needs horizon >= 2");
  }
  if (!(p.risk_lo <= p.risk_hi) || p.risk_lo < 0.0) {
    throw std::invalid_argument("bad risk range");
  }
  if (p.mode == Mode::ChanceConstrained && p.risk_hi > 1.0) {
    throw std::invalid_argument("risks must stay within [0, 1]");
  }
  if (!(p.utility_lo <= p.utility_hi) || p.utility_lo < 0.0) {
    throw std::invalid_argument("bad utility range");
  }
  if (p.budget < 0.0) throw std::invalid_argument("budget must be >= 0");
  if (p.mode == Mode::ChanceConstrained && p.budget > 1.0) {
    throw std::invalid_argument("chance-constrained budget must be <= 1");
  }
}

int pick(Rng& rng, int lo, int hi) { return rng.uniform_int(lo, hi); }

// Plans cluster counts and sizes for one level.  Returns false when the
// requested structure cannot fit.
bool plan_level(const LayeredParams& p, Rng& rng, int k, int prev_clusters,
                int prev_states, LevelPlan& plan) {
  const int psi = p.cluster_target;
  // The previous level can wire at most one successor per (state, action,
  // branch) slot, so wider levels would leave unreachable states.
  const int n_max =
      std::min(p.n_states_per_level, prev_states * p.n_actions * p.gamma_target);
  std::vector<int> sizes;
  if (k == p.horizon || psi == 1) {
    if (prev_clusters > n_max) return false;
    int m = pick(rng, prev_clusters, n_max);
    sizes.assign(m, 1);
  } else {
    // Reserve room for one cluster of exactly psi states; let the cluster
    // count grow by at most one per level so later levels keep fitting.
    int m_lo = prev_clusters + psi - 1;
    if (m_lo > n_max) return false;
    int m = pick(rng, m_lo, n_max);
    int c_hi = std::min(m - psi + 1, prev_clusters + 1);
    if (c_hi < prev_clusters) return false;
    int c = pick(rng, prev_clusters, c_hi);
    sizes.assign(c, 1);
    sizes[0] = psi;
    int extra = m - psi - (c - 1);
    for (int e = 0; e < extra; ++e) {
      std::vector<int> open;
      for (int i = 1; i < c; ++i) {
        if (sizes[i] < psi) open.push_back(i);
      }
      if (open.empty()) break;
      ++sizes[open[pick(rng, 0, static_cast<int>(open.size()) - 1)]];
    }
  }

  plan.cluster_size = sizes;
  plan.n_states = 0;
  plan.first_state.clear();
  for (int sz : sizes) {
    plan.first_state.push_back(plan.n_states);
    plan.n_states += sz;
  }

  // Parent assignment: every level-(k-1) cluster gets at least one child.
  int c = static_cast<int>(sizes.size());
  std::vector<int> order(c);
  for (int i = 0; i < c; ++i) order[i] = i;
  for (int i = c - 1; i > 0; --i) std::swap(order[i], order[pick(rng, 0, i)]);

  plan.parent_cluster.assign(c, -1);
  for (int i = 0; i < prev_clusters; ++i) plan.parent_cluster[order[i]] = i;
  for (int i = prev_clusters; i < c; ++i) {
    plan.parent_cluster[order[i]] = pick(rng, 0, prev_clusters - 1);
  }
  return true;
}

bool try_generate(const LayeredParams& p, Rng& rng, MdpInstance& out) {
  const int h = p.horizon;
  const int A = p.n_actions;

  std::vector<LevelPlan> plans(h + 1);
  plans[0].cluster_size = {1};
  plans[0].first_state = {0};
  plans[0].n_states = 1;
  plans[0].parent_cluster = {};
  for (int k = 1; k <= h; ++k) {
    if (!plan_level(p, rng, k, static_cast<int>(plans[k - 1].cluster_size.size()),
                    plans[k - 1].n_states, plans[k])) {
      return false;
    }
  }

  MdpInstance inst;
  std::vector<std::vector<int>> state_id(h + 1);
  for (int k = 0; k <= h; ++k) {
    state_id[k].resize(plans[k].n_states);
    for (int i = 0; i < plans[k].n_states; ++i) {
      state_id[k][i] = inst.add_state("s" + std::to_string(k) + "_" + std::to_string(i));
    }
  }
  for (int a = 0; a < A; ++a) inst.add_action("a" + std::to_string(a));

  // Wire each level-k cluster to the pool formed by its child clusters.
  for (int k = 0; k < h; ++k) {
    const LevelPlan& cur = plans[k];
    const LevelPlan& nxt = plans[k + 1];
    int n_clusters = static_cast<int>(cur.cluster_size.size());
    for (int q = 0; q < n_clusters; ++q) {
      std::vector<int> members;  // level-local ids at level k
      for (int i = 0; i < cur.cluster_size[q]; ++i) {
        members.push_back(cur.first_state[q] + i);
      }
      std::vector<int> pool;  // level-local ids at level k+1
      for (std::size_t cq = 0; cq < nxt.cluster_size.size(); ++cq) {
        if (nxt.parent_cluster[cq] != q) continue;
        for (int i = 0; i < nxt.cluster_size[cq]; ++i) {
          pool.push_back(nxt.first_state[cq] + i);
        }
      }
      if (pool.empty()) return false;  // cannot happen: one child guaranteed
      std::sort(pool.begin(), pool.end());
      int max_deg = std::min<int>(p.gamma_target, static_cast<int>(pool.size()));

      std::vector<std::vector<int>> degree(members.size(), std::vector<int>(A));
      std::vector<std::vector<std::set<int>>> succ(
          members.size(), std::vector<std::set<int>>(A));
      for (std::size_t mi = 0; mi < members.size(); ++mi) {
        for (int a = 0; a < A; ++a) degree[mi][a] = pick(rng, 1, max_deg);
      }

      std::set<int> covered;
      if (members.size() >= 2) {
        int z = pool[pick(rng, 0, static_cast<int>(pool.size()) - 1)];
        for (std::size_t mi = 0; mi < members.size(); ++mi) succ[mi][0].insert(z);
        covered.insert(z);
      }

      std::vector<int> todo;
      for (int u : pool) {
        if (!covered.count(u)) todo.push_back(u);
      }
      for (int i = static_cast<int>(todo.size()) - 1; i > 0; --i) {
        std::swap(todo[i], todo[pick(rng, 0, i)]);
      }
      for (int u : todo) {
        std::vector<std::pair<int, int>> slots;       // room under drawn degree
        std::vector<std::pair<int, int>> expandable;  // room under max degree
        for (std::size_t mi = 0; mi < members.size(); ++mi) {
          for (int a = 0; a < A; ++a) {
            if (succ[mi][a].count(u)) continue;
            int sz = static_cast<int>(succ[mi][a].size());
            if (sz < degree[mi][a]) slots.emplace_back(static_cast<int>(mi), a);
            if (sz < max_deg) expandable.emplace_back(static_cast<int>(mi), a);
          }
        }
        std::pair<int, int> slot;
        if (!slots.empty()) {
          slot = slots[pick(rng, 0, static_cast<int>(slots.size()) - 1)];
        } else if (!expandable.empty()) {
          slot = expandable[pick(rng, 0, static_cast<int>(expandable.size()) - 1)];
          degree[slot.first][slot.second] =
              static_cast<int>(succ[slot.first][slot.second].size()) + 1;
        } else {
          return false;  // pool too large for |members| * A * gamma slots
        }
        succ[slot.first][slot.second].insert(u);
      }

      for (std::size_t mi = 0; mi < members.size(); ++mi) {
        for (int a = 0; a < A; ++a) {
          while (static_cast<int>(succ[mi][a].size()) < degree[mi][a]) {
            std::vector<int> rest;
            for (int u : pool) {
              if (!succ[mi][a].count(u)) rest.push_back(u);
            }
            if (rest.empty()) break;
            succ[mi][a].insert(rest[pick(rng, 0, static_cast<int>(rest.size()) - 1)]);
          }
          std::vector<double> w;
          for (std::size_t j = 0; j < succ[mi][a].size(); ++j) {
            w.push_back(rng.uniform(0.2, 1.0));
          }
          double total = 0.0;
          for (double x : w) total += x;
          int j = 0;
          for (int u : succ[mi][a]) {
            inst.add_transition(state_id[k][members[mi]], a, state_id[k + 1][u],
                                w[j++] / total);
          }
        }
      }
    }
  }

  for (int k = 0; k < h; ++k) {
    for (int i = 0; i < plans[k].n_states; ++i) {
      for (int a = 0; a < A; ++a) {
        inst.set_utility(state_id[k][i], a, rng.uniform(p.utility_lo, p.utility_hi));
      }
    }
  }
  if (p.mode == Mode::ChanceConstrained) {
    for (int k = 0; k <= h; ++k) {
      for (int i = 0; i < plans[k].n_states; ++i) {
        inst.state_risk[state_id[k][i]] = rng.uniform(p.risk_lo, p.risk_hi);
      }
    }
  } else {
    for (int k = 0; k < h; ++k) {
      for (int i = 0; i < plans[k].n_states; ++i) {
        for (int a = 0; a < A; ++a) {
          inst.set_cost(state_id[k][i], a, rng.uniform(p.risk_lo, p.risk_hi));
        }
      }
    }
  }

  inst.initial = state_id[0][0];
  inst.horizon = h;
  inst.budget = p.budget;
  inst.mode = p.mode;

  validate_instance(inst);
  LayeredGraph g = build_layers(inst);
  for (int k = 0; k <= h; ++k) {
    if (static_cast<int>(g.levels[k].size()) != plans[k].n_states) return false;
  }
  if (g.gamma > p.gamma_target) return false;
  if (p.cluster_target == 1) {
    if (g.psi_exclusive != 0) return false;
  } else {
    if (g.psi_inclusive != p.cluster_target) return false;
    if (g.max_cluster_size() != p.cluster_target) return false;
  }
  out = std::move(inst);
  return true;
}

}  // namespace

MdpInstance generate_layered(const LayeredParams& params) {
  check_params(params);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Rng rng(splitmix64(params.seed) + 0x9e3779b97f4a7c15ULL * attempt);
    MdpInstance inst;
    if (try_generate(params, rng, inst)) return inst;
  }
  throw std::runtime_error("generate_layered: could not satisfy structure targets");
}

MdpInstance generate_gridworld(const GridworldParams& p) {
  if (p.width < 1 || p.height < 1) throw std::invalid_argument("grid must be non-empty");
  if (p.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (p.slip < 0.0 || p.slip > 1.0) throw std::invalid_argument("slip must be in [0, 1]");
  if (p.cliff_risk < 0.0 || p.cliff_risk > 1.0) {
    throw std::invalid_argument("cliff_risk must be in [0, 1]");
  }
  if (p.budget < 0.0 || p.budget > 1.0) {
    throw std::invalid_argument("budget must be in [0, 1]");
  }
  auto inside = [&](std::pair<int, int> c) {
    return c.first >= 0 && c.first < p.width && c.second >= 0 && c.second < p.height;
  };
  if (!inside(p.start) || !inside(p.goal)) {
    throw std::invalid_argument("start and goal must lie on the grid");
  }
  for (auto c : p.cliffs) {
    if (!inside(c)) throw std::invalid_argument("cliff cell outside the grid");
  }

  MdpInstance inst;
  auto cell = [&](int x, int y) { return y * p.width + x; };
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      inst.add_state("c" + std::to_string(x) + "_" + std::to_string(y));
    }
  }
  const char* names[4] = {"up", "down", "left", "right"};
  const int dx[4] = {0, 0, -1, 1};
  const int dy[4] = {1, -1, 0, 0};
  for (const char* n : names) inst.add_action(n);

  int goal_id = cell(p.goal.first, p.goal.second);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      int s = cell(x, y);
      for (int a = 0; a < 4; ++a) {
        if (s == goal_id) {
          inst.add_transition(s, a, s, 1.0);
          inst.set_utility(s, a, 1.0);
          continue;
        }
        // Intended move with probability 1-slip, each perpendicular move with
        // slip/2; walls clamp, merging mass onto the clamped cell.
        int perp[2] = {(a < 2) ? 2 : 0, (a < 2) ? 3 : 1};
        std::vector<std::pair<int, double>> mass = {
            {a, 1.0 - p.slip}, {perp[0], p.slip / 2.0}, {perp[1], p.slip / 2.0}};
        std::vector<double> prob(inst.state_names.size(), 0.0);
        for (auto [dir, pr] : mass) {
          if (pr <= 0.0) continue;
          int nx = std::clamp(x + dx[dir], 0, p.width - 1);
          int ny = std::clamp(y + dy[dir], 0, p.height - 1);
          prob[cell(nx, ny)] += pr;
        }
        for (std::size_t t = 0; t < prob.size(); ++t) {
          if (prob[t] > 0.0) inst.add_transition(s, a, static_cast<int>(t), prob[t]);
        }
      }
    }
  }

  for (auto c : p.cliffs) inst.state_risk[cell(c.first, c.second)] = p.cliff_risk;
  inst.initial = cell(p.start.first, p.start.second);
  inst.horizon = p.horizon;
  inst.budget = p.budget;
  inst.mode = Mode::ChanceConstrained;
  validate_instance(inst);
  return inst;
}

}  // namespace ccmdp
