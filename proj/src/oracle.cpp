#include "ccmdp/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ccmdp/errors.hpp"

namespace ccmdp {

namespace {

struct Search {
  const MdpInstance& inst;
  const LayeredGraph& g;
  const std::vector<std::vector<std::vector<int>>>& allowed;
  bool cc = true;

  OracleResult result;
  bool has_best = false;
  std::vector<std::tuple<int, int, int>> trail;  // (step, state, action)

  // reached: ordinals at level k with positive probability, ascending.
  // p: visit probability per reached entry; w (CC only): probability of
  // reaching the entry with no failure drawn so far.
  void dfs(int k, const std::vector<int>& reached, const std::vector<double>& p,
           const std::vector<double>& w, double value_acc, double er_acc) {
    if (k == g.horizon) {
      double er = er_acc;
      if (cc) {
        double surv = er_acc;  // survival mass of runs stopped by terminal actions
        for (std::size_t j = 0; j < reached.size(); ++j) {
          surv += w[j] * (1.0 - inst.state_risk[g.state_at(k, reached[j])]);
        }
        er = 1.0 - surv;
      }
      ++result.total_count;
      if (er <= inst.budget + kFeasibilitySlack) {
        ++result.feasible_count;
        if (!has_best || value_acc > result.optimal_value) {
          has_best = true;
          result.optimal_value = value_acc;
          Policy pol;
          for (const auto& [kk, s, a] : trail) pol.set(kk, s, a);
          result.optimal_policy = std::move(pol);
        }
      }
      return;
    }

    // Odometer over one action choice per reached state, earlier states most
    // significant, so complete assignments appear in lexicographic order and
    // the first best found is the lexicographically smallest.
    std::vector<int> pick(reached.size(), 0);
    for (int j : reached) {
      if (allowed[k][j].empty()) return;  // no defined policy through here
    }
    const int next_n = (k + 1 <= g.horizon) ? static_cast<int>(g.levels[k + 1].size()) : 0;
    std::vector<double> pn(next_n), wn(next_n);
    for (;;) {
      std::fill(pn.begin(), pn.end(), 0.0);
      std::fill(wn.begin(), wn.end(), 0.0);
      double value_add = 0.0;
      double er_add = 0.0;
      std::size_t trail_base = trail.size();
      for (std::size_t j = 0; j < reached.size(); ++j) {
        int i = reached[j];
        int ai = allowed[k][i][pick[j]];
        int s = g.state_at(k, i);
        // allowed action indices are positions into the instance action set;
        // find the matching successor list via the avail position.
        const auto& av = g.avail[k][i];
        std::size_t pos = std::lower_bound(av.begin(), av.end(), ai) - av.begin();
        const auto& outs = g.succ[k][i][pos];
        trail.emplace_back(k, s, ai);
        value_add += p[j] * inst.utility[s][ai];
        if (cc) {
          double alive = w[j] * (1.0 - inst.state_risk[s]);
          if (outs.empty()) {
            er_add += alive;  // stopped runs survive unless they failed here
          } else {
            for (const Outcome& o : outs) {
              pn[o.state] += p[j] * o.prob;
              wn[o.state] += alive * o.prob;
            }
          }
        } else {
          er_add += p[j] * inst.action_cost[s][ai];
          for (const Outcome& o : outs) pn[o.state] += p[j] * o.prob;
        }
      }
      std::vector<int> next_reached;
      std::vector<double> next_p, next_w;
      for (int i = 0; i < next_n; ++i) {
        if (pn[i] > 0.0) {
          next_reached.push_back(i);
          next_p.push_back(pn[i]);
          next_w.push_back(wn[i]);
        }
      }
      dfs(k + 1, next_reached, next_p, next_w, value_acc + value_add, er_acc + er_add);
      trail.resize(trail_base);

      int pos = static_cast<int>(reached.size()) - 1;
      while (pos >= 0 &&
             pick[pos] + 1 >= static_cast<int>(allowed[k][reached[pos]].size())) {
        pick[pos--] = 0;
      }
      if (pos < 0) break;
      ++pick[pos];
    }
  }
};

}  // namespace

OracleResult enumerate_optimal(const MdpInstance& inst, double product_cap,
                               const std::vector<std::vector<std::vector<int>>>* allowed) {
  validate_instance(inst);
  LayeredGraph g = build_layers(inst);
  const auto& acts = allowed ? *allowed : g.avail;
  if (allowed) {
    // Restrictions may cover just the decision levels 0..h-1 or all levels.
    if (acts.size() != g.avail.size() &&
        acts.size() != static_cast<std::size_t>(g.horizon)) {
      throw std::invalid_argument("allowed sets do not match the layered graph");
    }
    for (int k = 0; k < g.horizon; ++k) {
      if (acts[k].size() != g.avail[k].size()) {
        throw std::invalid_argument("allowed sets do not match the layered graph");
      }
      for (std::size_t i = 0; i < acts[k].size(); ++i) {
        for (int a : acts[k][i]) {
          if (!std::binary_search(g.avail[k][i].begin(), g.avail[k][i].end(), a)) {
            throw std::invalid_argument("allowed action is not available");
          }
        }
      }
    }
  }

  double bound = 1.0;
  for (int k = 0; k < g.horizon; ++k) {
    for (std::size_t i = 0; i < acts[k].size(); ++i) {
      bound *= std::max<std::size_t>(1, acts[k][i].size());
      if (bound > product_cap) {
        throw SizeError("instance too large for exact policy enumeration");
      }
    }
  }

  Search search{inst, g, acts, inst.mode == Mode::ChanceConstrained, {}, false, {}};
  search.dfs(0, {0}, {1.0}, {1.0}, 0.0, 0.0);
  return search.result;
}

double unconstrained_value(const MdpInstance& inst) {
  validate_instance(inst);
  LayeredGraph g = build_layers(inst);
  std::vector<std::vector<std::optional<double>>> v(g.horizon + 1);
  v[g.horizon].assign(g.levels[g.horizon].size(), 0.0);
  for (int k = g.horizon - 1; k >= 0; --k) {
    v[k].assign(g.levels[k].size(), std::nullopt);
    for (std::size_t i = 0; i < g.levels[k].size(); ++i) {
      int s = g.state_at(k, static_cast<int>(i));
      for (std::size_t pos = 0; pos < g.avail[k][i].size(); ++pos) {
        int a = g.avail[k][i][pos];
        double q = inst.utility[s][a];
        bool ok = true;
        for (const Outcome& o : g.succ[k][i][pos]) {
          if (!v[k + 1][o.state]) {
            ok = false;
            break;
          }
          q += o.prob * *v[k + 1][o.state];
        }
        if (ok && (!v[k][i] || q > *v[k][i])) v[k][i] = q;
      }
    }
  }
  if (!v[0][0]) throw StructureError("no everywhere-defined policy exists");
  return *v[0][0];
}

SspResult ssp_solve(const MdpInstance& base, int goal_state, double threshold,
                    int max_horizon, const SolveCallback& solve) {
  if (goal_state < 0 || goal_state >= static_cast<int>(base.state_names.size())) {
    throw std::invalid_argument("goal_state out of range");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must be in (0, 1]");
  }
  if (max_horizon < 1) throw std::invalid_argument("max_horizon must be >= 1");

  const int n = static_cast<int>(base.state_names.size());
  const int n_actions = static_cast<int>(base.action_names.size());
  for (int h = 1; h <= max_horizon; ++h) {
    MdpInstance ti;
    std::vector<std::vector<int>> id(h + 1, std::vector<int>(n));
    for (int k = 0; k <= h; ++k) {
      for (int s = 0; s < n; ++s) {
        id[k][s] = ti.add_state(base.state_names[s] + "@" + std::to_string(k));
      }
    }
    for (int a = 0; a < n_actions; ++a) ti.add_action(base.action_names[a]);
    for (int k = 0; k < h; ++k) {
      for (int a = 0; a < n_actions; ++a) {
        ti.add_transition(id[k][goal_state], a, id[k + 1][goal_state], 1.0);
      }
      for (int s = 0; s < n; ++s) {
        if (s == goal_state) continue;
        for (int a = 0; a < n_actions; ++a) {
          if (!base.declared[s][a] || base.transitions[s][a].empty()) continue;
          for (const Outcome& o : base.transitions[s][a]) {
            ti.add_transition(id[k][s], a, id[k + 1][o.state], o.prob);
          }
        }
      }
    }
    for (int s = 0; s < n; ++s) {
      if (s != goal_state) ti.state_risk[id[h][s]] = 1.0;
    }
    ti.initial = id[0][base.initial];
    ti.horizon = h;
    ti.budget = 1.0 - threshold;
    ti.mode = Mode::ChanceConstrained;
    validate_instance(ti);
    if (std::optional<Policy> pol = solve(ti)) {
      return SspResult{h, std::move(*pol), std::move(ti)};
    }
  }
  throw std::runtime_error("goal not reachable with the required probability within " +
                           std::to_string(max_horizon) + " steps");
}

}  // namespace ccmdp
