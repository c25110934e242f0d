#include "ccmdp/instance.hpp"

#include <algorithm>
#include <cmath>

namespace ccmdp {

int MdpInstance::state_index(const std::string& name) const {
    for (int i = 0; i < num_states(); ++i)
        if (state_names[i] == name) return i;
    return -1;
}

int MdpInstance::action_index(const std::string& name) const {
    for (int i = 0; i < num_actions(); ++i)
        if (action_names[i] == name) return i;
    return -1;
}

namespace {

template <class T>
void resize_grid(std::vector<std::vector<T>>& grid, size_t rows, size_t cols, T fill) {
    grid.resize(rows);
    for (auto& row : grid) row.resize(cols, fill);
}

}  // namespace

int MdpInstance::add_state(const std::string& name, double risk) {
    state_names.push_back(name);
    state_risk.push_back(risk);
    const size_t s = state_names.size(), a = action_names.size();
    resize_grid(declared, s, a, static_cast<char>(0));
    transitions.resize(s);
    transitions.back().resize(a);
    resize_grid(utility, s, a, 0.0);
    resize_grid(action_cost, s, a, 0.0);
    return static_cast<int>(s) - 1;
}

int MdpInstance::add_action(const std::string& name) {
    action_names.push_back(name);
    const size_t s = state_names.size(), a = action_names.size();
    resize_grid(declared, s, a, static_cast<char>(0));
    for (auto& row : transitions) row.resize(a);
    transitions.resize(s);
    resize_grid(utility, s, a, 0.0);
    resize_grid(action_cost, s, a, 0.0);
    return static_cast<int>(a) - 1;
}

void MdpInstance::declare(int s, int a) { declared[s][a] = 1; }

void MdpInstance::add_transition(int s, int a, int succ, double prob) {
    declared[s][a] = 1;
    auto& list = transitions[s][a];
    auto pos = std::lower_bound(list.begin(), list.end(), succ,
                                [](const Outcome& o, int v) { return o.state < v; });
    list.insert(pos, Outcome{succ, prob});
}

void MdpInstance::set_utility(int s, int a, double u) { utility[s][a] = u; }
void MdpInstance::set_cost(int s, int a, double c) { action_cost[s][a] = c; }

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

bool finite(double x) { return std::isfinite(x); }

}  // namespace

const MdpInstance& validate_instance(const MdpInstance& inst) {
    const int S = inst.num_states(), A = inst.num_actions();
    if (S < 1) fail("instance has no states");
    if (A < 1) fail("instance has no actions");
    if (inst.horizon < 1) fail("horizon must be at least 1");
    if (inst.initial < 0 || inst.initial >= S) fail("initial state index out of range");

    auto check_names = [](const std::vector<std::string>& names, const char* what) {
        for (size_t i = 0; i < names.size(); ++i) {
            const std::string& n = names[i];
            if (n.empty()) fail(std::string(what) + " name is empty");
            if (n == ".") fail(std::string(what) + " name '.' is reserved");
            for (char c : n)
                if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                    fail(std::string(what) + " name '" + n + "' contains whitespace");
            for (size_t j = i + 1; j < names.size(); ++j)
                if (names[j] == n) fail(std::string("duplicate ") + what + " name '" + n + "'");
        }
    };
    check_names(inst.state_names, "state");
    check_names(inst.action_names, "action");

    if (static_cast<int>(inst.declared.size()) != S || static_cast<int>(inst.transitions.size()) != S ||
        static_cast<int>(inst.utility.size()) != S || static_cast<int>(inst.action_cost.size()) != S ||
        static_cast<int>(inst.state_risk.size()) != S)
        fail("per-state arrays are inconsistently sized");
    for (int s = 0; s < S; ++s)
        if (static_cast<int>(inst.declared[s].size()) != A || static_cast<int>(inst.transitions[s].size()) != A ||
            static_cast<int>(inst.utility[s].size()) != A || static_cast<int>(inst.action_cost[s].size()) != A)
            fail("per-action arrays are inconsistently sized at state '" + inst.state_names[s] + "'");

    for (int s = 0; s < S; ++s) {
        if (!finite(inst.state_risk[s]) || inst.state_risk[s] < 0 || inst.state_risk[s] > 1)
            fail("risk of state '" + inst.state_names[s] + "' outside [0, 1]");
        for (int a = 0; a < A; ++a) {
            const auto& list = inst.transitions[s][a];
            if (!list.empty() && !inst.declared[s][a])
                fail("undeclared transition list at ('" + inst.state_names[s] + "', '" +
                     inst.action_names[a] + "')");
            if (!finite(inst.utility[s][a]) || inst.utility[s][a] < 0)
                fail("utility at ('" + inst.state_names[s] + "', '" + inst.action_names[a] +
                     "') must be finite and non-negative");
            if (!finite(inst.action_cost[s][a]) || inst.action_cost[s][a] < 0)
                fail("cost at ('" + inst.state_names[s] + "', '" + inst.action_names[a] +
                     "') must be finite and non-negative");
            if (list.empty()) continue;
            double sum = 0;
            for (size_t i = 0; i < list.size(); ++i) {
                const Outcome& o = list[i];
                if (o.state < 0 || o.state >= S)
                    fail("successor index out of range at ('" + inst.state_names[s] + "', '" +
                         inst.action_names[a] + "')");
                if (!finite(o.prob) || o.prob <= 0)
                    fail("probability of ('" + inst.state_names[s] + "', '" + inst.action_names[a] +
                         "', '" + inst.state_names[o.state] + "') must be strictly positive");
                if (i > 0 && list[i - 1].state >= o.state)
                    fail("successors of ('" + inst.state_names[s] + "', '" + inst.action_names[a] +
                         "') are not sorted and unique (duplicate entry for '" +
                         inst.state_names[o.state] + "'?)");
                sum += o.prob;
            }
            if (std::abs(sum - 1.0) > kProbSumTol)
                fail("probabilities of ('" + inst.state_names[s] + "', '" + inst.action_names[a] +
                     "') sum to " + std::to_string(sum) + ", expected 1");
        }
    }

    if (!finite(inst.budget) || inst.budget < 0) fail("budget must be finite and non-negative");
    if (inst.mode == Mode::ChanceConstrained && inst.budget > 1)
        fail("chance-constrained budget must lie in [0, 1]");
    return inst;
}

}  // namespace ccmdp
