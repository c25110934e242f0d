#pragma once

#include <map>
#include <optional>
#include <utility>

namespace ccmdp {

// Non-stationary deterministic policy: action per (step, state index).
// Solvers populate every pair they may visit; evaluation errors out if a
// policy-reachable pair is missing.
struct Policy {
    std::map<std::pair<int, int>, int> at;  // (k, state) -> action

    void set(int k, int s, int a) { at[{k, s}] = a; }

    std::optional<int> get(int k, int s) const {
        auto it = at.find({k, s});
        if (it == at.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const Policy& other) const = default;
};

}  // namespace ccmdp
