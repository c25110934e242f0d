#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ccmdp/errors.hpp"

namespace ccmdp {

// Multiple-choice minimum knapsack: pick exactly one choice per category so
// that total (rounded) value covers the demand at minimum total weight.

struct KsItem {
    double weight = 0;
    std::vector<double> values;  // one entry per demand dimension
};

struct KnapsackInstance {
    std::vector<std::vector<KsItem>> categories;
    std::vector<double> demand;  // per dimension, >= 0
    double rounding = 1;         // grid step R > 0 for value discretization
};

struct Allocation {
    std::vector<int> chosen;  // choice index per category
    double total_weight = 0;
    // Sum of rounded values per dimension (true values for exact_mcminks).
    std::vector<double> total_rounded_value;
};

// Rounding DP over the value grid {0, R, 2R, ...}: guarantees total weight no
// worse than the optimum of the rounded cover and true value within
// n * rounding of the demanded level.  Scalar (one-dimensional) demand only.
Allocation solve_mcminks(const KnapsackInstance& inst);

// Multi-dimensional variant; a separate table implementation over joint demand
// grids.  With one dimension it reproduces solve_mcminks bit for bit.
Allocation solve_mmcminks(const KnapsackInstance& inst, int dim_cap = 3);

inline constexpr std::int64_t kExactEnumCap = 1000000;

// Reference solver by full enumeration on true (unrounded) values; scalar
// instances only.  Ties broken by lexicographically smallest choice vector.
Allocation exact_mcminks(const KnapsackInstance& inst, std::int64_t enum_cap = kExactEnumCap);

// ---------------------------------------------------------------------------
// Index-space engines shared with the solvers.  Values live on an implicit
// uniform grid: a choice carries its value as a grid index, the demand arrives
// as a grid index, and no floating-point value arithmetic happens inside.

// Smallest grid index whose point is >= x (guarded so float noise just below
// or above a point snaps onto it); 0 for x <= 0.  Unclamped.
std::int64_t cover_index(double x, double step);

class ScalarCoverTable {
  public:
    struct Choice {
        double weight = 0;
        std::int64_t vidx = 0;  // value as a grid index, >= 0
        int orig = 0;           // caller's choice id, ascending within a category
    };

    // Builds min-weight covers for every demand index in 0..cap.  A category
    // with no choices makes everything unsatisfiable.
    ScalarCoverTable(std::int64_t cap, std::vector<std::vector<Choice>> categories);

    std::int64_t cap() const { return cap_; }
    std::optional<double> weight_at(std::int64_t rho) const;
    // Chosen orig ids per category, or nullopt if rho is not coverable.
    std::optional<std::vector<int>> backtrack(std::int64_t rho) const;

  private:
    std::int64_t cap_;
    std::vector<std::vector<Choice>> cats_;     // pruned: one choice per distinct vidx
    std::vector<std::vector<std::uint16_t>> alc_;  // [category][rho] pruned choice or 0xFFFF
    std::vector<double> final_weight_;
    std::vector<char> final_ok_;
};

class VectorCoverTable {
  public:
    struct Choice {
        double weight = 0;
        std::vector<std::int64_t> vidx;  // one grid index per dimension
        int orig = 0;
    };

    VectorCoverTable(std::vector<std::int64_t> caps, std::vector<std::vector<Choice>> categories);

    const std::vector<std::int64_t>& caps() const { return caps_; }
    std::optional<double> weight_at(const std::vector<std::int64_t>& rho) const;
    std::optional<std::vector<int>> backtrack(const std::vector<std::int64_t>& rho) const;

  private:
    std::int64_t cell_of(const std::vector<std::int64_t>& rho) const;

    std::vector<std::int64_t> caps_, strides_;
    std::int64_t cells_ = 1;
    std::vector<std::vector<Choice>> cats_;
    std::vector<std::vector<std::uint16_t>> alc_;
    std::vector<double> final_weight_;
    std::vector<char> final_ok_;
};

}  // namespace ccmdp
