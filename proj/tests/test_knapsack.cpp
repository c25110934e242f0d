#include <doctest.h>

#include <cmath>

#include "ccmdp/knapsack.hpp"
#include "ccmdp/rng.hpp"

using namespace ccmdp;

namespace {

KnapsackInstance scalar_inst(std::vector<std::vector<std::pair<double, double>>> cats, double D,
                             double R) {
    KnapsackInstance inst;
    for (auto& cat : cats) {
        std::vector<KsItem> items;
        for (auto& [w, v] : cat) items.push_back({w, {v}});
        inst.categories.push_back(std::move(items));
    }
    inst.demand = {D};
    inst.rounding = R;
    return inst;
}

double true_value(const KnapsackInstance& inst, const Allocation& alloc, size_t dim = 0) {
    double v = 0;
    for (size_t i = 0; i < alloc.chosen.size(); ++i)
        v += inst.categories[i][alloc.chosen[i]].values[dim];
    return v;
}

}  // namespace

TEST_CASE("two-category cover: rounding DP vs exact enumeration") {
    auto inst = scalar_inst({{{1, 5}, {3, 9}}, {{2, 4}, {4, 8}}}, 12, 1);

    auto dp = solve_mcminks(inst);
    CHECK(dp.total_weight == 5.0);
    CHECK(dp.chosen == std::vector<int>{1, 0});  // backtrack tie picks the later category first
    CHECK(dp.total_rounded_value == std::vector<double>{13.0});

    auto exact = exact_mcminks(inst);
    CHECK(exact.total_weight == 5.0);
    CHECK(exact.chosen == std::vector<int>{0, 1});  // global lexicographic tie rule
    CHECK(true_value(inst, exact) == 13.0);

    CHECK(dp.total_weight <= exact.total_weight);
    CHECK(true_value(inst, dp) >= true_value(inst, exact) - 2 * inst.rounding);

    inst.demand[0] = 18;  // total value tops out at 17
    CHECK_THROWS_AS(solve_mcminks(inst), DemandUnsatisfiableError);
    CHECK_THROWS_AS(exact_mcminks(inst), DemandUnsatisfiableError);
}

TEST_CASE("off-grid values can make the rounded answer heavier than exact") {
    auto inst = scalar_inst({{{1, 2}, {2, 5}, {5, 9}}, {{0, 0}, {2, 4}, {4, 8}}}, 9, 2);
    auto dp = solve_mcminks(inst);
    CHECK(dp.total_weight == 5.0);
    CHECK(dp.chosen == std::vector<int>{0, 2});
    CHECK(dp.total_rounded_value == std::vector<double>{10.0});
    CHECK(true_value(inst, dp) == 10.0);
    auto exact = exact_mcminks(inst);
    CHECK(exact.total_weight == 4.0);  // (5,4) covers 9 exactly but 5 rounds down to 4
    CHECK(exact.chosen == std::vector<int>{1, 1});
}

TEST_CASE("zero demand asks for the lightest allocation") {
    auto inst = scalar_inst({{{3, 1}, {1, 9}}, {{2, 0}, {5, 9}}}, 0, 1);
    auto dp = solve_mcminks(inst);
    CHECK(dp.total_weight == 3.0);
    CHECK(dp.chosen == std::vector<int>{1, 0});
    auto exact = exact_mcminks(inst);
    CHECK(exact.chosen == std::vector<int>{1, 0});
    CHECK(exact.total_weight == 3.0);
}

TEST_CASE("exact tie-breaking is lexicographic") {
    auto inst = scalar_inst({{{1, 0}, {1, 5}}, {{1, 0}, {1, 5}}}, 0, 1);
    CHECK(exact_mcminks(inst).chosen == std::vector<int>{0, 0});
}

TEST_CASE("no categories at all") {
    KnapsackInstance inst;
    inst.demand = {0};
    inst.rounding = 1;
    auto dp = solve_mcminks(inst);
    CHECK(dp.chosen.empty());
    CHECK(dp.total_weight == 0.0);
    inst.demand = {0.5};
    CHECK_THROWS_AS(solve_mcminks(inst), DemandUnsatisfiableError);
}

TEST_CASE("argument validation") {
    auto good = scalar_inst({{{1, 1}}}, 1, 1);
    SUBCASE("bad rounding") {
        good.rounding = 0;
        CHECK_THROWS_AS(solve_mcminks(good), std::invalid_argument);
    }
    SUBCASE("negative demand") {
        good.demand = {-1};
        CHECK_THROWS_AS(solve_mcminks(good), std::invalid_argument);
    }
    SUBCASE("negative weight") {
        good.categories[0][0].weight = -1;
        CHECK_THROWS_AS(solve_mcminks(good), std::invalid_argument);
    }
    SUBCASE("empty category") {
        good.categories.push_back({});
        CHECK_THROWS_AS(solve_mcminks(good), std::invalid_argument);
    }
    SUBCASE("dimension mismatch") {
        good.categories[0][0].values = {1, 2};
        CHECK_THROWS_AS(solve_mcminks(good), std::invalid_argument);
    }
    SUBCASE("vector demand into scalar solvers") {
        good.demand = {1, 1};
        good.categories[0][0].values = {1, 2};
        CHECK_THROWS_AS(solve_mcminks(good), std::invalid_argument);
        CHECK_THROWS_AS(exact_mcminks(good), std::invalid_argument);
    }
    SUBCASE("dimension cap") {
        KnapsackInstance inst;
        inst.categories = {{KsItem{1, {1, 1, 1, 1}}}};
        inst.demand = {1, 1, 1, 1};
        inst.rounding = 1;
        CHECK_THROWS_AS(solve_mmcminks(inst), SizeError);
        CHECK_NOTHROW(solve_mmcminks(inst, 4));
    }
    SUBCASE("exact enumeration guard") {
        auto inst = scalar_inst({{{1, 1}, {1, 2}, {1, 3}, {1, 4}}, {{1, 1}, {1, 2}, {1, 3}}}, 1, 1);
        CHECK_THROWS_AS(exact_mcminks(inst, 10), SizeError);
    }
}

TEST_CASE("two-dimensional cover") {
    KnapsackInstance inst;
    inst.categories = {{KsItem{2, {5, 5}}, KsItem{1, {5, 0}}, KsItem{1, {0, 5}}}};
    inst.demand = {5, 5};
    inst.rounding = 1;
    auto alloc = solve_mmcminks(inst);
    CHECK(alloc.chosen == std::vector<int>{0});
    CHECK(alloc.total_weight == 2.0);
    CHECK(alloc.total_rounded_value == std::vector<double>{5.0, 5.0});

    SUBCASE("unsatisfiable dimension") {
        inst.categories = {{KsItem{1, {0, 3}}, KsItem{2, {0, 7}}}};
        inst.demand = {4, 0};
        CHECK_THROWS_AS(solve_mmcminks(inst), DemandUnsatisfiableError);
    }
}

namespace {

KnapsackInstance random_lattice(Rng& rng, double R, bool lattice_values = true) {
    KnapsackInstance inst;
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    for (int i = 0; i < n; ++i) {
        std::vector<KsItem> cat;
        const int m = static_cast<int>(rng.uniform_int(1, 5));
        for (int j = 0; j < m; ++j) {
            const double v = lattice_values
                                 ? R * static_cast<double>(rng.uniform_int(
                                           0, static_cast<std::int64_t>(10 / R)))
                                 : rng.uniform(0, 10);
            cat.push_back({rng.uniform(0, 10), {v}});
        }
        inst.categories.push_back(std::move(cat));
    }
    double reachable = 0;
    for (auto& cat : inst.categories) {
        double m = 0;
        for (auto& item : cat) m = std::max(m, item.values[0]);
        reachable += m;
    }
    inst.demand = {rng.uniform(0, reachable * 1.2)};
    inst.rounding = R;
    return inst;
}

}  // namespace

TEST_CASE("rounding DP against exact enumeration on grid-valued batches") {
    int feasible = 0, unsat = 0;
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        Rng rng(seed * 1000003);
        const double R = seed % 2 ? 0.25 : 1.0;
        auto inst = random_lattice(rng, R);
        const auto n = static_cast<double>(inst.categories.size());
        bool exact_ok = true;
        Allocation exact;
        try {
            exact = exact_mcminks(inst);
        } catch (const DemandUnsatisfiableError&) {
            exact_ok = false;
        }
        if (!exact_ok) {
            // On-grid values make the rounded cover equivalent: both must agree
            // that the demand is out of reach.
            CHECK_THROWS_AS(solve_mcminks(inst), DemandUnsatisfiableError);
            ++unsat;
            continue;
        }
        ++feasible;
        auto dp = solve_mcminks(inst);
        CHECK(dp.total_weight <= exact.total_weight);
        CHECK(true_value(inst, dp) >= true_value(inst, exact) - n * R);
        CHECK(true_value(inst, dp) >= inst.demand[0]);  // returned cover is truly feasible
    }
    CHECK(feasible > 30);
    CHECK(unsat > 5);
}

TEST_CASE("one-dimensional vector solver is bit-identical to the scalar one") {
    for (std::uint64_t seed = 500; seed < 550; ++seed) {
        Rng rng(seed);
        auto inst = random_lattice(rng, seed % 2 ? 0.25 : 1.0, seed % 3 == 0);
        Allocation a, b;
        bool ua = false, ub = false;
        try {
            a = solve_mcminks(inst);
        } catch (const DemandUnsatisfiableError&) {
            ua = true;
        }
        try {
            b = solve_mmcminks(inst);
        } catch (const DemandUnsatisfiableError&) {
            ub = true;
        }
        REQUIRE(ua == ub);
        if (ua) continue;
        CHECK(a.chosen == b.chosen);
        CHECK(a.total_weight == b.total_weight);  // exact double equality
        CHECK(a.total_rounded_value == b.total_rounded_value);
    }
}

TEST_CASE("weight is monotone in the demand") {
    Rng rng(42);
    auto inst = random_lattice(rng, 0.25);
    double reachable = 0;
    for (auto& cat : inst.categories) {
        double m = 0;
        for (auto& item : cat) m = std::max(m, item.values[0]);
        reachable += m;
    }
    double prev = -1;
    for (double D = 0; D <= reachable; D += reachable / 37) {
        inst.demand = {D};
        const double w = solve_mcminks(inst).total_weight;
        CHECK(w >= prev);
        prev = w;
    }
}

TEST_CASE("cover table rows are monotone in the demand index") {
    std::vector<std::vector<ScalarCoverTable::Choice>> cats = {
        {{1.5, 0, 0}, {2.0, 2, 1}, {4.0, 5, 2}},
        {{0.5, 1, 0}, {3.0, 4, 1}},
    };
    ScalarCoverTable table(9, cats);
    double prev = 0;
    for (std::int64_t rho = 0; rho <= 9; ++rho) {
        auto w = table.weight_at(rho);
        REQUIRE(w.has_value());
        CHECK(*w >= prev);
        prev = *w;
    }
    CHECK(!table.weight_at(10).has_value());
    auto chosen = table.backtrack(9);
    REQUIRE(chosen.has_value());
    // vidx 5 + 4 = 9 is the only cover of the full range.
    CHECK(*chosen == std::vector<int>{2, 1});
}
