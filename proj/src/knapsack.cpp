#include "ccmdp/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ccmdp/grids.hpp"

namespace ccmdp {

std::int64_t cover_index(double x, double step) {
    if (step <= 0 || x <= 0) return 0;
    const double q = x / step;
    const std::int64_t f = guarded_floor_div(x, step);
    return (q - static_cast<double>(f)) <= kGridGuard * std::max(1.0, q) ? f : f + 1;
}

namespace {

constexpr std::uint16_t kUnset = 0xFFFF;
constexpr std::int64_t kCellGuard = 100000000;  // defensive table-size ceiling

[[noreturn]] void too_big(const char* what) { throw SizeError(what); }

}  // namespace

// --------------------------------------------------------------------------
// Scalar engine.

ScalarCoverTable::ScalarCoverTable(std::int64_t cap, std::vector<std::vector<Choice>> categories)
    : cap_(std::max<std::int64_t>(0, cap)) {
    if (cap_ + 1 > kCellGuard) too_big("cover table too large");
    cats_.reserve(categories.size());
    for (auto& cat : categories) {
        // Per distinct value index only the lightest choice can ever be picked;
        // on weight ties the smallest orig survives, matching a full scan.
        std::map<std::int64_t, Choice> best;
        for (const Choice& ch : cat) {
            auto it = best.find(ch.vidx);
            if (it == best.end() || ch.weight < it->second.weight) best[ch.vidx] = ch;
        }
        std::vector<Choice> lean;
        lean.reserve(best.size());
        for (auto& [vidx, ch] : best) lean.push_back(ch);
        std::sort(lean.begin(), lean.end(),
                  [](const Choice& a, const Choice& b) { return a.orig < b.orig; });
        if (lean.size() >= kUnset) too_big("too many choices in one category");
        cats_.push_back(std::move(lean));
    }

    const std::int64_t cells = cap_ + 1;
    std::vector<double> prev_w(cells, 0.0), cur_w(cells, 0.0);
    std::vector<char> prev_ok(cells, 0), cur_ok(cells, 0);
    prev_ok[0] = 1;
    alc_.resize(cats_.size());
    for (size_t i = 0; i < cats_.size(); ++i) {
        auto& row = alc_[i];
        row.assign(cells, kUnset);
        for (std::int64_t rho = 0; rho < cells; ++rho) {
            double best_w = 0;
            bool ok = false;
            for (size_t jj = 0; jj < cats_[i].size(); ++jj) {
                const Choice& ch = cats_[i][jj];
                std::int64_t rem = rho - ch.vidx;
                if (rem < 0) rem = 0;
                if (!prev_ok[rem]) continue;
                const double cand = prev_w[rem] + ch.weight;
                if (!ok || cand < best_w) {
                    ok = true;
                    best_w = cand;
                    row[rho] = static_cast<std::uint16_t>(jj);
                }
            }
            cur_ok[rho] = ok;
            cur_w[rho] = ok ? best_w : 0.0;
        }
        prev_w.swap(cur_w);
        prev_ok.swap(cur_ok);
    }
    final_weight_ = std::move(prev_w);
    final_ok_ = std::move(prev_ok);
}

std::optional<double> ScalarCoverTable::weight_at(std::int64_t rho) const {
    if (rho < 0 || rho > cap_ || !final_ok_[rho]) return std::nullopt;
    return final_weight_[rho];
}

std::optional<std::vector<int>> ScalarCoverTable::backtrack(std::int64_t rho) const {
    if (rho < 0 || rho > cap_ || !final_ok_[rho]) return std::nullopt;
    std::vector<int> chosen(cats_.size());
    for (size_t i = cats_.size(); i-- > 0;) {
        const std::uint16_t jj = alc_[i][rho];
        const Choice& ch = cats_[i][jj];
        chosen[i] = ch.orig;
        rho = std::max<std::int64_t>(0, rho - ch.vidx);
    }
    return chosen;
}

// --------------------------------------------------------------------------
// Vector engine (independent implementation over joint demand grids).

VectorCoverTable::VectorCoverTable(std::vector<std::int64_t> caps,
                                   std::vector<std::vector<Choice>> categories)
    : caps_(std::move(caps)) {
    const size_t d = caps_.size();
    strides_.resize(d);
    for (size_t c = 0; c < d; ++c) {
        caps_[c] = std::max<std::int64_t>(0, caps_[c]);
        strides_[c] = cells_;
        cells_ *= caps_[c] + 1;
        if (cells_ > kCellGuard) too_big("cover table too large");
    }
    cats_.reserve(categories.size());
    for (auto& cat : categories) {
        std::map<std::vector<std::int64_t>, Choice> best;
        for (const Choice& ch : cat) {
            auto it = best.find(ch.vidx);
            if (it == best.end() || ch.weight < it->second.weight) best[ch.vidx] = ch;
        }
        std::vector<Choice> lean;
        lean.reserve(best.size());
        for (auto& [vidx, ch] : best) lean.push_back(ch);
        std::sort(lean.begin(), lean.end(),
                  [](const Choice& a, const Choice& b) { return a.orig < b.orig; });
        if (lean.size() >= kUnset) too_big("too many choices in one category");
        cats_.push_back(std::move(lean));
    }

    std::vector<double> prev_w(cells_, 0.0), cur_w(cells_, 0.0);
    std::vector<char> prev_ok(cells_, 0), cur_ok(cells_, 0);
    prev_ok[0] = 1;
    alc_.resize(cats_.size());
    std::vector<std::int64_t> rho(d, 0);
    for (size_t i = 0; i < cats_.size(); ++i) {
        auto& row = alc_[i];
        row.assign(cells_, kUnset);
        std::fill(rho.begin(), rho.end(), 0);
        for (std::int64_t cell = 0; cell < cells_; ++cell) {
            double best_w = 0;
            bool ok = false;
            for (size_t jj = 0; jj < cats_[i].size(); ++jj) {
                const Choice& ch = cats_[i][jj];
                std::int64_t rem_cell = 0;
                for (size_t c = 0; c < d; ++c) {
                    std::int64_t rem = rho[c] - ch.vidx[c];
                    if (rem < 0) rem = 0;
                    rem_cell += rem * strides_[c];
                }
                if (!prev_ok[rem_cell]) continue;
                const double cand = prev_w[rem_cell] + ch.weight;
                if (!ok || cand < best_w) {
                    ok = true;
                    best_w = cand;
                    row[cell] = static_cast<std::uint16_t>(jj);
                }
            }
            cur_ok[cell] = ok;
            cur_w[cell] = ok ? best_w : 0.0;
            for (size_t c = 0; c < d; ++c) {  // odometer step
                if (++rho[c] <= caps_[c]) break;
                rho[c] = 0;
            }
        }
        prev_w.swap(cur_w);
        prev_ok.swap(cur_ok);
    }
    final_weight_ = std::move(prev_w);
    final_ok_ = std::move(prev_ok);
}

std::int64_t VectorCoverTable::cell_of(const std::vector<std::int64_t>& rho) const {
    std::int64_t cell = 0;
    for (size_t c = 0; c < caps_.size(); ++c) {
        if (rho[c] < 0 || rho[c] > caps_[c]) return -1;
        cell += rho[c] * strides_[c];
    }
    return cell;
}

std::optional<double> VectorCoverTable::weight_at(const std::vector<std::int64_t>& rho) const {
    const std::int64_t cell = cell_of(rho);
    if (cell < 0 || !final_ok_[cell]) return std::nullopt;
    return final_weight_[cell];
}

std::optional<std::vector<int>> VectorCoverTable::backtrack(
    const std::vector<std::int64_t>& rho_in) const {
    std::int64_t cell = cell_of(rho_in);
    if (cell < 0 || !final_ok_[cell]) return std::nullopt;
    std::vector<std::int64_t> rho = rho_in;
    std::vector<int> chosen(cats_.size());
    for (size_t i = cats_.size(); i-- > 0;) {
        const std::uint16_t jj = alc_[i][cell_of(rho)];
        const Choice& ch = cats_[i][jj];
        chosen[i] = ch.orig;
        for (size_t c = 0; c < caps_.size(); ++c)
            rho[c] = std::max<std::int64_t>(0, rho[c] - ch.vidx[c]);
    }
    return chosen;
}

// --------------------------------------------------------------------------
// Public problem-level wrappers.

namespace {

size_t checked_dims(const KnapsackInstance& inst) {
    const size_t d = inst.demand.size();
    if (d < 1) throw std::invalid_argument("demand needs at least one dimension");
    if (!std::isfinite(inst.rounding) || inst.rounding <= 0)
        throw std::invalid_argument("rounding factor must be finite and positive");
    for (double D : inst.demand)
        if (!std::isfinite(D) || D < 0)
            throw std::invalid_argument("demands must be finite and non-negative");
    for (const auto& cat : inst.categories) {
        if (cat.empty()) throw std::invalid_argument("category with no choices");
        for (const KsItem& item : cat) {
            if (!std::isfinite(item.weight) || item.weight < 0)
                throw std::invalid_argument("weights must be finite and non-negative");
            if (item.values.size() != d)
                throw std::invalid_argument("item value dimension mismatch");
            for (double v : item.values)
                if (!std::isfinite(v) || v < 0)
                    throw std::invalid_argument("values must be finite and non-negative");
        }
    }
    return d;
}

Allocation finish(const KnapsackInstance& inst, const std::vector<int>& chosen, size_t dims) {
    Allocation out;
    out.chosen = chosen;
    out.total_rounded_value.assign(dims, 0.0);
    std::vector<std::int64_t> vsum(dims, 0);
    for (size_t i = 0; i < chosen.size(); ++i) {
        const KsItem& item = inst.categories[i][chosen[i]];
        out.total_weight += item.weight;
        for (size_t c = 0; c < dims; ++c)
            vsum[c] += guarded_floor_div(item.values[c], inst.rounding);
    }
    for (size_t c = 0; c < dims; ++c)
        out.total_rounded_value[c] = static_cast<double>(vsum[c]) * inst.rounding;
    return out;
}

}  // namespace

Allocation solve_mcminks(const KnapsackInstance& inst) {
    if (checked_dims(inst) != 1)
        throw std::invalid_argument("scalar solver requires a one-dimensional demand");
    const double R = inst.rounding;
    std::vector<std::vector<ScalarCoverTable::Choice>> cats;
    cats.reserve(inst.categories.size());
    double maxv = 0;
    std::int64_t achievable = 0;
    for (const auto& cat : inst.categories) {
        std::vector<ScalarCoverTable::Choice> converted;
        converted.reserve(cat.size());
        std::int64_t cat_best = 0;
        for (size_t j = 0; j < cat.size(); ++j) {
            const std::int64_t vidx = guarded_floor_div(cat[j].values[0], R);
            converted.push_back({cat[j].weight, vidx, static_cast<int>(j)});
            maxv = std::max(maxv, cat[j].values[0]);
            cat_best = std::max(cat_best, vidx);
        }
        achievable += cat_best;
        cats.push_back(std::move(converted));
    }
    const std::int64_t cap =
        std::min(guarded_floor_div(inst.demand[0] + maxv, R), achievable);
    const std::int64_t rho = cover_index(inst.demand[0], R);
    if (rho > cap) throw DemandUnsatisfiableError("demand exceeds total coverable value");
    ScalarCoverTable table(cap, std::move(cats));
    auto chosen = table.backtrack(rho);
    if (!chosen) throw DemandUnsatisfiableError("no choice combination covers the demand");
    return finish(inst, *chosen, 1);
}

Allocation solve_mmcminks(const KnapsackInstance& inst, int dim_cap) {
    const size_t dims = checked_dims(inst);
    if (static_cast<int>(dims) > dim_cap) throw SizeError("dimension cap exceeded");
    const double R = inst.rounding;
    std::vector<std::vector<VectorCoverTable::Choice>> cats;
    cats.reserve(inst.categories.size());
    std::vector<double> maxv(dims, 0.0);
    std::vector<std::int64_t> achievable(dims, 0);
    for (const auto& cat : inst.categories) {
        std::vector<VectorCoverTable::Choice> converted;
        converted.reserve(cat.size());
        std::vector<std::int64_t> cat_best(dims, 0);
        for (size_t j = 0; j < cat.size(); ++j) {
            VectorCoverTable::Choice ch;
            ch.weight = cat[j].weight;
            ch.orig = static_cast<int>(j);
            ch.vidx.resize(dims);
            for (size_t c = 0; c < dims; ++c) {
                ch.vidx[c] = guarded_floor_div(cat[j].values[c], R);
                maxv[c] = std::max(maxv[c], cat[j].values[c]);
                cat_best[c] = std::max(cat_best[c], ch.vidx[c]);
            }
            converted.push_back(std::move(ch));
        }
        for (size_t c = 0; c < dims; ++c) achievable[c] += cat_best[c];
        cats.push_back(std::move(converted));
    }
    std::vector<std::int64_t> caps(dims), rho(dims);
    for (size_t c = 0; c < dims; ++c) {
        caps[c] = std::min(guarded_floor_div(inst.demand[c] + maxv[c], R), achievable[c]);
        rho[c] = cover_index(inst.demand[c], R);
        if (rho[c] > caps[c])
            throw DemandUnsatisfiableError("demand exceeds total coverable value");
    }
    VectorCoverTable table(std::move(caps), std::move(cats));
    auto chosen = table.backtrack(rho);
    if (!chosen) throw DemandUnsatisfiableError("no choice combination covers the demand");
    return finish(inst, *chosen, dims);
}

Allocation exact_mcminks(const KnapsackInstance& inst, std::int64_t enum_cap) {
    if (checked_dims(inst) != 1)
        throw std::invalid_argument("exact solver requires a one-dimensional demand");
    std::int64_t combos = 1;
    for (const auto& cat : inst.categories) {
        combos *= static_cast<std::int64_t>(cat.size());
        if (combos > enum_cap) throw SizeError("instance too large for exact enumeration");
    }
    const size_t n = inst.categories.size();
    std::vector<int> current(n, 0), best;
    double best_weight = 0, best_value = 0;
    bool found = false;
    // Lexicographic depth-first scan; strict improvement keeps the smallest
    // choice vector among minimum-weight covers.
    auto rec = [&](auto&& self, size_t i, double weight, double value) -> void {
        if (i == n) {
            if (value >= inst.demand[0] && (!found || weight < best_weight)) {
                found = true;
                best_weight = weight;
                best_value = value;
                best = current;
            }
            return;
        }
        for (size_t j = 0; j < inst.categories[i].size(); ++j) {
            current[i] = static_cast<int>(j);
            const KsItem& item = inst.categories[i][j];
            self(self, i + 1, weight + item.weight, value + item.values[0]);
        }
    };
    rec(rec, 0, 0.0, 0.0);
    if (!found) throw DemandUnsatisfiableError("no choice combination covers the demand");
    Allocation out;
    out.chosen = best;
    out.total_weight = best_weight;
    out.total_rounded_value = {best_value};  // true value: the exact path does not round
    return out;
}

}  // namespace ccmdp
