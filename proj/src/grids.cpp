#include "ccmdp/grids.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccmdp {

std::int64_t guarded_floor_div(double x, double step) {
    if (step <= 0 || x <= 0) return 0;
    const double q = x / step;
    auto idx = static_cast<std::int64_t>(std::floor(q));
    // Pull values a hair below the next point up onto it.
    if (q - static_cast<double>(idx) >= 1.0 - kGridGuard * std::max(1.0, q)) idx += 1;
    return idx;
}

std::int64_t round_down(double x, const ValueGrid& grid) {
    if (grid.step <= 0) return 0;
    return std::min(guarded_floor_div(x, grid.step), grid.max_index());
}

ValueGrid grid_for_level(int k, int h, double eps, double u_max, GridScheme scheme) {
    if (h < 1) throw std::invalid_argument("horizon must be at least 1");
    if (k < 0 || k >= h) throw std::invalid_argument("level must lie in [0, horizon)");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("eps must lie in the open interval (0, 1)");
    if (!(u_max >= 0.0) || !std::isfinite(u_max))
        throw std::invalid_argument("u_max must be finite and non-negative");
    if (u_max == 0.0) return ValueGrid{0.0, 1};
    const double steps_left = static_cast<double>(h - k);
    double spacing = eps * u_max / (steps_left * (std::log(static_cast<double>(h)) + 1.0));
    if (scheme == GridScheme::ThreePart) spacing /= 3.0;
    return ValueGrid{spacing, guarded_floor_div(u_max * steps_left, spacing) + 1};
}

std::vector<ValueGrid> build_grids(int h, double eps, double u_max, GridScheme scheme) {
    std::vector<ValueGrid> grids;
    grids.reserve(h + 1);
    for (int k = 0; k < h; ++k) grids.push_back(grid_for_level(k, h, eps, u_max, scheme));
    grids.push_back(ValueGrid{0.0, 1});
    return grids;
}

}  // namespace ccmdp
