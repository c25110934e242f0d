#pragma once

#include <cstdint>
#include <vector>

namespace ccmdp {

// Relative guard used when flooring onto a grid: a value this close (relative)
// below a grid point counts as on the point, so accumulated rounding noise
// cannot cost an extra step.
inline constexpr double kGridGuard = 1e-12;

// Uniform grid {0, step, 2*step, ...} with `count` points.  step == 0 encodes
// the degenerate single-point grid {0}.
struct ValueGrid {
    double step = 0;
    std::int64_t count = 1;

    double value_of(std::int64_t idx) const { return step * static_cast<double>(idx); }
    std::int64_t max_index() const { return count - 1; }
};

// Index of the largest grid point <= x (guarded floor), clamped to the grid.
// Negative x maps to 0.
std::int64_t round_down(double x, const ValueGrid& grid);

// Guarded floor(x / step) without any clamping; building block for covering
// grids whose extent is decided by the caller.
std::int64_t guarded_floor_div(double x, double step);

enum class GridScheme { OnePart, ThreePart };

// Value grid for level k of a horizon-h problem: spacing
//   eps * u_max / ((h - k) * (ln h + 1))
// (a third of that under the three-part scheme), covering 0..u_max*(h-k).
// Requires 0 <= k < h and eps in the open interval (0, 1).
ValueGrid grid_for_level(int k, int h, double eps, double u_max, GridScheme scheme);

// Grids for all levels 0..h; level h is the single point {0}.
std::vector<ValueGrid> build_grids(int h, double eps, double u_max, GridScheme scheme);

}  // namespace ccmdp
