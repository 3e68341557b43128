#pragma once

#include <cmath>

#include "wavedecay/grid.hpp"

namespace wavedecay {

// Cubic (4-point Lagrange) interpolation on the uniform grid, O(dx^4) for
// smooth data. Outside [xmin, xmax] the fill values are returned, which is
// exact for fields that have saturated to constant end states.
inline double sample_cubic(const GridFunction& f, double x,
                           double left_fill, double right_fill) {
    const Grid1D& g = f.grid;
    if (x <= g.xmin) return (x == g.xmin) ? f[0] : left_fill;
    if (x >= g.xmax) return (x == g.xmax) ? f[g.n - 1] : right_fill;

    const double s = (x - g.xmin) / g.dx;
    int i1 = static_cast<int>(std::floor(s));          // bracketing cell [i1, i1+1]
    int i0 = std::clamp(i1 - 1, 0, g.n - 4);           // stencil start
    const double u = s - static_cast<double>(i0);      // position in stencil units

    const double a = f[i0], b = f[i0 + 1], c = f[i0 + 2], d = f[i0 + 3];
    const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return a * w0 + b * w1 + c * w2 + d * w3;
}

inline double sample_cubic(const GridFunction& f, double x) {
    if (x < f.grid.xmin || x > f.grid.xmax)
        throw Error("sample_cubic: x = " + std::to_string(x) + " outside grid");
    return sample_cubic(f, x, 0.0, 0.0);
}

}  // namespace wavedecay
