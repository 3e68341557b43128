#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "wavedecay/error.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Least-squares decay-rate fit. Algebraic model: log(norm) against log(t);
// exponential model: log(norm) against t. `exponent` is the fitted slope,
// stderr the usual residual-based slope standard error.
// ---------------------------------------------------------------------------
struct DecayFit {
    enum class Model { algebraic, exponential };

    double exponent = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double stderr_slope = 0.0;
    Model model = Model::algebraic;
    int samples = 0;
};

inline DecayFit fit_rate(const std::vector<std::pair<double, double>>& series,
                         DecayFit::Model model, double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw Error("fit_rate: need t_lo < t_hi");
    std::vector<double> xs, ys;
    for (const auto& [t, v] : series) {
        if (t < t_lo || t > t_hi) continue;
        if (!(v > 0.0))
            throw Error("fit_rate: nonpositive norm at t = " + std::to_string(t));
        xs.push_back(model == DecayFit::Model::algebraic ? std::log(t) : t);
        ys.push_back(std::log(v));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 5) throw Error("fit_rate: need at least 5 samples in the window, got " +
                           std::to_string(n));

    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += xs[static_cast<size_t>(i)];
        sy += ys[static_cast<size_t>(i)];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = xs[static_cast<size_t>(i)] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[static_cast<size_t>(i)] - my);
    }
    if (sxx == 0.0) throw Error("fit_rate: degenerate abscissa");
    const double slope = sxy / sxx;
    const double icept = my - slope * mx;

    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[static_cast<size_t>(i)] -
                         (icept + slope * xs[static_cast<size_t>(i)]);
        ssr += r * r;
    }
    DecayFit fit;
    fit.exponent = slope;
    fit.intercept = icept;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.model = model;
    fit.samples = n;
    fit.stderr_slope = (n > 2) ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return fit;
}

}  // namespace wavedecay
