#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavedecay/flux.hpp"
#include "wavedecay/grid.hpp"
#include "wavedecay/interpolate.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Record of the affine changes that bring a problem to the normalized frame
// c = 0, phi- = 1, phi+ = 0. The dependent variable transforms as
// u = scale * v + offset, and the flux picks up the linear function
// -chord_speed * u + linear_intercept before rescaling.
// ---------------------------------------------------------------------------
struct NormalizationRecord {
    double scale = 1.0;
    double offset = 0.0;
    double chord_speed = 0.0;
    double linear_intercept = 0.0;

    bool identity() const {
        return scale == 1.0 && offset == 0.0 && chord_speed == 0.0 &&
               linear_intercept == 0.0;
    }

    // Reconstruct the original flux from the normalized one (inverse map).
    FluxSpec original_flux(const FluxSpec& normalized) const {
        // f(u) = scale * f~((u - offset)/scale) + chord_speed*u - linear_intercept
        FluxSpec back = normalized.compose_affine(1.0 / scale, -offset / scale)
                            .scaled(scale)
                            .plus_linear(chord_speed, -linear_intercept);
        return back;
    }
};

// Map end states to (1, 0) and remove the chord speed
// c = (g(phi+) - g(phi-))/(phi+ - phi-), so the new flux vanishes at 0 and 1.
inline std::pair<FluxSpec, NormalizationRecord>
normalize_problem(const FluxSpec& flux, double phi_minus, double phi_plus) {
    if (phi_minus == phi_plus)
        throw Error("normalize_problem: degenerate end states");
    const double c =
        (flux.value(phi_plus) - flux.value(phi_minus)) / (phi_plus - phi_minus);
    const double a = phi_minus - phi_plus;  // u = a*v + b
    const double b = phi_plus;
    const double intercept = flux.value(b) - c * b;
    // f~(v) = [f(a v + b) - c (a v + b) - (f(b) - c b)] / a
    FluxSpec tilde = flux.compose_affine(a, b)
                         .plus_linear(-c * a, -c * b - intercept)
                         .scaled(1.0 / a);
    NormalizationRecord rec;
    rec.scale = a;
    rec.offset = b;
    rec.chord_speed = c;
    rec.linear_intercept = intercept;
    if (std::abs(a - 1.0) < 1e-15 && std::abs(b) < 1e-15 &&
        std::abs(c) < 1e-15 && std::abs(intercept) < 1e-15)
        rec = NormalizationRecord{};  // identity
    return {tilde, rec};
}

// ---------------------------------------------------------------------------
// Normalized monotone traveling-wave profile: c = 0, phi(-inf) = 1,
// phi(+inf) = 0, phi(0) = 1/2, strictly decreasing.
// ---------------------------------------------------------------------------
struct WaveProfile {
    enum class Family { viscous, kdvb };

    GridFunction phi;
    double phi_minus = 1.0;
    double phi_plus = 0.0;
    double speed = 0.0;
    FluxSpec flux;
    Family family = Family::viscous;
    double alpha = 0.0;  // kdvb only
    NormalizationRecord normalization;

    // Cubic evaluation clamped to the end states outside the grid.
    double evaluate(double x) const {
        return sample_cubic(phi, x, phi_minus, phi_plus);
    }
    double evaluate_shifted(double x, double h) const { return evaluate(x - h); }

    GridFunction shifted(double h) const {
        GridFunction out = GridFunction::zeros(phi.grid);
        for (int i = 0; i < phi.size(); ++i)
            out[i] = evaluate(phi.grid.point(i) - h);
        return out;
    }

    double boundary_defect() const {
        return std::abs(phi[0] - phi_minus) +
               std::abs(phi[phi.size() - 1] - phi_plus);
    }

    // Strict decrease wherever the values are resolvable in double precision;
    // once a tail has saturated to an end state within ~1e-12, consecutive
    // samples may round to the same double and only non-increase is required.
    bool strictly_decreasing() const {
        for (int i = 0; i + 1 < phi.size(); ++i) {
            if (phi[i + 1] > phi[i]) return false;
            const bool resolvable = (phi_minus - phi[i] > 1e-12) &&
                                    (phi[i + 1] - phi_plus > 1e-12);
            if (resolvable && !(phi[i + 1] < phi[i])) return false;
        }
        return true;
    }
};

namespace detail {

inline void require_normalized_flux(const FluxSpec& f, const char* who) {
    if (std::abs(f.value(0.0)) > 1e-12 || std::abs(f.value(1.0)) > 1e-12)
        throw Error(std::string(who) + ": flux not normalized (f(0) = " +
                    std::to_string(f.value(0.0)) + ", f(1) = " +
                    std::to_string(f.value(1.0)) + ")");
}

// One classical RK4 step for a scalar ODE y' = f(y).
template <class F>
double rk4_scalar(double y, double h, F&& f) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class F>
std::array<double, 2> rk4_vec2(const std::array<double, 2>& y, double h, F&& f) {
    auto add = [](const std::array<double, 2>& a, double s,
                  const std::array<double, 2>& b) {
        return std::array<double, 2>{a[0] + s * b[0], a[1] + s * b[1]};
    };
    const auto k1 = f(y);
    const auto k2 = f(add(y, 0.5 * h, k1));
    const auto k3 = f(add(y, 0.5 * h, k2));
    const auto k4 = f(add(y, h, k3));
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// Integrate phi' = f(phi) from phi(0) = 1/2 to an ordered list of targets
// (all positive or all negative offsets from 0), landing on each exactly.
template <class F>
std::vector<double> march_to_nodes(const std::vector<double>& targets,
                                   double step, F&& rhs) {
    std::vector<double> out;
    out.reserve(targets.size());
    double x = 0.0, y = 0.5;
    for (double target : targets) {
        const double gap = target - x;
        const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(gap) / step)));
        const double h = gap / substeps;
        for (int s = 0; s < substeps; ++s) y = rk4_scalar(y, h, rhs);
        x = target;
        if (y < -1e-9 || y > 1.0 + 1e-9)
            throw Error("construct_burgers_profile: numerical blow-up, phi = " +
                        std::to_string(y) + " at x = " + std::to_string(x));
        out.push_back(std::min(std::max(y, 0.0), 1.0));
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Viscous profile: integrate the once-integrated steady equation
// phi' = f(phi) from phi(0) = 1/2 in both directions (4th-order one-step
// method, fixed substeps landing exactly on grid nodes).
// Requires f(0) = f(1) = 0 and f < 0 on (0,1).
// ---------------------------------------------------------------------------
struct BurgersProfileOptions {
    double step = 1e-3;
    int sign_check_samples = 4096;
};

inline WaveProfile construct_burgers_profile(const FluxSpec& flux, const Grid1D& grid,
                                             const BurgersProfileOptions& opt = {}) {
    detail::require_normalized_flux(flux, "construct_burgers_profile");
    for (int i = 0; i < opt.sign_check_samples; ++i) {
        const double r = (i + 0.5) / opt.sign_check_samples;
        if (!(flux.value(r) < 0.0))
            throw Error("construct_burgers_profile: no monotone profile, f(" +
                        std::to_string(r) + ") = " + std::to_string(flux.value(r)) +
                        " >= 0");
    }

    auto rhs = [&flux](double y) { return flux.value(y); };
    std::vector<double> right_targets, left_targets;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.point(i);
        if (x > 0.0) right_targets.push_back(x);
        else if (x < 0.0) left_targets.push_back(x);
    }
    std::sort(left_targets.begin(), left_targets.end(), std::greater<>());

    const std::vector<double> right_vals =
        detail::march_to_nodes(right_targets, opt.step, rhs);
    const std::vector<double> left_vals =
        detail::march_to_nodes(left_targets, opt.step, rhs);

    // march order: right_vals ascend from just above 0; left_vals descend
    // from just below 0. Grid order reverses the left sequence.
    GridFunction phi = GridFunction::zeros(grid);
    size_t ri = 0;
    std::vector<int> left_idx;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.point(i);
        if (x > 0.0) phi[i] = right_vals[ri++];
        else if (x == 0.0) phi[i] = 0.5;
        else left_idx.push_back(i);
    }
    for (size_t m = 0; m < left_idx.size(); ++m)
        phi[left_idx[left_idx.size() - 1 - m]] = left_vals[m];

    WaveProfile p;
    p.phi = std::move(phi);
    p.flux = flux;
    p.family = WaveProfile::Family::viscous;
    if (!p.strictly_decreasing())
        throw Error("construct_burgers_profile: profile not strictly decreasing");
    return p;
}

// ---------------------------------------------------------------------------
// F-KPP reduction f(r) = g(phi-) - c r - g(phi- - r); f'(0) = g'(phi-) - c is
// the quantity inside the existence condition.
// ---------------------------------------------------------------------------
struct FkppReduction {
    FluxSpec f;
    double fprime0 = 0.0;
};

inline FkppReduction fkpp_reduction(const FluxSpec& g, double c, double phi_minus) {
    FluxSpec composed = g.compose_affine(-1.0, phi_minus);  // g(phi- - r)
    FluxSpec f = composed.scaled(-1.0).plus_linear(-c, g.value(phi_minus));
    f.name = "fkpp(" + g.name + ")";
    return FkppReduction{f, g.d1(phi_minus) - c};
}

// ---------------------------------------------------------------------------
// KdV-Burgers profile: integrate the once-integrated equation
// phi'' = alpha phi' - g(phi) backward in x from the saddle at phi = 0 along
// its 1-D stable eigendirection (eigenvalue (alpha - sqrt(alpha^2-4g'(0)))/2),
// until phi reaches 1; translate so phi(0) = 1/2 and resample onto the grid.
// ---------------------------------------------------------------------------
struct KdvbProfileOptions {
    double step = 1e-3;
    double seed_distance = 1e-8;
    double stop_tol = 1e-13;
    double tau_max = 2000.0;
};

inline WaveProfile construct_kdvb_profile(const FluxSpec& g, double alpha,
                                          const Grid1D& grid,
                                          const KdvbProfileOptions& opt = {}) {
    detail::require_normalized_flux(g, "construct_kdvb_profile");
    if (!(alpha > 0.0)) throw Error("construct_kdvb_profile: alpha must be > 0");

    const double gp0 = g.d1(0.0), gp1 = g.d1(1.0);
    if (!(gp0 < 0.0 && gp1 > 0.0))
        throw Error("construct_kdvb_profile: need g'(0) < 0 < g'(1), got g'(0) = " +
                    std::to_string(gp0) + ", g'(1) = " + std::to_string(gp1));
    const double threshold = 2.0 * std::sqrt(gp1);
    if (alpha < threshold)
        throw Error("construct_kdvb_profile: no monotone profile, alpha = " +
                    std::to_string(alpha) + " below threshold 2*sqrt(g'(1)) = " +
                    std::to_string(threshold));
    // Strict convexity is required on the profile range; outside [0,1] the
    // stock cubic examples lose convexity, which we only report.
    for (int i = 1; i < 200; ++i) {
        const double r = i / 200.0;
        if (!(g.d2(r) > 0.0) && r < 0.995)
            throw Error("construct_kdvb_profile: g not strictly convex at r = " +
                        std::to_string(r));
    }
    for (double r = -0.1; r <= 1.1; r += 0.05)
        if (g.d2(r) < 0.0 && (r < -1e-12 || r > 1.0 + 1e-12))
            std::cerr << "wavedecay: construct_kdvb_profile: g''(" << r
                      << ") = " << g.d2(r) << " < 0 outside [0,1]\n";

    const double lambda_s = 0.5 * (alpha - std::sqrt(alpha * alpha - 4.0 * gp0));

    // Backward integration: tau = -x, state (phi, psi = dphi/dx).
    auto rhs = [&](const std::array<double, 2>& y) {
        return std::array<double, 2>{-y[1], -(alpha * y[1] - g.value(y[0]))};
    };
    std::array<double, 2> state{opt.seed_distance, opt.seed_distance * lambda_s};
    std::vector<double> traj{state[0]};
    const double h = opt.step;
    const int max_steps = static_cast<int>(opt.tau_max / h);
    int steps = 0;
    while (1.0 - state[0] > opt.stop_tol) {
        if (++steps > max_steps)
            throw Error("construct_kdvb_profile: failed to reach the left end state");
        const auto next = detail::rk4_vec2(state, h, rhs);
        if (next[0] < traj.back() - 1e-15 || next[0] > 1.0 + 1e-9)
            throw Error("construct_kdvb_profile: monotonicity violated at tau = " +
                        std::to_string(steps * h) + " (phi = " +
                        std::to_string(next[0]) + ")");
        state = next;
        traj.push_back(std::min(state[0], 1.0));
    }

    // Locate phi = 1/2 along the (monotone) trajectory.
    const auto it = std::lower_bound(traj.begin(), traj.end(), 0.5);
    if (it == traj.begin() || it == traj.end())
        throw Error("construct_kdvb_profile: trajectory never crossed 1/2");
    const size_t j1 = static_cast<size_t>(it - traj.begin());
    const double frac = (0.5 - traj[j1 - 1]) / (traj[j1] - traj[j1 - 1]);
    const double tau_half = (static_cast<double>(j1 - 1) + frac) * h;

    // Store trajectory as a GridFunction in tau for cubic resampling.
    Grid1D tau_grid = Grid1D::uniform(0.0, h * static_cast<double>(traj.size() - 1),
                                      static_cast<int>(traj.size()));
    GridFunction traj_fn(tau_grid, std::move(traj));

    GridFunction phi = GridFunction::zeros(grid);
    for (int i = 0; i < grid.n; ++i) {
        const double tau = tau_half - grid.point(i);
        if (tau < 0.0) {
            // right of the seed point: linearized stable-manifold tail
            phi[i] = opt.seed_distance * std::exp(-lambda_s * tau);
        } else if (tau > tau_grid.xmax) {
            phi[i] = 1.0;
        } else {
            phi[i] = std::min(std::max(sample_cubic(traj_fn, tau), 0.0), 1.0);
        }
    }

    WaveProfile p;
    p.phi = std::move(phi);
    p.flux = g;
    p.family = WaveProfile::Family::kdvb;
    p.alpha = alpha;
    if (!p.strictly_decreasing())
        throw Error("construct_kdvb_profile: resampled profile not strictly decreasing");
    return p;
}

// ---------------------------------------------------------------------------
// Residual checks with 5-point stencils on the grid interior.
// ---------------------------------------------------------------------------
inline GridFunction stencil_d1(const GridFunction& f) {
    GridFunction out = GridFunction::zeros(f.grid);
    const double h = f.grid.dx;
    for (int i = 2; i + 2 < f.size(); ++i)
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    return out;
}

inline GridFunction stencil_d2(const GridFunction& f) {
    GridFunction out = GridFunction::zeros(f.grid);
    const double h = f.grid.dx;
    for (int i = 2; i + 2 < f.size(); ++i)
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] -
                  f[i + 2]) / (12.0 * h * h);
    return out;
}

inline GridFunction stencil_d3(const GridFunction& f) {
    GridFunction out = GridFunction::zeros(f.grid);
    const double h = f.grid.dx;
    for (int i = 2; i + 2 < f.size(); ++i)
        out[i] = (-f[i - 2] + 2.0 * f[i - 1] - 2.0 * f[i + 1] + f[i + 2]) /
                 (2.0 * h * h * h);
    return out;
}

// sup over the interior of |-phi'' + (f(phi))'| for a viscous profile
inline double burgers_profile_residual(const WaveProfile& p) {
    GridFunction fphi = GridFunction::zeros(p.phi.grid);
    for (int i = 0; i < p.phi.size(); ++i) fphi[i] = p.flux.value(p.phi[i]);
    const GridFunction d2 = stencil_d2(p.phi);
    const GridFunction d1 = stencil_d1(fphi);
    double worst = 0.0;
    for (int i = 2; i + 2 < p.phi.size(); ++i)
        worst = std::max(worst, std::abs(-d2[i] + d1[i]));
    return worst;
}

// sup over the interior of |-c phi' + (g(phi))' + phi''' - alpha phi''|
inline double kdvb_profile_residual(const WaveProfile& p) {
    GridFunction gphi = GridFunction::zeros(p.phi.grid);
    for (int i = 0; i < p.phi.size(); ++i) gphi[i] = p.flux.value(p.phi[i]);
    const GridFunction d1phi = stencil_d1(p.phi);
    const GridFunction d1g = stencil_d1(gphi);
    const GridFunction d2 = stencil_d2(p.phi);
    const GridFunction d3 = stencil_d3(p.phi);
    double worst = 0.0;
    for (int i = 2; i + 2 < p.phi.size(); ++i)
        worst = std::max(worst, std::abs(-p.speed * d1phi[i] + d1g[i] + d3[i] -
                                         p.alpha * d2[i]));
    return worst;
}

// Shift h with the mass contract from the profile's end states.
inline double compute_shift(const GridFunction& u0, const WaveProfile& p) {
    return compute_shift_from_mass(u0, p.phi, p.phi_minus, p.phi_plus);
}

// ---------------------------------------------------------------------------
// Export: CSV samples plus JSON sidecar.
// ---------------------------------------------------------------------------
inline void write_profile(const WaveProfile& p, const std::filesystem::path& dir,
                          const std::string& stem = "profile") {
    std::filesystem::create_directories(dir);
    write_csv(p.phi, dir / (stem + ".csv"));
    nlohmann::json j;
    j["phi_minus"] = p.phi_minus;
    j["phi_plus"] = p.phi_plus;
    j["speed"] = p.speed;
    j["family"] = (p.family == WaveProfile::Family::viscous) ? "viscous" : "kdvb";
    j["alpha"] = p.alpha;
    j["flux"] = {{"name", p.flux.name}, {"coeffs", p.flux.coeffs}};
    j["normalization"] = {{"scale", p.normalization.scale},
                          {"offset", p.normalization.offset},
                          {"chord_speed", p.normalization.chord_speed},
                          {"linear_intercept", p.normalization.linear_intercept}};
    std::ofstream out(dir / (stem + ".json"));
    out << j.dump(2) << "\n";
}

}  // namespace wavedecay
