#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "wavedecay/fft.hpp"
#include "wavedecay/grid.hpp"
#include "wavedecay/interpolate.hpp"
#include "wavedecay/profiles.hpp"
#include "wavedecay/trajectory.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Linearized operators: parabolic  u_t - u_xx + c u_x + d u = 0  and
// KdV-Burgers  u_t + u_xxx - alpha u_xx + c u_x + d u = 0.
// ---------------------------------------------------------------------------
struct LinearOperatorSpec {
    enum class Family { parabolic_A1, kdvb_B1 };

    Family family = Family::parabolic_A1;
    double alpha = 0.0;  // kdvb only, > 0
    GridFunction c;
    GridFunction d;

    static LinearOperatorSpec parabolic(GridFunction c, GridFunction d) {
        if (!(c.grid == d.grid))
            throw Error("LinearOperatorSpec: c and d on different grids");
        LinearOperatorSpec op;
        op.family = Family::parabolic_A1;
        op.c = std::move(c);
        op.d = std::move(d);
        return op;
    }

    static LinearOperatorSpec kdvb(double alpha, GridFunction c, GridFunction d) {
        if (!(alpha > 0.0)) throw Error("LinearOperatorSpec: kdvb needs alpha > 0");
        if (!(c.grid == d.grid))
            throw Error("LinearOperatorSpec: c and d on different grids");
        LinearOperatorSpec op;
        op.family = Family::kdvb_B1;
        op.alpha = alpha;
        op.c = std::move(c);
        op.d = std::move(d);
        return op;
    }
};

struct EvolveOptions {
    std::vector<double> snapshot_times;  // realized at the nearest step
    double boundary_tol = 1e-8;          // |u0| allowed at the truncated boundary
    double growth_rate_bound = 5.0;      // instability detector: ||u|| <= C e^{Mt}
    double growth_factor = 100.0;
    double aliasing_threshold = 1e-4;    // top-third spectral energy fraction
    int detector_interval = 25;
};

namespace detail {

// Thomas solve of (I - r*D2) x = rhs on the Dirichlet interior, D2 the
// second-difference operator / dx^2; constant coefficients, precomputed sweep.
class CrankNicolsonSolver {
  public:
    CrankNicolsonSolver(int n, double r) : m_(n - 2), a_(-r), b_(1.0 + 2.0 * r) {
        cp_.resize(static_cast<size_t>(m_));
        dinv_.resize(static_cast<size_t>(m_));
        double denom = b_;
        dinv_[0] = 1.0 / denom;
        cp_[0] = a_ / denom;
        for (int i = 1; i < m_; ++i) {
            denom = b_ - a_ * cp_[static_cast<size_t>(i - 1)];
            dinv_[static_cast<size_t>(i)] = 1.0 / denom;
            cp_[static_cast<size_t>(i)] = a_ / denom;
        }
    }

    // rhs and x are full-grid arrays; boundary entries are pinned to zero
    void solve(const std::vector<double>& rhs, std::vector<double>& x) const {
        const size_t n = rhs.size();
        x.resize(n);
        x[0] = x[n - 1] = 0.0;
        scratch_.resize(static_cast<size_t>(m_));
        scratch_[0] = rhs[1] * dinv_[0];
        for (int i = 1; i < m_; ++i)
            scratch_[static_cast<size_t>(i)] =
                (rhs[static_cast<size_t>(i + 1)] -
                 a_ * scratch_[static_cast<size_t>(i - 1)]) * dinv_[static_cast<size_t>(i)];
        x[static_cast<size_t>(m_)] = scratch_[static_cast<size_t>(m_ - 1)];
        for (int i = m_ - 2; i >= 0; --i)
            x[static_cast<size_t>(i + 1)] =
                scratch_[static_cast<size_t>(i)] -
                cp_[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 2)];
    }

  private:
    int m_;
    double a_, b_;
    std::vector<double> cp_, dinv_;
    mutable std::vector<double> scratch_;
};

inline std::vector<int> snapshot_steps(const std::vector<double>& times, double dt,
                                       int total_steps) {
    std::set<int> steps;
    for (double t : times) {
        const int s = static_cast<int>(std::llround(t / dt));
        if (s > 0 && s <= total_steps) steps.insert(s);
    }
    if (steps.empty() || *steps.rbegin() != total_steps) steps.insert(total_steps);
    return {steps.begin(), steps.end()};
}

inline void check_instability(double norm_now, double norm0, double t,
                              const EvolveOptions& opt, const char* who) {
    const double floor = 1e-300;
    if (norm_now > opt.growth_factor * (norm0 + floor) *
                       std::exp(opt.growth_rate_bound * t))
        throw Error(std::string(who) + ": instability detected at t = " +
                    std::to_string(t) + " (sup norm " + std::to_string(norm_now) + ")");
}

inline double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parabolic family: Crank-Nicolson in the diffusion term, explicit
// second-order (trapezoidal predictor-corrector) in advection/reaction,
// homogeneous Dirichlet at the truncated boundary.
// ---------------------------------------------------------------------------
inline Trajectory evolve_parabolic(const LinearOperatorSpec& op, const GridFunction& u0,
                                   double T, double dt, const EvolveOptions& opt = {}) {
    if (op.family != LinearOperatorSpec::Family::parabolic_A1)
        throw Error("evolve_parabolic: operator family mismatch");
    if (!(u0.grid == op.c.grid)) throw Error("evolve_parabolic: grid mismatch");
    require_finite(u0, "evolve_parabolic");
    if (!(dt > 0.0) || !(T > 0.0)) throw Error("evolve_parabolic: need T, dt > 0");

    const Grid1D& g = u0.grid;
    const double cmax = detail::sup_abs(op.c.values);
    if (dt * cmax / g.dx > 1.0)
        throw Error("evolve_parabolic: advective CFL violated (dt*max|c|/dx = " +
                    std::to_string(dt * cmax / g.dx) + " > 1)");
    if (std::abs(u0[0]) > opt.boundary_tol || std::abs(u0[g.n - 1]) > opt.boundary_tol)
        throw Error("evolve_parabolic: u0 not below tolerance at the boundary");

    const double r = 0.5 * dt / (g.dx * g.dx);
    detail::CrankNicolsonSolver solver(g.n, r);

    auto explicit_term = [&](const std::vector<double>& u, std::vector<double>& out) {
        out.resize(u.size());
        out[0] = out[u.size() - 1] = 0.0;
        const double inv2dx = 0.5 / g.dx;
        for (int i = 1; i + 1 < g.n; ++i)
            out[static_cast<size_t>(i)] =
                -op.c[i] * (u[static_cast<size_t>(i + 1)] - u[static_cast<size_t>(i - 1)]) *
                    inv2dx -
                op.d[i] * u[static_cast<size_t>(i)];
    };
    auto half_diffusion = [&](const std::vector<double>& u, std::vector<double>& out) {
        out.resize(u.size());
        out[0] = out[u.size() - 1] = 0.0;
        for (int i = 1; i + 1 < g.n; ++i)
            out[static_cast<size_t>(i)] =
                u[static_cast<size_t>(i)] +
                r * (u[static_cast<size_t>(i + 1)] - 2.0 * u[static_cast<size_t>(i)] +
                     u[static_cast<size_t>(i - 1)]);
    };

    const int total_steps = std::max(1, static_cast<int>(std::llround(T / dt)));
    const auto snaps = detail::snapshot_steps(opt.snapshot_times, dt, total_steps);

    Trajectory traj;
    traj.solver_meta = {{"scheme", "crank-nicolson + explicit advection"},
                        {"family", "parabolic_A1"},
                        {"dt", dt},
                        {"grid", {{"xmin", g.xmin}, {"xmax", g.xmax}, {"n", g.n}}}};
    traj.record(0.0, u0);

    std::vector<double> u = u0.values, base, nl0, nl1, pred, next;
    const double norm0 = detail::sup_abs(u);
    size_t snap_idx = 0;
    for (int step = 1; step <= total_steps; ++step) {
        half_diffusion(u, base);
        explicit_term(u, nl0);
        std::vector<double> rhs(u.size());
        for (size_t i = 0; i < u.size(); ++i) rhs[i] = base[i] + dt * nl0[i];
        solver.solve(rhs, pred);
        explicit_term(pred, nl1);
        for (size_t i = 0; i < u.size(); ++i)
            rhs[i] = base[i] + 0.5 * dt * (nl0[i] + nl1[i]);
        solver.solve(rhs, next);
        u.swap(next);

        const double t = dt * step;
        if (step % opt.detector_interval == 0)
            detail::check_instability(detail::sup_abs(u), norm0, t, opt,
                                      "evolve_parabolic");
        if (snap_idx < snaps.size() && snaps[snap_idx] == step) {
            traj.record(t, GridFunction(g, u));
            ++snap_idx;
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// KdV-Burgers family: exact Fourier multiplier e^{(i xi^3 - alpha xi^2 -
// i mean(c) xi) t} for the constant-coefficient part on the periodic
// extension; the variable transport (c - mean(c)) u_x and the d u term are
// advanced with explicit 4th-order Runge-Kutta stages.
// ---------------------------------------------------------------------------
inline Trajectory evolve_kdvb_linear(const LinearOperatorSpec& op, const GridFunction& w0,
                                     double T, double dt, const EvolveOptions& opt = {}) {
    if (op.family != LinearOperatorSpec::Family::kdvb_B1)
        throw Error("evolve_kdvb_linear: operator family mismatch");
    if (!(w0.grid == op.c.grid)) throw Error("evolve_kdvb_linear: grid mismatch");
    require_finite(w0, "evolve_kdvb_linear");
    if (!(dt > 0.0) || !(T > 0.0)) throw Error("evolve_kdvb_linear: need T, dt > 0");

    const Grid1D& g = w0.grid;
    double cbar = 0.0;
    for (int i = 0; i < g.n; ++i) cbar += op.c[i];
    cbar /= static_cast<double>(g.n);

    const double alpha = op.alpha;
    SpectralPropagator prop(g, [alpha, cbar](double xi) {
        return std::complex<double>(-alpha * xi * xi, xi * xi * xi - cbar * xi);
    });

    std::vector<double> cvar(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) cvar[static_cast<size_t>(i)] = op.c[i] - cbar;
    std::vector<double> deriv;
    auto N = [&](const std::vector<double>& u, std::vector<double>& out) {
        prop.fft().derivative(u, deriv);
        out.resize(u.size());
        for (size_t i = 0; i < u.size(); ++i)
            out[i] = -cvar[i] * deriv[i] - op.d[static_cast<int>(i)] * u[i];
    };

    const int total_steps = std::max(1, static_cast<int>(std::llround(T / dt)));
    const auto snaps = detail::snapshot_steps(opt.snapshot_times, dt, total_steps);

    Trajectory traj;
    traj.solver_meta = {{"scheme", "integrating-factor rk4 (spectral)"},
                        {"family", "kdvb_B1"},
                        {"alpha", op.alpha},
                        {"mean_c", cbar},
                        {"dt", dt},
                        {"grid", {{"xmin", g.xmin}, {"xmax", g.xmax}, {"n", g.n}}}};
    traj.record(0.0, w0);

    std::vector<double> u = w0.values;
    const double norm0 = detail::sup_abs(u);
    size_t snap_idx = 0;
    for (int step = 1; step <= total_steps; ++step) {
        prop.step(u, dt, N);
        const double t = dt * step;
        if (step % opt.detector_interval == 0) {
            detail::check_instability(detail::sup_abs(u), norm0, t, opt,
                                      "evolve_kdvb_linear");
            if (prop.high_mode_energy_fraction(u) > opt.aliasing_threshold)
                throw Error("evolve_kdvb_linear: unresolved spectrum at t = " +
                            std::to_string(t) + " (increase n)");
        }
        if (snap_idx < snaps.size() && snaps[snap_idx] == step) {
            traj.record(t, GridFunction(g, u));
            ++snap_idx;
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Exponential-decay certificate for the kdvb family under (B.11):
// F_rho(x) = alpha rho^2 + c'(x) + (rho c(x) + rho^3) tanh(rho (x - x0)),
// with c(x0) = 0. gamma = -sup F_rho > 0 certifies weighted-energy decay.
// ---------------------------------------------------------------------------
struct DecayCertificate {
    double rho = 0.0;
    double gamma = 0.0;
    double sup_F_rho = 0.0;
    double x0 = 0.0;
};

inline DecayCertificate decay_certificate(const GridFunction& c, double alpha,
                                          double rho) {
    require_finite(c, "decay_certificate");
    if (!(rho > 0.0)) throw Error("decay_certificate: rho must be > 0");
    if (!(rho < alpha / 3.0))
        throw Error("decay_certificate: certificate refused, rho = " +
                    std::to_string(rho) + " >= alpha/3 = " + std::to_string(alpha / 3.0));
    const Grid1D& g = c.grid;
    if (!(c[0] > 0.0 && c[g.n - 1] < 0.0))
        throw Error("decay_certificate: invalid coefficient, need c > 0 at the left "
                    "boundary and c < 0 at the right");

    // c' <= 0 sampled, and a unique sign change
    GridFunction cp = stencil_d1(c);
    cp[0] = (c[1] - c[0]) / g.dx;
    cp[1] = (c[2] - c[0]) / (2.0 * g.dx);
    cp[g.n - 2] = (c[g.n - 1] - c[g.n - 3]) / (2.0 * g.dx);
    cp[g.n - 1] = (c[g.n - 1] - c[g.n - 2]) / g.dx;
    const double scale = detail::sup_abs(c.values);
    for (int i = 0; i < g.n; ++i)
        if (cp[i] > 1e-10 * std::max(1.0, scale))
            throw Error("decay_certificate: c' > 0 at x = " +
                        std::to_string(g.point(i)));
    int crossings = 0;
    for (int i = 0; i + 1 < g.n; ++i)
        if (c[i] > 0.0 && c[i + 1] <= 0.0) ++crossings;
    if (crossings != 1)
        throw Error("decay_certificate: expected a unique zero of c, found " +
                    std::to_string(crossings));

    // bisection on the interpolated coefficient
    double lo = g.xmin, hi = g.xmax;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sample_cubic(c, mid, c[0], c[g.n - 1]) > 0.0) lo = mid;
        else hi = mid;
    }
    const double x0 = 0.5 * (lo + hi);

    double sup = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n; ++i) {
        const double F = alpha * rho * rho + cp[i] +
                         (rho * c[i] + rho * rho * rho) *
                             std::tanh(rho * (g.point(i) - x0));
        sup = std::max(sup, F);
    }
    DecayCertificate cert;
    cert.rho = rho;
    cert.x0 = x0;
    cert.sup_F_rho = sup;
    cert.gamma = -sup;
    return cert;
}

// ---------------------------------------------------------------------------
// Short-time smoothing tables over dyadic t in [t_min, 1]: scaled ratios
// that the estimates predict to stay bounded.
// ---------------------------------------------------------------------------
struct SmoothingRow {
    double t = 0.0;
    std::string quantity;
    double ratio = 0.0;
};

struct SmoothingReport {
    std::vector<SmoothingRow> rows;
    double max_ratio = 0.0;
    double bound = 0.0;
    bool passed = false;
};

// Parabolic: t^{1/2} ||d_x S(t) phi||_inf / ||phi||_inf.
inline SmoothingReport verify_smoothing_parabolic(const LinearOperatorSpec& op,
                                                  const GridFunction& phi,
                                                  double t_min = 1e-3,
                                                  double bound = 100.0) {
    SmoothingReport rep;
    rep.bound = bound;
    const double n0 = norm_value(phi, Lp::inf, WeightSpec::none());
    std::vector<double> ts;
    for (double t = 1.0; t >= t_min * 0.999; t *= 0.5) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    EvolveOptions opt;
    opt.snapshot_times = ts;
    const double dt = t_min / 8.0;
    Trajectory traj = evolve_parabolic(op, phi, 1.0, dt, opt);
    for (size_t s = 1; s < traj.size(); ++s) {
        const GridFunction dx = stencil_d1(traj.snapshots[s]);
        const double ratio =
            std::sqrt(traj.times[s]) * norm_value(dx, Lp::inf, WeightSpec::none()) / n0;
        rep.rows.push_back({traj.times[s], "sqrt(t)*|d_x u|_inf/|phi|_inf", ratio});
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    rep.passed = rep.max_ratio <= bound;
    return rep;
}

// KdV-Burgers: the (B.3)/(B.4)-type L2 ratios and the (B.7a,b) L4 ratios
// with polynomial weight k, for the evolution of the given operator.
inline SmoothingReport verify_smoothing_kdvb(const LinearOperatorSpec& op,
                                             const GridFunction& phi, double k,
                                             double t_min = 1e-3, double bound = 100.0) {
    SmoothingReport rep;
    rep.bound = bound;
    const WeightSpec wk = WeightSpec::polynomial(k);
    const double n2 = norm_value(phi, Lp::two, WeightSpec::none());
    const double n2k = norm_value(phi, Lp::two, wk);
    std::vector<double> ts;
    for (double t = 1.0; t >= t_min * 0.999; t *= 0.5) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    EvolveOptions opt;
    opt.snapshot_times = ts;
    const double dt = t_min / 8.0;
    Trajectory traj = evolve_kdvb_linear(op, phi, 1.0, dt, opt);
    RealSpectral fft(phi.grid);
    for (size_t s = 1; s < traj.size(); ++s) {
        const double t = traj.times[s];
        const GridFunction& u = traj.snapshots[s];
        std::vector<double> d1v, d2v;
        fft.derivative(u.values, d1v);
        fft.derivative(d1v, d2v);
        GridFunction d1(u.grid, d1v), d2(u.grid, d2v);
        const double r1 = std::sqrt(t) * norm_value(d1, Lp::two, WeightSpec::none()) / n2;
        const double r2 = t * norm_value(d2, Lp::two, WeightSpec::none()) / n2;
        const double r3 = std::pow(t, 0.125) * norm_value(u, Lp::four, wk) / n2k;
        const double r4 = std::pow(t, 0.625) * norm_value(d1, Lp::four, wk) / n2k;
        rep.rows.push_back({t, "sqrt(t)*|d_x u|_2/|phi|_2", r1});
        rep.rows.push_back({t, "t*|d_xx u|_2/|phi|_2", r2});
        rep.rows.push_back({t, "t^(1/8)*|u|_{4,k}/|phi|_{2,k}", r3});
        rep.rows.push_back({t, "t^(5/8)*|d_x u|_{4,k}/|phi|_{2,k}", r4});
        rep.max_ratio = std::max({rep.max_ratio, r1, r2, r3, r4});
    }
    rep.passed = rep.max_ratio <= bound;
    return rep;
}

}  // namespace wavedecay
