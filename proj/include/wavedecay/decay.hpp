#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavedecay/fit.hpp"
#include "wavedecay/grid.hpp"
#include "wavedecay/nonlinear.hpp"
#include "wavedecay/profiles.hpp"
#include "wavedecay/trajectory.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Weighted-norm time series of a trajectory.
// ---------------------------------------------------------------------------
struct NormSeriesRow {
    double t = 0.0;
    Lp p = Lp::two;
    WeightSpec weight;
    double value = 0.0;
};

inline std::vector<NormSeriesRow> norm_timeseries(const Trajectory& traj, Lp p,
                                                  const std::vector<WeightSpec>& weights) {
    std::vector<NormSeriesRow> rows;
    for (size_t i = 0; i < traj.size(); ++i) {
        for (const WeightSpec& w : weights) {
            try {
                rows.push_back({traj.times[i], p, w,
                                norm_value(traj.snapshots[i], p, w)});
            } catch (const Error& e) {
                throw Error("norm_timeseries: snapshot " + std::to_string(i) + ": " +
                            e.what());
            }
        }
    }
    return rows;
}

inline std::vector<std::pair<double, double>>
series_for_weight(const std::vector<NormSeriesRow>& rows, const WeightSpec& w) {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rows)
        if (r.weight.kind == w.kind && r.weight.k == w.k && r.weight.rho == w.rho)
            out.emplace_back(r.t, r.value);
    return out;
}

// ---------------------------------------------------------------------------
// Lemma C.1: I(t) = int_0^t M(t-s)(1+t-s)^{-alpha}(1+s)^{-beta} ds with
// M(tau) = max(1, tau^{-theta}). The singular piece tau in (0,1) is mapped by
// the exact substitution tau = sigma^{1/(1-theta)}, which removes the
// endpoint singularity analytically; both pieces then use composite
// Gauss-Legendre panels (geometric toward the peaks).
// ---------------------------------------------------------------------------
struct KernelSpec {
    double theta = 0.5;  // M(tau) = max(1, tau^{-theta}), 0 <= theta < 1

    static KernelSpec smoothing_n() { return {0.5}; }    // N, N0
    static KernelSpec smoothing_n1() { return {0.625}; } // N1
    static KernelSpec constant() { return {0.0}; }

    std::string label() const {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "max(1, tau^-%g)", theta);
        return buf;
    }
};

namespace detail {

inline const std::array<double, 8> kGL16X = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline const std::array<double, 8> kGL16W = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss16(double a, double b, F&& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        acc += kGL16W[static_cast<size_t>(i)] *
               (f(mid - half * kGL16X[static_cast<size_t>(i)]) +
                f(mid + half * kGL16X[static_cast<size_t>(i)]));
    }
    return acc * half;
}

template <class F>
double gauss_panels(double a, double b, int subdivisions, F&& f) {
    double acc = 0.0;
    const double h = (b - a) / subdivisions;
    for (int i = 0; i < subdivisions; ++i)
        acc += gauss16(a + i * h, a + (i + 1) * h, f);
    return acc;
}

}  // namespace detail

inline double lemma_c1_integral(double t, double alpha, double beta,
                                const KernelSpec& M, int refinement = 1) {
    if (!(t > 0.0)) return 0.0;
    const double theta = M.theta;
    const int sub = 4 * std::max(1, refinement);

    // singular piece: tau in (0, min(1,t)], M = tau^{-theta}
    const double tau1 = std::min(1.0, t);
    double singular;
    if (theta == 0.0) {
        singular = detail::gauss_panels(0.0, tau1, sub, [&](double tau) {
            return std::pow(1.0 + tau, -alpha) * std::pow(1.0 + t - tau, -beta);
        });
    } else {
        const double expo = 1.0 / (1.0 - theta);
        const double smax = std::pow(tau1, 1.0 - theta);
        singular = expo * detail::gauss_panels(0.0, smax, sub, [&](double s) {
            const double tau = std::pow(s, expo);
            return std::pow(1.0 + tau, -alpha) * std::pow(1.0 + t - tau, -beta);
        });
    }
    if (t <= 1.0) return singular;

    // smooth piece: tau in [1, t], M = 1, peaked at both ends -> geometric
    // panels from each endpoint, each split `refinement` times
    auto f = [&](double tau) {
        return std::pow(1.0 + tau, -alpha) * std::pow(1.0 + t - tau, -beta);
    };
    const double mid = 0.5 * (1.0 + t);
    double smooth = 0.0;
    double edge = 1.0;
    while (edge < mid) {
        const double next = std::min(mid, 2.0 * edge);
        smooth += detail::gauss_panels(edge, next, refinement, f);
        edge = next;
    }
    double dist = 0.0;  // distance from the right endpoint
    while (t - dist > mid) {
        const double step = std::max(1.0, dist);
        const double lo = std::max(mid, t - dist - step);
        smooth += detail::gauss_panels(lo, t - dist, refinement, f);
        dist = t - lo;
    }
    return singular + smooth;
}

struct LemmaC1Report {
    double alpha = 0.0, beta = 0.0;
    KernelSpec M;
    std::vector<double> t_grid;
    std::vector<double> I_values;
    std::vector<double> scaled;  // t^alpha * I(t)
    double sup_scaled = 0.0;
    double min_scaled_tail = 0.0;
    int refinement = 1;
};

inline LemmaC1Report verify_lemma_c1(double alpha, double beta, const KernelSpec& M,
                                     const std::vector<double>& t_grid,
                                     int refinement = 1) {
    if (!(alpha > 0.0))
        throw Error("verify_lemma_c1: hypothesis 0 < alpha violated (alpha = " +
                    std::to_string(alpha) + ")");
    if (!(alpha < beta))
        throw Error("verify_lemma_c1: hypothesis alpha < beta violated");
    if (!(beta > 1.0))
        throw Error("verify_lemma_c1: hypothesis beta > 1 violated (beta = " +
                    std::to_string(beta) + ")");
    if (!(M.theta >= 0.0 && M.theta < 1.0))
        throw Error("verify_lemma_c1: kernel exponent must lie in [0, 1)");

    LemmaC1Report rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.M = M;
    rep.t_grid = t_grid;
    rep.refinement = refinement;
    double tmax = 0.0;
    for (double t : t_grid) tmax = std::max(tmax, t);
    rep.min_scaled_tail = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double I = lemma_c1_integral(t, alpha, beta, M, refinement);
        const double scaled = std::pow(t, alpha) * I;
        rep.I_values.push_back(I);
        rep.scaled.push_back(scaled);
        rep.sup_scaled = std::max(rep.sup_scaled, scaled);
        if (t >= 0.1 * tmax) rep.min_scaled_tail = std::min(rep.min_scaled_tail, scaled);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Theorem 3.1 / 4.2 experiments: perturb, evolve, measure weighted norms,
// fit algebraic rates, compare with the predicted exponent m - k.
// ---------------------------------------------------------------------------
enum class TheoremKind { thm31, thm42 };

struct TheoremConfig {
    FluxSpec flux = FluxSpec::burgers_quadratic();
    double alpha = 3.0;  // thm42 only
    Grid1D grid = Grid1D::uniform(-100.0, 100.0, 4096);
    double k = 3.0;
    std::vector<double> m_list = {1.0, 1.5, 2.0};
    double delta = 1e-2;
    PerturbationSpec::Family family = PerturbationSpec::Family::poly_decay;
    double T = 80.0;
    double dt = 5e-3;
    double window_lo = 5.0;
    double window_hi = 80.0;
    double tolerance = 0.3;
    int snapshot_count = 40;
};

struct TheoremFitRow {
    Lp p = Lp::inf;
    double m = 0.0;
    double target = 0.0;  // m - k
    DecayFit fit;
    bool pass = false;
    double bound_ratio_max = 0.0;  // sup_window norm / (eps (1+t)^{m-k})
};

struct TheoremReport {
    TheoremKind kind = TheoremKind::thm31;
    double k = 0.0, delta = 0.0, epsilon = 0.0, h = 0.0;
    bool degenerate = false;  // delta == 0: no fit
    std::vector<TheoremFitRow> rows;
    std::vector<NormSeriesRow> norms;
    bool monotone_in_m = true;
    bool all_pass = false;
    double mass_drift = 0.0;
};

inline TheoremReport theorem_experiment(TheoremKind kind, const TheoremConfig& cfg) {
    if (!(cfg.k > 1.0))
        throw Error("theorem_experiment: the theorems require k > 1");
    for (double m : cfg.m_list)
        if (!(m > 0.0 && m < cfg.k))
            throw Error("theorem_experiment: need 0 < m < k, got m = " +
                        std::to_string(m));

    WaveProfile profile =
        (kind == TheoremKind::thm31)
            ? construct_burgers_profile(cfg.flux, cfg.grid)
            : construct_kdvb_profile(cfg.flux, cfg.alpha, cfg.grid);

    PerturbationSpec pspec;
    pspec.family = cfg.family;
    pspec.k = cfg.k;
    pspec.delta = cfg.delta;
    PerturbedInitial init = make_perturbed_initial(profile, pspec);

    TheoremReport rep;
    rep.kind = kind;
    rep.k = cfg.k;
    rep.delta = cfg.delta;
    rep.h = init.h;
    rep.epsilon = (kind == TheoremKind::thm31) ? init.epsilon(Lp::inf, cfg.k)
                                               : init.epsilon(Lp::two, cfg.k);

    if (cfg.delta == 0.0) {
        rep.degenerate = true;
        return rep;
    }

    NonlinearOptions opt;
    const double t0 = std::min(0.5, cfg.window_lo);
    const double ratio = std::pow(cfg.T / t0, 1.0 / (cfg.snapshot_count - 1));
    for (int j = 0; j < cfg.snapshot_count; ++j)
        opt.snapshot_times.push_back(t0 * std::pow(ratio, j));

    Trajectory traj = (kind == TheoremKind::thm31)
                          ? evolve_burgers(cfg.flux, profile, init.w0, cfg.T, cfg.dt, opt)
                          : evolve_kdvb(cfg.flux, cfg.alpha, profile, init.w0, cfg.T,
                                        cfg.dt, opt);
    rep.mass_drift = traj.mass_drift();

    std::vector<WeightSpec> weights;
    for (double m : cfg.m_list) weights.push_back(WeightSpec::polynomial(m));
    std::vector<Lp> p_list = (kind == TheoremKind::thm31)
                                 ? std::vector<Lp>{Lp::inf}
                                 : std::vector<Lp>{Lp::two, Lp::four, Lp::inf};

    for (Lp p : p_list) {
        const auto rows = norm_timeseries(traj, p, weights);
        rep.norms.insert(rep.norms.end(), rows.begin(), rows.end());
        double prev_slope = -std::numeric_limits<double>::infinity();
        for (double m : cfg.m_list) {
            const auto series = series_for_weight(rows, WeightSpec::polynomial(m));
            TheoremFitRow row;
            row.p = p;
            row.m = m;
            row.target = m - cfg.k;
            row.fit = fit_rate(series, DecayFit::Model::algebraic, cfg.window_lo,
                               cfg.window_hi);
            row.pass = std::abs(row.fit.exponent - row.target) <= cfg.tolerance;
            double bound_ratio = 0.0;
            for (const auto& [t, val] : series) {
                if (t < cfg.window_lo || t > cfg.window_hi) continue;
                bound_ratio = std::max(
                    bound_ratio, val / (rep.epsilon * std::pow(1.0 + t, row.target)));
            }
            row.bound_ratio_max = bound_ratio;
            rep.rows.push_back(row);
            if (row.fit.exponent < prev_slope - 1e-9) rep.monotone_in_m = false;
            prev_slope = row.fit.exponent;
        }
    }
    rep.all_pass = !rep.rows.empty();
    for (const auto& row : rep.rows)
        if (!row.pass) rep.all_pass = false;
    return rep;
}

inline nlohmann::json theorem_report_json(const TheoremReport& rep) {
    nlohmann::json j;
    j["kind"] = (rep.kind == TheoremKind::thm31) ? "thm31" : "thm42";
    j["k"] = rep.k;
    j["delta"] = rep.delta;
    j["epsilon"] = rep.epsilon;
    j["shift_h"] = rep.h;
    j["degenerate"] = rep.degenerate;
    j["monotone_in_m"] = rep.monotone_in_m;
    j["all_pass"] = rep.all_pass;
    j["mass_drift"] = rep.mass_drift;
    j["fits"] = nlohmann::json::array();
    for (const auto& row : rep.rows) {
        j["fits"].push_back({{"p", lp_label(row.p)},
                             {"m", row.m},
                             {"target", row.target},
                             {"slope", row.fit.exponent},
                             {"stderr", row.fit.stderr_slope},
                             {"samples", row.fit.samples},
                             {"window", {row.fit.t_lo, row.fit.t_hi}},
                             {"bound_ratio_max", row.bound_ratio_max},
                             {"pass", row.pass}});
    }
    return j;
}

inline void write_theorem_report(const TheoremReport& rep,
                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        out << theorem_report_json(rep).dump(2) << "\n";
    }
    // one CSV of plot data per (p, weight)
    std::set<std::pair<std::string, std::string>> done;
    for (const auto& row : rep.norms) {
        char mbuf[32];
        std::snprintf(mbuf, sizeof(mbuf), "%g", row.weight.k);
        const auto key = std::make_pair(lp_label(row.p), std::string(mbuf));
        if (!done.insert(key).second) continue;
        std::ofstream csv(dir / ("norms_p" + key.first + "_m" + key.second + ".csv"));
        csv << "t,norm\n";
        for (const auto& r : rep.norms)
            if (lp_label(r.p) == key.first && r.weight.k == row.weight.k)
                csv << format_double(r.t) << ',' << format_double(r.value) << '\n';
    }
}

}  // namespace wavedecay
