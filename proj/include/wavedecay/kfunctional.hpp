#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavedecay/fit.hpp"
#include "wavedecay/grid.hpp"
#include "wavedecay/interpolate.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// m_p(r) = r / (1 + r^{p/(p-1)})^{(p-1)/p} for 1 < p < inf, min(1, r) for
// p = 1 (and for p = inf). Evaluated branch-wise so neither r^q nor r^{-q}
// overflows.
// ---------------------------------------------------------------------------
inline double m_p(double r, Lp p) {
    if (r < 0.0) throw Error("m_p: r must be >= 0");
    if (p == Lp::one || p == Lp::inf) return std::min(1.0, r);
    const double pv = lp_value(p);
    const double q = pv / (pv - 1.0);
    if (r == 0.0) return 0.0;
    if (r >= 1.0) return std::pow(1.0 + std::pow(r, -q), -1.0 / q);
    return r * std::pow(1.0 + std::pow(r, q), -1.0 / q);
}

// m_p(e^t), stable for large |t| (limit 1 as t -> +inf, ~ e^t as t -> -inf)
inline double m_p_of_exp(double t, Lp p) {
    if (p == Lp::one || p == Lp::inf) return std::exp(std::min(t, 0.0));
    const double pv = lp_value(p);
    const double q = pv / (pv - 1.0);
    if (t >= 0.0) return std::exp(-std::log1p(std::exp(-q * t)) / q);
    return std::exp(t - std::log1p(std::exp(q * t)) / q);
}

struct KFunctionalResult {
    double s = 0.0;
    Lp p = Lp::two;
    double value = 0.0;
    enum class Method { closed_form, infimum, infimum_search } method = Method::closed_form;
};

// ---------------------------------------------------------------------------
// K(s,u) = ( int (|u(x)| m_p(e^{s+|x|}))^p dx )^{1/p}; max over the grid for
// p = inf.
// ---------------------------------------------------------------------------
inline KFunctionalResult k_functional_closed(const GridFunction& u, double s, Lp p) {
    require_finite(u, "k_functional_closed");
    if (p == Lp::inf) {
        double best = 0.0;
        for (int i = 0; i < u.size(); ++i)
            best = std::max(best, std::abs(u[i]) *
                                      m_p_of_exp(s + std::abs(u.grid.point(i)), p));
        return {s, p, best, KFunctionalResult::Method::closed_form};
    }
    const double pv = lp_value(p);
    GridFunction integrand = GridFunction::zeros(u.grid);
    for (int i = 0; i < u.size(); ++i) {
        const double m = m_p_of_exp(s + std::abs(u.grid.point(i)), p);
        integrand[i] = std::pow(std::abs(u[i]) * m, pv);
    }
    return {s, p, std::pow(trapezoid(integrand), 1.0 / pv),
            KFunctionalResult::Method::closed_form};
}

// ---------------------------------------------------------------------------
// The infimum form (2.3), evaluated with the explicit minimizer
// v0 = u / (1 + e^{(s+|x|) p/(p-1)}) for p > 1 and the cutoff rule for p = 1.
// ---------------------------------------------------------------------------
inline KFunctionalResult k_functional_inf(const GridFunction& u, double s, Lp p) {
    require_finite(u, "k_functional_inf");
    if (p == Lp::inf)
        throw Error("k_functional_inf: the pointwise decoupling is for p < inf");
    const double pv = lp_value(p);
    GridFunction integrand = GridFunction::zeros(u.grid);
    if (p == Lp::one) {
        for (int i = 0; i < u.size(); ++i) {
            const double t = s + std::abs(u.grid.point(i));
            // v0 = u where s+|x| <= 0, else 0
            integrand[i] = (t <= 0.0) ? std::abs(u[i]) * std::exp(t) : std::abs(u[i]);
        }
    } else {
        const double q = pv / (pv - 1.0);
        for (int i = 0; i < u.size(); ++i) {
            const double a = std::abs(u[i]);
            if (a == 0.0) continue;
            const double t = s + std::abs(u.grid.point(i));
            const double qt = q * t;
            const double log1pe = (qt > 0.0) ? qt + std::log1p(std::exp(-qt))
                                             : std::log1p(std::exp(qt));
            // |u - v0|^p + e^{pt} |v0|^p, assembled in log space
            const double term1 = std::exp(pv * (qt - log1pe));
            const double term2 = std::exp(pv * (t - log1pe));
            integrand[i] = std::pow(a, pv) * (term1 + term2);
        }
    }
    return {s, p, std::pow(trapezoid(integrand), 1.0 / pv),
            KFunctionalResult::Method::infimum};
}

// ---------------------------------------------------------------------------
// Independent route: per-point golden-section minimization of
// |u - zeta|^p + e^{p(s+|x|)} zeta^p over zeta in [0, |u|].
// ---------------------------------------------------------------------------
inline KFunctionalResult k_functional_inf_search(const GridFunction& u, double s, Lp p) {
    require_finite(u, "k_functional_inf_search");
    if (p == Lp::inf)
        throw Error("k_functional_inf_search: the pointwise decoupling is for p < inf");
    const double pv = lp_value(p);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    GridFunction integrand = GridFunction::zeros(u.grid);
    for (int i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        if (a == 0.0) continue;
        const double t = s + std::abs(u.grid.point(i));
        if (t > 60.0) {  // weight overwhelms: minimizer ~ 0, value -> |u|^p
            integrand[i] = std::pow(a, pv);
            continue;
        }
        const double ept = std::exp(pv * t);
        auto cost = [&](double z) {
            return std::pow(a - z, pv) + ept * std::pow(z, pv);
        };
        double lo = 0.0, hi = a;
        double c1 = hi - invphi * (hi - lo);
        double c2 = lo + invphi * (hi - lo);
        double f1 = cost(c1), f2 = cost(c2);
        for (int it = 0; it < 120; ++it) {
            if (f1 < f2) {
                hi = c2; c2 = c1; f2 = f1;
                c1 = hi - invphi * (hi - lo);
                f1 = cost(c1);
            } else {
                lo = c1; c1 = c2; f1 = f2;
                c2 = lo + invphi * (hi - lo);
                f2 = cost(c2);
            }
        }
        integrand[i] = std::min(f1, f2);
    }
    return {s, p, std::pow(trapezoid(integrand), 1.0 / pv),
            KFunctionalResult::Method::infimum_search};
}

// ---------------------------------------------------------------------------
// h_k weight of (2.4) and the equivalent norm
// ||u||_*^p = int K(s,u)^p h_k(s) ds over an adaptively truncated s-range.
// ---------------------------------------------------------------------------
inline double h_weight(double s, double k, double p) {
    return (s >= 0.0) ? std::exp(-s) : std::pow(1.0 - s, k * p - 1.0);
}

struct StarNormResult {
    Lp p = Lp::two;
    double k = 0.0;
    double value = 0.0;
    double s_lo = 0.0, s_hi = 0.0;
    double ds = 0.0;
    double tail_bound = 0.0;

    std::string s_quadrature() const {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "trapezoid on [%g, %g], ds = %g", s_lo, s_hi, ds);
        return buf;
    }
};

inline StarNormResult star_norm(const GridFunction& u, Lp p, double k,
                                double ds = 0.05) {
    if (p == Lp::inf) throw Error("star_norm: p < inf required");
    if (!(k > 0.0)) throw Error("star_norm: k must be > 0");
    const double pv = lp_value(p);

    auto integrand = [&](double s) {
        const double K = k_functional_closed(u, s, p).value;
        return std::pow(K, pv) * h_weight(s, k, pv);
    };

    double s_lo = -5.0, s_hi = 5.0;
    double integral = 0.0;
    auto recompute = [&]() {
        const int steps = static_cast<int>(std::ceil((s_hi - s_lo) / ds));
        const double h = (s_hi - s_lo) / steps;
        double acc = 0.5 * (integrand(s_lo) + integrand(s_hi));
        for (int i = 1; i < steps; ++i) acc += integrand(s_lo + h * i);
        integral = acc * h;
    };
    recompute();
    const double norm_p = std::pow(norm_value(u, p, WeightSpec::none()), pv);
    for (int rounds = 0; rounds < 40; ++rounds) {
        const double tail_r = norm_p * std::exp(-s_hi);  // K^p <= |u|_p^p
        const double tail_l = integrand(s_lo) * (2.0 / pv);
        const double tol = 1e-12 * std::max(integral, 1e-300);
        bool grew = false;
        if (tail_r > tol) { s_hi += 5.0; grew = true; }
        if (tail_l > tol) { s_lo -= 5.0; grew = true; }
        if (!grew) break;
        recompute();
    }

    StarNormResult res;
    res.p = p;
    res.k = k;
    res.value = std::pow(integral, 1.0 / pv);
    res.s_lo = s_lo;
    res.s_hi = s_hi;
    res.ds = ds;
    res.tail_bound = norm_p * std::exp(-s_hi) + integrand(s_lo) * (2.0 / pv);
    return res;
}

// ---------------------------------------------------------------------------
// The sharp example: right shift on the half line (-inf, 0],
// S_t v(x) = v(x - t). Far-left values outside the grid are admitted as zero
// only when the stored left tail is already below tolerance.
// ---------------------------------------------------------------------------
inline GridFunction shift_semigroup_halfline(const GridFunction& v, double t,
                                             double tail_tol = 1e-8) {
    if (t < 0.0) throw Error("shift_semigroup_halfline: t must be >= 0");
    if (v.grid.xmax > 1e-12)
        throw Error("shift_semigroup_halfline: grid must live on (-inf, 0]");
    GridFunction out = GridFunction::zeros(v.grid);
    for (int i = 0; i < v.size(); ++i) {
        const double y = v.grid.point(i) - t;
        if (y < v.grid.xmin) {
            if (std::abs(v[0]) > tail_tol)
                throw Error("shift_semigroup_halfline: insufficient left-tail "
                            "coverage (|v(xmin)| = " + std::to_string(std::abs(v[0])) +
                            ")");
            out[i] = 0.0;
        } else {
            out[i] = sample_cubic(v, y, 0.0, v[v.size() - 1]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Empirical verification of the interpolation estimate: table of
// ||S_t v||_{p,l} (1+t)^{k-l} / ||v||_{p,k} over a t-grid, after checking the
// hypotheses (unweighted boundedness and exponential weighted decay) on an
// exponentially decaying probe.
// ---------------------------------------------------------------------------
using SemigroupFn = std::function<GridFunction(const GridFunction&, double)>;

struct InterpolationOptions {
    double rho = 1.0;            // exponential weight for the (2.1b) check
    double c0_bound = 4.0;       // allowed constant in (2.1a)
    double min_decay_rate = 0.02;  // required rate in the (2.1b) fit
    double ratio_bound = 50.0;   // pass bound for the ratio table
    const GridFunction* probe = nullptr;  // defaults to e^{-(rho+0.2)|x|}-type data
};

struct InterpolationRow {
    double t = 0.0;
    double ratio = 0.0;
    bool pass = false;
};

struct InterpolationReport {
    Lp p = Lp::inf;
    double k = 0.0, l = 0.0;
    bool precondition_ok = false;
    std::string precondition_message;
    double measured_c0 = 0.0;      // (2.1a) on the family
    double measured_rate = 0.0;    // (2.1b) exponential rate on the probe
    double measured_c0_rho = 0.0;  // (2.1b) prefactor
    std::vector<InterpolationRow> rows;
    double sup_ratio = 0.0;
    double min_ratio = 0.0;
    bool passed = false;
};

inline InterpolationReport verify_interpolation(const SemigroupFn& S,
                                                const GridFunction& v, Lp p, double k,
                                                double l,
                                                const std::vector<double>& t_grid,
                                                const InterpolationOptions& opt = {}) {
    if (!(l > 0.0 && l < k)) throw Error("verify_interpolation: need 0 < l < k");
    InterpolationReport rep;
    rep.p = p;
    rep.k = k;
    rep.l = l;

    // (2.1a): unweighted boundedness along the family
    const double base_p = norm_value(v, p, WeightSpec::none());
    // (2.1b): weighted exponential decay on an exponentially decaying probe
    GridFunction probe = opt.probe
                             ? *opt.probe
                             : GridFunction::sample(v.grid, [&](double x) {
                                   return std::exp(-(opt.rho + 0.2) * std::abs(x));
                               });
    const WeightSpec wrho = WeightSpec::exponential(opt.rho);
    std::vector<std::pair<double, double>> decay_series;
    double c0 = 0.0;
    for (double t : t_grid) {
        if (t <= 0.0) continue;
        const GridFunction sv = S(v, t);
        c0 = std::max(c0, norm_value(sv, p, WeightSpec::none()) / base_p);
        const GridFunction sp = S(probe, t);
        decay_series.emplace_back(t, norm_value(sp, p, wrho));
    }
    rep.measured_c0 = c0;
    bool ok = c0 <= opt.c0_bound;
    std::string msg;
    if (!ok) msg = "unweighted bound (2.1a) violated: C0 = " + std::to_string(c0);
    try {
        const double t_hi = decay_series.back().first;
        const DecayFit fit = fit_rate(decay_series, DecayFit::Model::exponential,
                                      decay_series.front().first * 0.5, t_hi);
        rep.measured_rate = -fit.exponent;
        const double probe0 = norm_value(probe, p, wrho);
        double c0r = 0.0;
        for (const auto& [t, val] : decay_series)
            c0r = std::max(c0r, val * std::exp(rep.measured_rate * t) / probe0);
        rep.measured_c0_rho = c0r;
        if (rep.measured_rate < opt.min_decay_rate) {
            ok = false;
            msg += std::string(msg.empty() ? "" : "; ") +
                   "weighted decay (2.1b) too slow: rate = " +
                   std::to_string(rep.measured_rate);
        }
    } catch (const Error& e) {
        ok = false;
        msg += std::string(msg.empty() ? "" : "; ") + "decay fit failed: " + e.what();
    }
    rep.precondition_ok = ok;
    rep.precondition_message = msg;
    if (!ok) return rep;  // precondition-violated report, not a crash

    const double base_k = norm_value(v, p, WeightSpec::polynomial(k));
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const GridFunction sv = S(v, t);
        const double num = norm_value(sv, p, WeightSpec::polynomial(l));
        const double ratio = num * std::pow(1.0 + t, k - l) / base_k;
        InterpolationRow row{t, ratio, ratio <= opt.ratio_bound};
        rep.rows.push_back(row);
        rep.sup_ratio = std::max(rep.sup_ratio, ratio);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
    }
    rep.passed = rep.sup_ratio <= opt.ratio_bound;
    return rep;
}

inline void write_interpolation_report(const InterpolationReport& rep,
                                       const std::filesystem::path& dir,
                                       const std::string& stem = "interp") {
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / (stem + ".csv"));
        csv << "t,norm_ratio,pass\n";
        for (const auto& row : rep.rows)
            csv << format_double(row.t) << ',' << format_double(row.ratio) << ','
                << (row.pass ? 1 : 0) << '\n';
    }
    nlohmann::json j;
    j["p"] = lp_label(rep.p);
    j["k"] = rep.k;
    j["l"] = rep.l;
    j["precondition_ok"] = rep.precondition_ok;
    j["precondition_message"] = rep.precondition_message;
    j["measured_c0"] = rep.measured_c0;
    j["measured_rate"] = rep.measured_rate;
    j["measured_c0_rho"] = rep.measured_c0_rho;
    j["sup_ratio"] = rep.sup_ratio;
    j["min_ratio"] = rep.min_ratio;
    j["passed"] = rep.passed;
    std::ofstream js(dir / (stem + ".json"));
    js << j.dump(2) << "\n";
}

}  // namespace wavedecay
