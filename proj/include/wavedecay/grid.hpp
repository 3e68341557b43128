#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "wavedecay/error.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Uniform 1-D grid. Points are x_i = xmin + i*dx, i = 0..n-1, with
// dx = (xmax - xmin)/(n - 1). The evolution modules reuse the same type and
// treat the samples as one period of a periodic extension (period n*dx).
// ---------------------------------------------------------------------------
struct Grid1D {
    double xmin = 0.0;
    double xmax = 1.0;
    int n = 3;
    double dx = 0.5;

    static Grid1D uniform(double xmin, double xmax, int n) {
        if (!(xmin < xmax))
            throw Error("Grid1D: xmin must be < xmax");
        if (n < 3)
            throw Error("Grid1D: need at least 3 points");
        Grid1D g;
        g.xmin = xmin;
        g.xmax = xmax;
        g.n = n;
        g.dx = (xmax - xmin) / static_cast<double>(n - 1);
        return g;
    }

    double point(int i) const { return xmin + dx * static_cast<double>(i); }

    std::vector<double> points() const {
        std::vector<double> xs(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = point(i);
        return xs;
    }

    bool operator==(const Grid1D& o) const {
        return xmin == o.xmin && xmax == o.xmax && n == o.n;
    }
};

// ---------------------------------------------------------------------------
// Weight selection for the norm families: 1, (1+|x|)^k, e^{rho*|x|}.
// The weight is >= 1 everywhere for all three kinds.
// ---------------------------------------------------------------------------
struct WeightSpec {
    enum class Kind { none, polynomial, exponential };

    Kind kind = Kind::none;
    double k = 0.0;    // polynomial order (kind == polynomial)
    double rho = 0.0;  // exponential rate (kind == exponential)

    static WeightSpec none() { return WeightSpec{}; }

    static WeightSpec polynomial(double k) {
        if (k < 0.0) throw Error("WeightSpec: polynomial order must be >= 0");
        WeightSpec w;
        w.kind = Kind::polynomial;
        w.k = k;
        return w;
    }

    static WeightSpec exponential(double rho) {
        if (!(rho > 0.0)) throw Error("WeightSpec: exponential rate must be > 0");
        WeightSpec w;
        w.kind = Kind::exponential;
        w.rho = rho;
        return w;
    }

    // log of the weight; exact and overflow-free for all x
    double log_weight(double x) const {
        switch (kind) {
            case Kind::none: return 0.0;
            case Kind::polynomial: return k * std::log1p(std::abs(x));
            case Kind::exponential: return rho * std::abs(x);
        }
        return 0.0;
    }

    double weight(double x) const { return std::exp(log_weight(x)); }

    std::string label() const {
        char buf[64];
        switch (kind) {
            case Kind::none: return "none";
            case Kind::polynomial:
                std::snprintf(buf, sizeof(buf), "poly(%g)", k);
                return buf;
            case Kind::exponential:
                std::snprintf(buf, sizeof(buf), "exp(%g)", rho);
                return buf;
        }
        return "none";
    }
};

// The only Lebesgue exponents the estimates use.
enum class Lp { one, two, four, inf };

inline double lp_value(Lp p) {
    switch (p) {
        case Lp::one: return 1.0;
        case Lp::two: return 2.0;
        case Lp::four: return 4.0;
        case Lp::inf: return std::numeric_limits<double>::infinity();
    }
    return 1.0;
}

inline std::string lp_label(Lp p) {
    switch (p) {
        case Lp::one: return "1";
        case Lp::two: return "2";
        case Lp::four: return "4";
        case Lp::inf: return "inf";
    }
    return "?";
}

struct NormValue {
    Lp p = Lp::two;
    WeightSpec weight;
    double value = 0.0;
};

// ---------------------------------------------------------------------------
// Sampled real function on a uniform grid; the universal carrier for
// u, w, v, phi, Psi. Values must be finite.
// ---------------------------------------------------------------------------
struct GridFunction {
    Grid1D grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != static_cast<size_t>(grid.n))
            throw Error("GridFunction: value count does not match grid");
    }

    static GridFunction zeros(const Grid1D& g) {
        return GridFunction(g, std::vector<double>(static_cast<size_t>(g.n), 0.0));
    }

    template <class F>
    static GridFunction sample(const Grid1D& g, F&& f) {
        std::vector<double> v(static_cast<size_t>(g.n));
        for (int i = 0; i < g.n; ++i) v[static_cast<size_t>(i)] = f(g.point(i));
        return GridFunction(g, std::move(v));
    }

    int size() const { return grid.n; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }

    bool all_finite() const {
        return std::all_of(values.begin(), values.end(),
                           [](double v) { return std::isfinite(v); });
    }
};

inline void require_finite(const GridFunction& f, const char* who) {
    for (int i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i]))
            throw Error(std::string(who) + ": non-finite value at x = " +
                        std::to_string(f.grid.point(i)));
}

// Trapezoid quadrature of the samples over [xmin, xmax].
inline double trapezoid(const GridFunction& f) {
    double acc = 0.5 * (f[0] + f[f.size() - 1]);
    for (int i = 1; i + 1 < f.size(); ++i) acc += f[i];
    return acc * f.grid.dx;
}

// ---------------------------------------------------------------------------
// Weighted norm. p < inf: trapezoid quadrature of (|f| w)^p, then p-th root;
// p = inf: max over the grid of |f| w. The integrand is assembled in log
// space so exponential weights cannot overflow silently; a genuine overflow
// is reported with the grid point that produced it.
// ---------------------------------------------------------------------------
inline NormValue weighted_norm(const GridFunction& f, Lp p, const WeightSpec& w) {
    require_finite(f, "weighted_norm");
    constexpr double log_max = 700.0;  // just under log(DBL_MAX)
    const double pv = lp_value(p);

    if (p == Lp::inf) {
        double best = 0.0;
        for (int i = 0; i < f.size(); ++i) {
            const double a = std::abs(f[i]);
            if (a == 0.0) continue;
            const double lg = std::log(a) + w.log_weight(f.grid.point(i));
            if (lg > log_max)
                throw Error("weighted_norm: overflow at x = " +
                            std::to_string(f.grid.point(i)));
            best = std::max(best, std::exp(lg));
        }
        return NormValue{p, w, best};
    }

    GridFunction integrand = GridFunction::zeros(f.grid);
    for (int i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        if (a == 0.0) continue;
        const double lg = pv * (std::log(a) + w.log_weight(f.grid.point(i)));
        if (lg > log_max)
            throw Error("weighted_norm: overflow at x = " +
                        std::to_string(f.grid.point(i)));
        integrand[i] = std::exp(lg);
    }
    return NormValue{p, w, std::pow(trapezoid(integrand), 1.0 / pv)};
}

inline double norm_value(const GridFunction& f, Lp p, const WeightSpec& w) {
    return weighted_norm(f, p, w).value;
}

// ---------------------------------------------------------------------------
// Cumulative trapezoid sum from the left boundary: Psi(x) = int_{xmin}^x f,
// the discrete stand-in for int_{-inf}^x. Warns (stderr) when f has not
// decayed at the left boundary.
// ---------------------------------------------------------------------------
inline GridFunction antiderivative(const GridFunction& f,
                                   double left_decay_tol = 1e-8) {
    require_finite(f, "antiderivative");
    if (std::abs(f[0]) > left_decay_tol)
        std::cerr << "wavedecay: antiderivative: |f(xmin)| = " << std::abs(f[0])
                  << " exceeds decay threshold " << left_decay_tol << "\n";
    GridFunction psi = GridFunction::zeros(f.grid);
    double acc = 0.0;
    for (int i = 1; i < f.size(); ++i) {
        acc += 0.5 * (f[i - 1] + f[i]) * f.grid.dx;
        psi[i] = acc;
    }
    return psi;
}

// Mass-conservation shift: h = int(u0 - phi) dx / (phi_minus - phi_plus).
// The profile-aware overload (with the contract check) lives in profiles.hpp.
inline double compute_shift_from_mass(const GridFunction& u0,
                                      const GridFunction& phi,
                                      double phi_minus, double phi_plus) {
    if (phi_minus == phi_plus)
        throw Error("compute_shift: degenerate profile (phi- == phi+)");
    if (!(u0.grid == phi.grid))
        throw Error("compute_shift: u0 and phi live on different grids");
    GridFunction diff = GridFunction::zeros(u0.grid);
    for (int i = 0; i < u0.size(); ++i) diff[i] = u0[i] - phi[i];
    require_finite(diff, "compute_shift");
    return trapezoid(diff) / (phi_minus - phi_plus);
}

// ---------------------------------------------------------------------------
// CSV serialization: two columns `x,value`, one-line header, 17 significant
// digits so finite doubles round-trip bit-exactly.
// ---------------------------------------------------------------------------
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const GridFunction& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_csv: cannot open " + path.string());
    out << "x,value\n";
    for (int i = 0; i < f.size(); ++i)
        out << format_double(f.grid.point(i)) << ',' << format_double(f[i]) << '\n';
    if (!out) throw Error("write_csv: write failed for " + path.string());
}

inline GridFunction read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error("read_csv: empty file " + path.string());
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error("read_csv: malformed line '" + line + "'");
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 3) throw Error("read_csv: fewer than 3 samples");
    Grid1D g = Grid1D::uniform(xs.front(), xs.back(), static_cast<int>(xs.size()));
    return GridFunction(g, std::move(vs));
}

}  // namespace wavedecay
