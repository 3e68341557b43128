#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wavedecay/error.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Polynomial flux f (or g) with exact value/derivative evaluators and the
// symbolic operations the profile normalization needs. Coefficients are
// stored in ascending order.
// ---------------------------------------------------------------------------
struct FluxSpec {
    std::vector<double> coeffs;  // ascending: c0 + c1 r + c2 r^2 + ...
    std::string name;

    static FluxSpec polynomial(std::vector<double> c, std::string label = "poly") {
        if (c.empty()) c.push_back(0.0);
        while (c.size() > 1 && c.back() == 0.0) c.pop_back();
        FluxSpec f;
        f.coeffs = std::move(c);
        f.name = std::move(label);
        return f;
    }

    // r^2 - r, the prototypical Burgers flux
    static FluxSpec burgers_quadratic() {
        return polynomial({0.0, -1.0, 1.0}, "burgers_quadratic");
    }

    // 2r(r-1)(b-r) = -2r^3 + 2(b+1)r^2 - 2br
    static FluxSpec kdvb_cubic(double b) {
        char label[48];
        std::snprintf(label, sizeof(label), "kdvb_cubic(%g)", b);
        return polynomial({0.0, -2.0 * b, 2.0 * (b + 1.0), -2.0}, label);
    }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    double value(double r) const {
        double acc = 0.0;
        for (size_t i = coeffs.size(); i-- > 0;) acc = acc * r + coeffs[i];
        return acc;
    }

    double d1(double r) const { return derivative().value(r); }
    double d2(double r) const { return derivative().derivative().value(r); }

    FluxSpec derivative() const {
        std::vector<double> d;
        for (size_t i = 1; i < coeffs.size(); ++i)
            d.push_back(coeffs[i] * static_cast<double>(i));
        return polynomial(std::move(d), name + "'");
    }

    // f(a r + b), expanded exactly
    FluxSpec compose_affine(double a, double b) const {
        std::vector<double> acc{0.0};
        // Horner in the polynomial ring: acc = acc*(a r + b) + c_i
        for (size_t i = coeffs.size(); i-- > 0;) {
            std::vector<double> next(acc.size() + 1, 0.0);
            for (size_t j = 0; j < acc.size(); ++j) {
                next[j + 1] += acc[j] * a;
                next[j] += acc[j] * b;
            }
            next[0] += coeffs[i];
            acc = std::move(next);
        }
        return polynomial(std::move(acc), name);
    }

    FluxSpec plus_linear(double slope, double intercept) const {
        std::vector<double> c = coeffs;
        if (c.size() < 2) c.resize(2, 0.0);
        c[0] += intercept;
        c[1] += slope;
        return polynomial(std::move(c), name);
    }

    FluxSpec scaled(double s) const {
        std::vector<double> c = coeffs;
        for (double& v : c) v *= s;
        return polynomial(std::move(c), name);
    }

    FluxSpec negated_argument() const { return compose_affine(-1.0, 0.0); }
};

}  // namespace wavedecay
