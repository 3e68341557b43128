#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "wavedecay/grid.hpp"
#include "wavedecay/profiles.hpp"

using namespace wavedecay;

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(x)); }
}  // namespace

TEST_CASE("Grid1D invariants") {
    const Grid1D g = Grid1D::uniform(-1.0, 1.0, 5);
    CHECK(g.dx == Catch::Approx(0.5));
    CHECK(g.point(0) == -1.0);
    CHECK(g.point(4) == 1.0);
    CHECK_THROWS_AS(Grid1D::uniform(1.0, -1.0, 5), Error);
    CHECK_THROWS_AS(Grid1D::uniform(0.0, 1.0, 2), Error);
}

TEST_CASE("weighted_norm on the zero function is zero") {
    const Grid1D g = Grid1D::uniform(-10.0, 10.0, 101);
    const GridFunction f = GridFunction::zeros(g);
    for (Lp p : {Lp::one, Lp::two, Lp::four, Lp::inf}) {
        CHECK(norm_value(f, p, WeightSpec::none()) == 0.0);
        CHECK(norm_value(f, p, WeightSpec::polynomial(2.5)) == 0.0);
        CHECK(norm_value(f, p, WeightSpec::exponential(0.5)) == 0.0);
    }
}

TEST_CASE("weight cancels the integrand: sup of (1+|x|)^-2 with poly(2) weight") {
    const Grid1D g = Grid1D::uniform(-50.0, 50.0, 2001);
    const GridFunction f = GridFunction::sample(
        g, [](double x) { return std::pow(1.0 + std::abs(x), -2.0); });
    CHECK(norm_value(f, Lp::inf, WeightSpec::polynomial(2.0)) ==
          Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("L1 norm of e^{-|x|} matches the analytic integral") {
    // oracle: int_{-40}^{40} e^{-|x|} dx = 2(1 - e^{-40})
    const double expected = 2.0 * (1.0 - std::exp(-40.0));
    const Grid1D g = Grid1D::uniform(-40.0, 40.0, 40001);
    const GridFunction f =
        GridFunction::sample(g, [](double x) { return std::exp(-std::abs(x)); });
    CHECK(norm_value(f, Lp::one, WeightSpec::none()) ==
          Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("norm homogeneity, weight monotonicity, triangle inequality") {
    const Grid1D g = Grid1D::uniform(-20.0, 20.0, 801);
    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> width(0.5, 3.0), center(-8.0, 8.0);

    auto random_fn = [&]() {
        const double a1 = amp(rng), a2 = amp(rng);
        const double w1 = width(rng), w2 = width(rng);
        const double c1 = center(rng), c2 = center(rng);
        return GridFunction::sample(g, [=](double x) {
            return a1 * std::exp(-std::pow((x - c1) / w1, 2)) +
                   a2 * std::exp(-std::pow((x - c2) / w2, 2));
        });
    };

    const std::vector<WeightSpec> weights = {WeightSpec::none(),
                                             WeightSpec::polynomial(1.5),
                                             WeightSpec::exponential(0.2)};
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction f = random_fn(), h = random_fn();
        const double c = amp(rng) * 3.0;
        for (Lp p : {Lp::one, Lp::two, Lp::four, Lp::inf}) {
            for (const WeightSpec& w : weights) {
                const double nf = norm_value(f, p, w);
                GridFunction cf = f;
                for (int i = 0; i < cf.size(); ++i) cf[i] *= c;
                CHECK(norm_value(cf, p, w) ==
                      Catch::Approx(std::abs(c) * nf).epsilon(1e-12).margin(1e-300));

                GridFunction sum = f;
                for (int i = 0; i < sum.size(); ++i) sum[i] += h[i];
                CHECK(norm_value(sum, p, w) <=
                      (nf + norm_value(h, p, w)) * (1.0 + 1e-12));
            }
            // k1 <= k2 => ||f||_{p,k1} <= ||f||_{p,k2}
            CHECK(norm_value(f, p, WeightSpec::polynomial(1.0)) <=
                  norm_value(f, p, WeightSpec::polynomial(2.0)) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("exponential weight overflow is reported with the grid point") {
    const Grid1D g = Grid1D::uniform(-800.0, 800.0, 1601);
    const GridFunction f = GridFunction::sample(g, [](double) { return 1.0; });
    CHECK_THROWS_WITH(weighted_norm(f, Lp::inf, WeightSpec::exponential(1.0)),
                      Catch::Matchers::ContainsSubstring("overflow"));
}

TEST_CASE("non-finite input is rejected") {
    const Grid1D g = Grid1D::uniform(-1.0, 1.0, 11);
    GridFunction f = GridFunction::zeros(g);
    f[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(weighted_norm(f, Lp::two, WeightSpec::none()), Error);
}

TEST_CASE("antiderivative of zero is zero") {
    const Grid1D g = Grid1D::uniform(-5.0, 5.0, 101);
    const GridFunction psi = antiderivative(GridFunction::zeros(g));
    for (int i = 0; i < psi.size(); ++i) CHECK(psi[i] == 0.0);
}

TEST_CASE("antiderivative of the logistic derivative recovers phi - 1") {
    const Grid1D g = Grid1D::uniform(-40.0, 40.0, 4001);
    const GridFunction f = GridFunction::sample(g, [](double x) {
        const double p = logistic(x);
        return -p * (1.0 - p);
    });
    const GridFunction psi = antiderivative(f);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(psi[i] - (logistic(g.point(i)) - 1.0)));
    CHECK(worst < 1e-5);
}

TEST_CASE("antiderivative of -2x e^{-x^2} against the analytic oracle") {
    // oracle: Psi(x) = e^{-x^2} - e^{-xmin^2}; cumulative trapezoid converges
    // at O(dx^2) with constant |f'|/12, so dx = 1e-2 gives ~3e-5
    auto err_at = [](int n) {
        const Grid1D g = Grid1D::uniform(-40.0, 40.0, n);
        const GridFunction f = GridFunction::sample(
            g, [](double x) { return -2.0 * x * std::exp(-x * x); });
        const GridFunction psi = antiderivative(f);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i)
            worst = std::max(worst, std::abs(psi[i] - std::exp(-std::pow(g.point(i), 2))));
        return worst;
    };
    const double e1 = err_at(8001);   // dx = 1e-2
    const double e2 = err_at(16001);  // dx = 5e-3
    CHECK(e1 < 5e-5);
    CHECK(e1 / e2 > 3.0);  // second order
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("centered differencing of the antiderivative reproduces f at O(dx^2)") {
    auto err_at = [](int n) {
        const Grid1D g = Grid1D::uniform(-15.0, 15.0, n);
        const GridFunction f =
            GridFunction::sample(g, [](double x) { return std::exp(-x * x) * x; });
        const GridFunction psi = antiderivative(f);
        double worst = 0.0;
        for (int i = 1; i + 1 < g.n; ++i) {
            const double fd = (psi[i + 1] - psi[i - 1]) / (2.0 * g.dx);
            worst = std::max(worst, std::abs(fd - f[i]));
        }
        return worst;
    };
    const double e1 = err_at(2001), e2 = err_at(4001);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("compute_shift examples") {
    const Grid1D g = Grid1D::uniform(-60.0, 60.0, 6001);
    const GridFunction phi = GridFunction::sample(g, logistic);

    SECTION("u0 = phi gives h = 0") {
        CHECK(std::abs(compute_shift_from_mass(phi, phi, 1.0, 0.0)) < 1e-12);
    }
    SECTION("u0 = phi(.-2) gives h = 2") {
        const GridFunction u0 =
            GridFunction::sample(g, [](double x) { return logistic(x - 2.0); });
        CHECK(compute_shift_from_mass(u0, phi, 1.0, 0.0) ==
              Catch::Approx(2.0).margin(1e-6));
    }
    SECTION("zero-mass bump derivative gives h = 0") {
        const GridFunction u0 = GridFunction::sample(g, [](double x) {
            return logistic(x) - 2.0 * x * std::exp(-x * x);
        });
        CHECK(std::abs(compute_shift_from_mass(u0, phi, 1.0, 0.0)) < 1e-10);
    }
    SECTION("degenerate end states are rejected") {
        CHECK_THROWS_AS(compute_shift_from_mass(phi, phi, 1.0, 1.0), Error);
    }
}

TEST_CASE("CSV round-trip is bit-exact") {
    const Grid1D g = Grid1D::uniform(-3.0, 7.0, 257);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-30.0, 30.0);
    GridFunction f = GridFunction::sample(g, [&](double) {
        return std::ldexp(mag(rng), static_cast<int>(mag(rng)));
    });
    f[0] = 0.0;
    f[1] = -0.0;
    f[2] = 1e-300;
    f[3] = -1.234567890123456e+15;

    const auto path = std::filesystem::temp_directory_path() / "wavedecay_rt.csv";
    write_csv(f, path);
    const GridFunction back = read_csv(path);
    REQUIRE(back.size() == f.size());
    for (int i = 0; i < f.size(); ++i) {
        const double a = f[i], b = back[i];
        CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
    }
    std::filesystem::remove(path);
}
