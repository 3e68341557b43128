#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wavedecay/kfunctional.hpp"

using namespace wavedecay;

namespace {

GridFunction random_test_function(const Grid1D& g, std::mt19937_64& rng) {
    std::normal_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> width(0.5, 4.0), center(-10.0, 10.0);
    const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
    const double w1 = width(rng), w2 = width(rng), w3 = width(rng);
    const double c1 = center(rng), c2 = center(rng), c3 = center(rng);
    return GridFunction::sample(g, [=](double x) {
        return a1 * std::exp(-std::pow((x - c1) / w1, 2)) +
               a2 * std::exp(-std::pow((x - c2) / w2, 2)) +
               a3 * std::exp(-std::pow((x - c3) / w3, 2));
    });
}

// closed form for H_l(r) = int_r^inf h_l, used by the tail-comparison check
double H_weight(double r, double l, double p) {
    if (r >= 0.0) return std::exp(-r);
    return 1.0 + (std::pow(1.0 - r, l * p) - 1.0) / (l * p);
}

}  // namespace

TEST_CASE("m_p closed-form values") {
    CHECK(m_p(0.5, Lp::one) == 0.5);
    CHECK(m_p(0.0, Lp::one) == 0.0);
    CHECK(m_p(0.0, Lp::two) == 0.0);
    CHECK(m_p(0.0, Lp::four) == 0.0);
    CHECK(m_p(1.0, Lp::two) == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(m_p(3.0, Lp::one) == 1.0);
    CHECK(m_p(2.0, Lp::inf) == 1.0);
}

TEST_CASE("sandwich m_1 <= 2 m_p <= 2 m_1 holds everywhere") {
    for (Lp p : {Lp::one, Lp::two, Lp::four}) {
        for (double lr = -30.0; lr <= 30.0; lr += 0.25) {
            const double r = std::exp(lr);
            const double m1 = m_p(r, Lp::one), mp = m_p(r, p);
            CHECK(m1 <= 2.0 * mp * (1.0 + 1e-12));
            CHECK(2.0 * mp <= 2.0 * m1 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("m_p_of_exp is stable and consistent") {
    for (Lp p : {Lp::one, Lp::two, Lp::four}) {
        for (double t = -20.0; t <= 20.0; t += 0.5)
            CHECK(m_p_of_exp(t, p) == Catch::Approx(m_p(std::exp(t), p)).epsilon(1e-13));
        CHECK(m_p_of_exp(800.0, p) == Catch::Approx(1.0));
        CHECK(m_p_of_exp(-800.0, p) < 1e-300);
        CHECK(std::isfinite(m_p_of_exp(800.0, p)));
    }
}

TEST_CASE("K functional of the zero function vanishes") {
    const Grid1D g = Grid1D::uniform(-20.0, 20.0, 401);
    const GridFunction u = GridFunction::zeros(g);
    for (Lp p : {Lp::one, Lp::two, Lp::four, Lp::inf})
        CHECK(k_functional_closed(u, 0.3, p).value == 0.0);
    CHECK(k_functional_inf(u, 0.3, Lp::two).value == 0.0);
}

TEST_CASE("K is bounded by the p-norm, nondecreasing in s, with the m_1 sandwich") {
    const Grid1D g = Grid1D::uniform(-25.0, 25.0, 1001);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const GridFunction u = random_test_function(g, rng);
        for (Lp p : {Lp::one, Lp::two, Lp::four, Lp::inf}) {
            const double np = norm_value(u, p, WeightSpec::none());
            double prev = 0.0;
            for (double s = -8.0; s <= 8.0; s += 0.5) {
                const double K = k_functional_closed(u, s, p).value;
                CHECK(K <= np * (1.0 + 1e-12));
                CHECK(K >= prev * (1.0 - 1e-12));  // nondecreasing
                prev = K;
            }
            // s -> +inf recovers the p-norm for (effectively) compactly supported u
            CHECK(k_functional_closed(u, 60.0, p).value ==
                  Catch::Approx(np).epsilon(1e-9));
        }
        // sandwich 2^{-p} int |u|^p m_1^p <= K^p <= int |u|^p m_1^p
        for (Lp p : {Lp::one, Lp::two, Lp::four}) {
            const double pv = lp_value(p);
            for (double s : {-3.0, 0.0, 2.0}) {
                GridFunction integrand = GridFunction::zeros(g);
                for (int i = 0; i < g.n; ++i)
                    integrand[i] = std::pow(std::abs(u[i]) *
                                                m_p_of_exp(s + std::abs(g.point(i)), Lp::one),
                                            pv);
                const double upper = trapezoid(integrand);
                const double Kp = std::pow(k_functional_closed(u, s, p).value, pv);
                CHECK(Kp <= upper * (1.0 + 1e-12));
                CHECK(Kp >= std::pow(2.0, -pv) * upper * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("closed form, explicit minimizer, and pointwise search agree") {
    const Grid1D g = Grid1D::uniform(-30.0, 30.0, 1201);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 4; ++trial) {
        const GridFunction u = random_test_function(g, rng);
        for (Lp p : {Lp::one, Lp::two, Lp::four}) {
            for (double s : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
                const double closed = k_functional_closed(u, s, p).value;
                const double inf1 = k_functional_inf(u, s, p).value;
                const double inf2 = k_functional_inf_search(u, s, p).value;
                CHECK(inf1 == Catch::Approx(closed).epsilon(1e-10));
                CHECK(inf2 == Catch::Approx(closed).epsilon(1e-8));
            }
        }
    }
    CHECK_THROWS_AS(k_functional_inf(random_test_function(g, rng), 0.0, Lp::inf), Error);
}

TEST_CASE("star norm: zero, homogeneity, equivalence band") {
    const Grid1D g = Grid1D::uniform(-40.0, 40.0, 1601);
    CHECK(star_norm(GridFunction::zeros(g), Lp::two, 2.0).value == 0.0);

    std::mt19937_64 rng(31);
    const GridFunction u = random_test_function(g, rng);
    const double base = star_norm(u, Lp::two, 2.0).value;
    GridFunction u2 = u;
    for (int i = 0; i < u2.size(); ++i) u2[i] *= 2.0;
    CHECK(star_norm(u2, Lp::two, 2.0).value == Catch::Approx(2.0 * base).epsilon(1e-10));

    // equivalence with ||.||_{p,k} across the family (1+|x|)^{-a}, a > k + 1/p
    const double k = 1.5;
    for (Lp p : {Lp::one, Lp::two}) {
        const double pv = lp_value(p);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double a : {k + 1.0 / pv + 0.75, k + 1.0 / pv + 1.5, k + 1.0 / pv + 3.0}) {
            const GridFunction f = GridFunction::sample(
                g, [a](double x) { return std::pow(1.0 + std::abs(x), -a); });
            const double ratio =
                star_norm(f, p, k).value / norm_value(f, p, WeightSpec::polynomial(k));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(lo > 0.0);
        CHECK(hi / lo < 10.0);  // stable band across the family
    }
    CHECK_THROWS_AS(star_norm(u, Lp::inf, 2.0), Error);
}

TEST_CASE("H_l tail comparison H_l(s+t) <= C H_k(s) (1+t)^{l-k}") {
    const double p = 2.0, k = 3.0, l = 1.5;
    // consistency of the closed form with quadrature of h_weight at two points
    for (double r : {-2.0, 1.0}) {
        double acc = 0.0;
        const double dr = 1e-4;
        for (double x = r; x < 40.0; x += dr)
            acc += 0.5 * (h_weight(x, l, p) + h_weight(x + dr, l, p)) * dr;
        CHECK(acc == Catch::Approx(H_weight(r, l, p)).epsilon(1e-3));
    }
    double sup = 0.0;
    for (double s = -30.0; s <= 30.0; s += 0.5)
        for (double t = 0.0; t <= 100.0; t += 2.5) {
            const double ratio = H_weight(s + t, l, p) * std::pow(1.0 + t, k - l) /
                                 H_weight(s, k, p);
            sup = std::max(sup, ratio);
        }
    CHECK(sup < 10.0);
    CHECK(sup > 0.1);
}

TEST_CASE("half-line shift: identity at t = 0 and exact weighted decay") {
    const Grid1D g = Grid1D::uniform(-200.0, 0.0, 20001);
    const GridFunction v =
        GridFunction::sample(g, [](double x) { return std::exp(x); });

    const GridFunction id = shift_semigroup_halfline(v, 0.0);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) worst = std::max(worst, std::abs(id[i] - v[i]));
    CHECK(worst < 1e-12);

    // ||S_t v||_{inf,rho=1} = e^{-t} ||v||_{inf,rho=1} for v = e^x (C0 = 1)
    const WeightSpec w1 = WeightSpec::exponential(1.0);
    const double n0 = norm_value(v, Lp::inf, w1);
    for (double t : {1.0, 3.0, 7.0}) {
        const GridFunction sv = shift_semigroup_halfline(v, t);
        CHECK(norm_value(sv, Lp::inf, w1) ==
              Catch::Approx(std::exp(-t) * n0).epsilon(1e-7));
    }

    // p = 2 with v = e^{1.2 x}: rate 1.2 <= ... decays at least like e^{-t}
    const GridFunction v2 =
        GridFunction::sample(g, [](double x) { return std::exp(1.2 * x); });
    const double m0 = norm_value(v2, Lp::two, w1);
    for (double t : {1.0, 4.0}) {
        const double mt = norm_value(shift_semigroup_halfline(v2, t), Lp::two, w1);
        CHECK(mt == Catch::Approx(std::exp(-1.2 * t) * m0).epsilon(1e-6));
        CHECK(mt <= std::exp(-t) * m0);
    }
}

TEST_CASE("half-line shift: weighted sup ratio matches the analytic maximization") {
    // oracle: sup_{y>=0} (1+y)^l (1+t+y)^{-kk} for v = (1-x)^{-kk}, attained at
    // y* = (l(1+t) - (kk-l))/(kk-l); for l = 1.5, kk = 3: y* = t - 1 + small
    const double kk = 3.0, l = 1.5;
    const Grid1D g = Grid1D::uniform(-4000.0, 0.0, 400001);
    const GridFunction v = GridFunction::sample(
        g, [kk](double x) { return std::pow(1.0 - x, -kk) * 1.0; });
    for (double t : {1.0, 10.0, 100.0, 900.0}) {
        const GridFunction sv = shift_semigroup_halfline(v, t);
        const double measured = norm_value(sv, Lp::inf, WeightSpec::polynomial(l));
        double oracle = 0.0;
        for (double y = 0.0; y <= 3500.0; y += 0.01)
            oracle = std::max(oracle, std::pow(1.0 + y, l) * std::pow(1.0 + t + y, -kk));
        CHECK(measured == Catch::Approx(oracle).epsilon(2e-3));
    }
}

TEST_CASE("half-line shift rejects insufficient tail coverage") {
    const Grid1D g = Grid1D::uniform(-50.0, 0.0, 501);
    const GridFunction v = GridFunction::sample(
        g, [](double x) { return std::pow(1.0 - x, -0.1); });
    CHECK_THROWS_WITH(shift_semigroup_halfline(v, 10.0),
                      Catch::Matchers::ContainsSubstring("coverage"));
}

TEST_CASE("verify_interpolation on the sharp half-line example") {
    const double kk = 3.0, l = 1.5;
    const Grid1D g = Grid1D::uniform(-4000.0, 0.0, 200001);
    const GridFunction v = GridFunction::sample(
        g, [kk](double x) { return std::pow(1.0 - x, -kk); });

    SemigroupFn S = [](const GridFunction& u, double t) {
        return shift_semigroup_halfline(u, t);
    };
    std::vector<double> ts;
    for (double t = 1.0; t <= 1000.0; t *= 2.0) ts.push_back(t);

    const InterpolationReport rep = verify_interpolation(S, v, Lp::inf, kk, l, ts);
    REQUIRE(rep.precondition_ok);
    CHECK(rep.measured_c0 <= 1.0 + 1e-9);
    CHECK(rep.measured_rate > 0.5);
    CHECK(rep.passed);
    CHECK(rep.sup_ratio < 1.0);
    CHECK(rep.min_ratio > 0.05);             // sharp: bounded away from zero
    CHECK(rep.sup_ratio / rep.min_ratio < 4.0);

    // t = 0 entry equals ||v||_{inf,l}/||v||_{inf,k} <= 1
    std::vector<double> with0 = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0};
    const InterpolationReport rep0 = verify_interpolation(S, v, Lp::inf, kk, l, with0);
    REQUIRE(rep0.precondition_ok);
    CHECK(rep0.rows.front().ratio ==
          Catch::Approx(norm_value(v, Lp::inf, WeightSpec::polynomial(l)) /
                        norm_value(v, Lp::inf, WeightSpec::polynomial(kk))));
    CHECK(rep0.rows.front().ratio <= 1.0);
}

TEST_CASE("verify_interpolation reports precondition violations without crashing") {
    const Grid1D g = Grid1D::uniform(-100.0, 0.0, 2001);
    const GridFunction v = GridFunction::sample(
        g, [](double x) { return std::pow(1.0 - x, -3.0); });
    // growing "semigroup" violating (2.1a)/(2.1b)
    SemigroupFn S = [](const GridFunction& u, double t) {
        GridFunction out = u;
        for (int i = 0; i < out.size(); ++i) out[i] *= std::exp(0.5 * t);
        return out;
    };
    const InterpolationReport rep =
        verify_interpolation(S, v, Lp::inf, 3.0, 1.5, {1.0, 2.0, 4.0, 8.0, 16.0});
    CHECK_FALSE(rep.precondition_ok);
    CHECK_FALSE(rep.precondition_message.empty());
    CHECK(rep.rows.empty());
}
