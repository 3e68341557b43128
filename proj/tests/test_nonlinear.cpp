#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wavedecay/linear_semigroups.hpp"
#include "wavedecay/nonlinear.hpp"
#include "wavedecay/profiles.hpp"

using namespace wavedecay;

namespace {

WaveProfile burgers_profile(const Grid1D& g) {
    return construct_burgers_profile(FluxSpec::burgers_quadratic(), g);
}

// exact grid translate by an integer number of cells; the vacated cells are
// filled with the saturated end-state values
GridFunction integer_translate(const WaveProfile& p, int cells) {
    const Grid1D& g = p.phi.grid;
    GridFunction out = GridFunction::zeros(g);
    for (int i = 0; i < g.n; ++i) {
        const int j = i - cells;
        out[i] = (j < 0) ? p.phi_minus : (j >= g.n ? p.phi_plus : p.phi[j]);
    }
    return out;
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST_CASE("zero perturbation stays zero (profiles are steady states)") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 1024);
    const WaveProfile pb = burgers_profile(g);
    const Trajectory tb =
        evolve_burgers(pb.flux, pb, GridFunction::zeros(g), 1.0, 0.01);
    for (const auto& snap : tb.snapshots)
        for (int i = 0; i < snap.size(); ++i) CHECK(std::abs(snap[i]) < 1e-12);

    const WaveProfile pk = construct_kdvb_profile(FluxSpec::kdvb_cubic(2.0), 3.0, g);
    const Trajectory tk =
        evolve_kdvb(pk.flux, 3.0, pk, GridFunction::zeros(g), 1.0, 0.005);
    for (const auto& snap : tk.snapshots)
        for (int i = 0; i < snap.size(); ++i) CHECK(std::abs(snap[i]) < 1e-12);
}

TEST_CASE("profile translates are preserved by the discrete flow") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 2048);
    const double T = 2.0;

    SECTION("viscous") {
        const WaveProfile p = burgers_profile(g);
        GridFunction w0 = integer_translate(p, 16);
        for (int i = 0; i < g.n; ++i) w0[i] -= p.phi[i];
        NonlinearOptions opt;
        opt.snapshot_times = {T};
        const Trajectory traj = evolve_burgers(p.flux, p, w0, T, 0.01, opt);
        CHECK(sup_diff(traj.snapshots.back(), w0) < 1e-10 * T);
    }
    SECTION("kdvb") {
        const WaveProfile p = construct_kdvb_profile(FluxSpec::kdvb_cubic(2.0), 3.0, g);
        GridFunction w0 = integer_translate(p, 16);
        for (int i = 0; i < g.n; ++i) w0[i] -= p.phi[i];
        NonlinearOptions opt;
        opt.snapshot_times = {T};
        const Trajectory traj = evolve_kdvb(p.flux, 3.0, p, w0, T, 0.005, opt);
        CHECK(sup_diff(traj.snapshots.back(), w0) < 1e-10 * T);
    }
}

TEST_CASE("mass is conserved along nonlinear runs") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 2048);
    const WaveProfile p = burgers_profile(g);
    const PerturbedInitial init =
        make_perturbed_initial(p, PerturbationSpec::poly_decay(3.0, 1e-2));
    NonlinearOptions opt;
    for (double t = 1.0; t <= 10.0; t += 1.0) opt.snapshot_times.push_back(t);
    const Trajectory traj = evolve_burgers(p.flux, p, init.w0, 10.0, 0.01, opt);
    CHECK(traj.mass_drift() < 1e-8 * (1.0 + 10.0));
}

TEST_CASE("exact flux difference is quadratic with cubic remainder") {
    const FluxSpec g = FluxSpec::kdvb_cubic(2.0);
    const Grid1D grid = Grid1D::uniform(-50.0, 50.0, 2001);
    const WaveProfile p = construct_kdvb_profile(g, 3.0, grid);
    for (double delta : {1e-1, 1e-2, 1e-3}) {
        double worst = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const double w = delta * std::exp(-std::pow(grid.point(i) / 10.0, 2));
            const double exact = g.value(p.phi[i] + w) - g.value(p.phi[i]);
            const double quad = g.d1(p.phi[i]) * w + 0.5 * g.d2(p.phi[i]) * w * w;
            worst = std::max(worst, std::abs(exact - quad));
        }
        // remainder = |g'''|/6 w^3 = 2 w^3 for the cubic family
        CHECK(worst <= 2.0 * delta * delta * delta * 1.01);
        CHECK(worst >= 2.0 * delta * delta * delta * 0.5);
    }
}

TEST_CASE("linearized limit: trajectories divided by delta converge at rate O(delta)") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 2048);
    const WaveProfile p = burgers_profile(g);
    const double T = 3.0, dt = 0.01;
    NonlinearOptions opt;
    opt.snapshot_times = {T};

    auto scaled_final = [&](double delta) {
        const PerturbedInitial init = make_perturbed_initial(
            p, PerturbationSpec::derivative_of_gaussian(delta));
        const Trajectory traj = evolve_burgers(p.flux, p, init.w0, T, dt, opt);
        GridFunction out = traj.snapshots.back();
        for (int i = 0; i < g.n; ++i) out[i] /= delta;
        return out;
    };

    const GridFunction ref = scaled_final(1e-5);  // near-linear reference
    const GridFunction a = scaled_final(1e-2);
    const GridFunction b = scaled_final(1e-3);
    const double da = sup_diff(a, ref), db = sup_diff(b, ref);
    CHECK(da / db > 5.0);   // first order in delta
    CHECK(da / db < 20.0);

    // cross-check against the conservative linearization evolved with the
    // parabolic scheme: c = f'(phi), d = c'
    GridFunction c = GridFunction::zeros(g), d = GridFunction::zeros(g);
    for (int i = 0; i < g.n; ++i) c[i] = p.flux.d1(p.phi[i]);
    d = stencil_d1(c);
    auto op = LinearOperatorSpec::parabolic(c, d);
    const PerturbedInitial tiny = make_perturbed_initial(
        p, PerturbationSpec::derivative_of_gaussian(1.0));
    EvolveOptions lopt;
    lopt.snapshot_times = {T};
    const Trajectory lin = evolve_parabolic(op, tiny.w0, T, 0.005, lopt);
    const double scale = norm_value(lin.snapshots.back(), Lp::inf, WeightSpec::none());
    CHECK(sup_diff(lin.snapshots.back(), ref) < 0.02 * scale);
}

TEST_CASE("time-step convergence of the integrating-factor stepper is 4th order") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 1024);
    const WaveProfile p = burgers_profile(g);
    const PerturbedInitial init =
        make_perturbed_initial(p, PerturbationSpec::gaussian(0.1));
    const double T = 1.0;
    NonlinearOptions opt;
    opt.snapshot_times = {T};

    auto final_at = [&](double dt) {
        return evolve_burgers(p.flux, p, init.w0, T, dt, opt).snapshots.back();
    };
    const GridFunction ref = final_at(0.0025);
    const double e1 = sup_diff(final_at(0.04), ref);
    const double e2 = sup_diff(final_at(0.02), ref);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.5);
    CHECK(order < 4.7);
}

TEST_CASE("grid convergence on smooth data is at least second order") {
    const double T = 1.0, dt = 0.005;
    auto final_on = [&](int n) {
        const Grid1D g = Grid1D::uniform(-100.0, 100.0, n);
        const WaveProfile p = burgers_profile(g);
        const PerturbedInitial init = make_perturbed_initial(
            p, PerturbationSpec::gaussian(0.1));
        NonlinearOptions opt;
        opt.snapshot_times = {T};
        const Trajectory traj = evolve_burgers(p.flux, p, init.w0, T, dt, opt);
        return norm_value(traj.snapshots.back(), Lp::inf, WeightSpec::none());
    };
    const double nref = final_on(4096);
    const double e1 = std::abs(final_on(512) - nref);
    const double e2 = std::abs(final_on(1024) - nref);
    CHECK(e1 / std::max(e2, 1e-15) > 4.0);  // order >= 2 (spectral in practice)
}

TEST_CASE("make_perturbed_initial families") {
    // grid contains x = +-1, where the poly_decay weighted sup is attained
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 8001);
    const WaveProfile p = burgers_profile(g);

    SECTION("poly_decay pins ||Psi||_{inf,k} = delta") {
        const PerturbedInitial init =
            make_perturbed_initial(p, PerturbationSpec::poly_decay(3.0, 1e-2));
        CHECK(init.h == 0.0);
        CHECK(init.epsilon_inf == Catch::Approx(1e-2).epsilon(1e-8));
        CHECK(init.epsilon_2 > 0.0);
    }
    SECTION("k <= 1 is rejected for theorem experiments") {
        CHECK_THROWS_WITH(
            make_perturbed_initial(p, PerturbationSpec::poly_decay(1.0, 1e-2)),
            Catch::Matchers::ContainsSubstring("k > 1"));
    }
    SECTION("delta = 0 gives the zero perturbation") {
        const PerturbedInitial init =
            make_perturbed_initial(p, PerturbationSpec::poly_decay(3.0, 0.0));
        CHECK(init.h == 0.0);
        CHECK(norm_value(init.w0, Lp::inf, WeightSpec::none()) == 0.0);
        CHECK(norm_value(init.psi, Lp::inf, WeightSpec::none()) == 0.0);
    }
    SECTION("derivative_of(gaussian) has zero mass and the gaussian Psi") {
        const double delta = 2.5e-3;
        const PerturbedInitial init = make_perturbed_initial(
            p, PerturbationSpec::derivative_of_gaussian(delta));
        CHECK(init.h == 0.0);
        CHECK(std::abs(trapezoid(init.w0)) < 1e-12);
        // Psi = delta e^{-x^2}; epsilon in the (inf, k) norm equals
        // delta * sup (1+|x|)^k e^{-x^2}
        double oracle = 0.0;
        for (int i = 0; i < g.n; ++i)
            oracle = std::max(oracle, std::pow(1.0 + std::abs(g.point(i)), 3.0) *
                                          std::exp(-std::pow(g.point(i), 2)));
        CHECK(init.epsilon(Lp::inf, 3.0) ==
              Catch::Approx(delta * oracle).epsilon(1e-6));
    }
    SECTION("gaussian carries mass and a nonzero shift") {
        const double delta = 1e-2;
        const PerturbedInitial init =
            make_perturbed_initial(p, PerturbationSpec::gaussian(delta));
        CHECK(init.h == Catch::Approx(delta * std::sqrt(M_PI)).epsilon(1e-6));
        // Psi is measured against the shifted target, so it decays and has
        // finite weighted norms
        CHECK(std::isfinite(init.epsilon(Lp::inf, 3.0)));
        CHECK(std::abs(init.psi[g.n - 1]) < 1e-6);
    }
}

TEST_CASE("blow-up detector aborts with the offending time") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 1024);
    const WaveProfile p = burgers_profile(g);
    GridFunction w0 = GridFunction::sample(
        g, [](double x) { return 5.0 * std::exp(-x * x / 4.0); });
    NonlinearOptions opt;
    opt.blowup_factor = 0.5;  // any persistent amplitude trips the detector
    CHECK_THROWS_WITH(evolve_burgers(p.flux, p, w0, 1.0, 0.005, opt),
                      Catch::Matchers::ContainsSubstring("blow-up"));
}

TEST_CASE("nonlinear CFL precondition is enforced") {
    const Grid1D g = Grid1D::uniform(-100.0, 100.0, 4096);
    const WaveProfile p = burgers_profile(g);
    const PerturbedInitial init =
        make_perturbed_initial(p, PerturbationSpec::poly_decay(3.0, 1e-2));
    CHECK_THROWS_WITH(evolve_burgers(p.flux, p, init.w0, 1.0, 0.1),
                      Catch::Matchers::ContainsSubstring("CFL"));
}
