#include "delayrc/dde_core.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

using namespace delayrc;
using cd = std::complex<double>;

namespace {

LaserParams quiet(double kappa, double tau, double pump = 0.05, double t_lk = 1.0) {
    LaserParams p;
    p.kappa = kappa;
    p.tau = tau;
    p.pump = pump;
    p.t_lk = t_lk;
    p.noise = 0.0;
    return p;
}

}  // namespace

TEST_CASE("grid snapping accepts multiples of dt and rejects the rest") {
    CHECK(steps_on_grid(1.0, 0.01, "x") == 100);
    CHECK(steps_on_grid(500.0, 0.01, "x") == 50000);
    CHECK(steps_on_grid(0.0, 0.01, "x") == 0);
    CHECK_THROWS_AS((void)steps_on_grid(0.015, 0.01, "x"), std::invalid_argument);
    CHECK_THROWS_AS((void)steps_on_grid(1.0, 0.0, "x"), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    LaserParams p = quiet(0.1, 10.0);
    CHECK_NOTHROW(p.validate());
    p.tau = 10.005;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.tau = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = quiet(0.1, 10.0);
    p.t_lk = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = quiet(0.1, 10.0);
    p.noise = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("rate equations match the complex-valued form") {
    LaserParams p = quiet(0.13, 10.0, 0.07, 2.5);
    p.alpha = 1.7;
    p.phi = 0.4;
    p.eta = 0.02;
    const SystemState s{0.3, -0.2, 0.05, 0.0};
    const SystemState d{-0.1, 0.25, 0.0, 0.0};
    const double drive = 0.6;

    const cd e(s.e_re, s.e_im);
    const cd ed(d.e_re, d.e_im);
    const cd de = cd(1.0, p.alpha) * s.n * e + p.kappa * std::exp(cd(0.0, p.phi)) * ed;
    const double dn = (p.pump + p.eta * drive - s.n - (2.0 * s.n + 1.0) * std::norm(e)) / p.t_lk;

    const Derivative got = lk_rhs(s, d, p, drive);
    CHECK(got.e_re == doctest::Approx(de.real()).epsilon(1e-14));
    CHECK(got.e_im == doctest::Approx(de.imag()).epsilon(1e-14));
    CHECK(got.n == doctest::Approx(dn).epsilon(1e-14));

    SystemState bad = s;
    bad.n = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)lk_rhs(bad, d, p, drive), std::domain_error);
}

TEST_CASE("half-step history values are exact for cubic fields") {
    const double dt = 0.01;
    auto f = [](double t) { return cd(1.0 + 2.0 * t - 3.0 * t * t + 5.0 * t * t * t, 0.5 - t * t * t); };
    auto df = [](double t) { return cd(2.0 - 6.0 * t + 15.0 * t * t, -3.0 * t * t); };
    const double t0 = 0.3;
    History h(4, cd(9.0, 9.0), f(t0));
    for (int i = 0; i < 4; ++i) {
        h.set_current_derivative(dt * df(t0 + i * dt));
        h.push(f(t0 + (i + 1) * dt));
    }
    h.set_current_derivative(dt * df(t0 + 4 * dt));
    for (int i = 0; i < 4; ++i) {
        const cd mid = h.field_mid(i);
        const cd exact = f(t0 + (i + 0.5) * dt);
        CHECK(std::abs(mid - exact) < 1e-14);
        CHECK(h.field(i) == f(t0 + i * dt));
    }
    const History fresh(4, cd(9.0, 9.0), f(t0));
    CHECK(fresh.field(-3) == cd(9.0, 9.0));
    CHECK(fresh.field_mid(-1) == cd(9.0, 9.0));
    CHECK(fresh.field(0) == f(t0));
    CHECK_THROWS_AS((void)h.field(5), std::out_of_range);
}

TEST_CASE("solitary laser relaxes to |E|^2 = P, N = 0") {
    const LaserParams p = quiet(0.0, 0.0, 0.05, 1.0);
    Integrator integ(p, SystemState{0.1, 0.05, 0.02, 0.0}, cd(0.1, 0.05), 1);
    integ.relax(200000);
    CHECK(integ.state().intensity() == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(std::abs(integ.state().n) < 1e-9);
    CHECK(integ.state().t == doctest::Approx(2000.0));
}

TEST_CASE("feedback laser settles on the external cavity mode") {
    for (double tau : {0.0, 10.0}) {
        CAPTURE(tau);
        const LaserParams p = quiet(0.1, tau, 0.05, 1.0);
        Integrator integ(p, SystemState{0.4, 0.0, 0.0, 0.0}, cd(0.4, 0.0), 1);
        integ.relax(300000);
        const double a_sq = (p.pump + p.kappa) / (1.0 - 2.0 * p.kappa);
        CHECK(integ.state().intensity() == doctest::Approx(a_sq).epsilon(1e-8));
        CHECK(integ.state().n == doctest::Approx(-p.kappa).epsilon(1e-8));
    }
}

TEST_CASE("noisy runs are reproducible per seed") {
    LaserParams p = quiet(0.1, 5.0);
    p.noise = 1e-3;
    Integrator a(p, 7), b(p, 7), c(p, 8);
    a.relax(2000);
    b.relax(2000);
    c.relax(2000);
    CHECK(a.state().e_re == b.state().e_re);
    CHECK(a.state().n == b.state().n);
    CHECK(a.state().e_re != c.state().e_re);
}

TEST_CASE("drive signal lays inputs times mask on the step grid") {
    const DriveSignal d({0.5, -1.0}, {0.2, 1.0, 0.0}, 4, 10);
    CHECK(d.steps_per_cycle() == 12);
    CHECK(d.end_step() == 34);
    CHECK(d.at_step(9) == 0.0);
    CHECK(d.at_step(10) == doctest::Approx(0.1));
    CHECK(d.at_step(13) == doctest::Approx(0.1));
    CHECK(d.at_step(14) == doctest::Approx(0.5));
    CHECK(d.at_step(18) == 0.0);
    CHECK(d.at_step(22) == doctest::Approx(-0.2));
    CHECK(d.at_step(33) == 0.0);
    CHECK(d.at_step(34) == 0.0);
    CHECK(d.at_time(0.14, 0.01) == doctest::Approx(0.5));
}

TEST_CASE("integrate samples on the grid and validates sample times") {
    const LaserParams p = quiet(0.1, 1.0);
    const std::vector<double> times{0.0, 0.5, 1.0};
    const auto out = integrate(p, DriveSignal{}, 1.0, times, 3);
    REQUIRE(out.size() == 3);
    for (double v : out) {
        CHECK(std::isfinite(v));
    }
    const std::vector<double> off{0.005};
    CHECK_THROWS_AS((void)integrate(p, DriveSignal{}, 1.0, off, 3), std::invalid_argument);
    const std::vector<double> late{2.0};
    CHECK_THROWS_AS((void)integrate(p, DriveSignal{}, 1.0, late, 3), std::invalid_argument);
}
