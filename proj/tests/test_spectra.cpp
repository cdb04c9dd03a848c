#include "delayrc/spectra.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace delayrc;

namespace {

constexpr double kPi = std::numbers::pi;

LaserParams feedback(double pump, double kappa = 0.1, double tau = 500.0, double t_lk = 1.0) {
    LaserParams p;
    p.pump = pump;
    p.kappa = kappa;
    p.tau = tau;
    p.t_lk = t_lk;
    return p;
}

LaserParams solitary(double t_lk, double pump = 0.05) {
    LaserParams p;
    p.pump = pump;
    p.t_lk = t_lk;
    return p;
}

// det(-i mu I + B + z C) for arbitrary z.
cplx det_at(double mu, cplx z, const CharacteristicSystem& sys) {
    Eigen::Matrix3cd m = sys.instantaneous.cast<cplx>() + z * sys.delayed.cast<cplx>();
    m.diagonal().array() -= cplx(0.0, mu);
    return m.determinant();
}

}  // namespace

TEST_CASE("external cavity mode and its preconditions") {
    const Ecm m = ecm(feedback(0.05));
    CHECK(m.n_star == doctest::Approx(-0.1));
    CHECK(m.omega == 0.0);
    CHECK(m.a_sq == doctest::Approx(0.15 / 0.8));
    CHECK_THROWS_AS((void)ecm(feedback(-0.2)), std::invalid_argument);
    CHECK_THROWS_AS((void)ecm(feedback(0.05, 0.6)), std::invalid_argument);
    LaserParams p = feedback(0.05);
    p.alpha = 3.0;
    CHECK_THROWS_AS((void)ecm(p), std::invalid_argument);
    p.alpha = 0.0;
    p.phi = 2.0 * kPi;
    CHECK_NOTHROW((void)ecm(p));
    p.phi = 1.0;
    CHECK_THROWS_AS((void)ecm(p), std::invalid_argument);
}

TEST_CASE("linearization matches a finite-difference Jacobian of the rate equations") {
    const LaserParams p = feedback(0.03, 0.12, 10.0, 2.0);
    const Ecm m = ecm(p);
    const CharacteristicSystem sys = characteristic_system(p, m);
    const SystemState x0{std::sqrt(m.a_sq), 0.0, m.n_star, 0.0};
    const SystemState d0{std::sqrt(m.a_sq), 0.0, 0.0, 0.0};
    auto as_vec = [](const Derivative& d) { return Eigen::Vector3d(d.e_re, d.e_im, d.n); };
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
        SystemState up = x0, dn = x0;
        double* pu = j == 0 ? &up.e_re : j == 1 ? &up.e_im : &up.n;
        double* pd = j == 0 ? &dn.e_re : j == 1 ? &dn.e_im : &dn.n;
        *pu += h;
        *pd -= h;
        const Eigen::Vector3d col = (as_vec(lk_rhs(up, d0, p, 0.0)) - as_vec(lk_rhs(dn, d0, p, 0.0))) / (2 * h);
        CHECK((col - sys.instantaneous.col(j)).norm() < 1e-8);
    }
    for (int j = 0; j < 2; ++j) {
        SystemState up = d0, dn = d0;
        (j == 0 ? up.e_re : up.e_im) += h;
        (j == 0 ? dn.e_re : dn.e_im) -= h;
        const Eigen::Vector3d col = (as_vec(lk_rhs(x0, up, p, 0.0)) - as_vec(lk_rhs(x0, dn, p, 0.0))) / (2 * h);
        CHECK((col - sys.delayed.col(j)).norm() < 1e-8);
    }
    CHECK(sys.delayed.col(2).norm() == 0.0);
    // The equilibrium itself: rhs vanishes.
    CHECK(as_vec(lk_rhs(x0, d0, p, 0.0)).norm() < 1e-14);
}

TEST_CASE("phase symmetry gives a zero of the characteristic function") {
    const LaserParams p = feedback(0.05);
    const CharacteristicSystem sys = characteristic_system(p, ecm(p));
    CHECK(std::abs(characteristic_value(0.0, sys)) < 1e-15);
}

TEST_CASE("branch roots are the zeros of the determinant's quadratic in z") {
    for (double pump : {-0.095, 0.0, 0.095}) {
        const LaserParams p = feedback(pump);
        const Ecm m = ecm(p);
        const CharacteristicSystem sys = characteristic_system(p, m);
        for (double mu : {0.0, 0.003, -0.02, 0.1, 0.7}) {
            CAPTURE(pump);
            CAPTURE(mu);
            const cplx f0 = det_at(mu, 0.0, sys);
            const cplx fp = det_at(mu, 1.0, sys);
            const cplx fm = det_at(mu, -1.0, sys);
            const cplx a = 0.5 * (fp + fm) - f0;
            const cplx b = 0.5 * (fp - fm);
            const cplx disc = std::sqrt(b * b - 4.0 * a * f0);
            cplx z1 = (-b + disc) / (2.0 * a);
            cplx z2 = (-b - disc) / (2.0 * a);
            const auto [y1, y2] = pcs_roots(mu, p, m);
            if (std::abs(z1 - y1) > std::abs(z2 - y1)) {
                std::swap(z1, z2);
            }
            CHECK(std::abs(z1 - y1) < 1e-9 * std::max(1.0, std::abs(y1)));
            CHECK(std::abs(z2 - y2) < 1e-9 * std::max(1.0, std::abs(y2)));
            const auto [g1, g2] = pcs_gamma(mu, p, m);
            CHECK(g1 == doctest::Approx(-std::log(std::abs(y1))));
            CHECK(g2 == doctest::Approx(-std::log(std::abs(y2))));
        }
    }
    CHECK_THROWS_AS((void)pcs_roots(0.1, solitary(1.0), Ecm{0.05, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("solitary eigenvalues match the 2x2 Jacobian") {
    for (double t_lk = 0.1; t_lk <= 100.0; t_lk *= 1.5) {
        const LaserParams p = solitary(t_lk);
        const auto [l1, l2] = solitary_eigenvalues(p);
        Eigen::EigenSolver<Eigen::Matrix2d> es(solitary_jacobian(p));
        std::vector<cplx> ref{es.eigenvalues()(0), es.eigenvalues()(1)};
        std::sort(ref.begin(), ref.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
        });
        CAPTURE(t_lk);
        CHECK(std::abs(l1 - ref[0]) < 1e-12);
        CHECK(std::abs(l2 - ref[1]) < 1e-12);
        CHECK(l1.real() >= l2.real());
    }
    CHECK_THROWS_AS((void)solitary_eigenvalues(feedback(0.05)), std::invalid_argument);
    CHECK_THROWS_AS((void)solitary_eigenvalues(solitary(1.0, -0.01)), std::invalid_argument);
}

TEST_CASE("solitary spectrum is used without feedback") {
    const Spectrum s = operating_spectrum(solitary(100.0), 100);
    REQUIRE(s.values.size() == 2);
    CHECK(s.values[0].source == EigenSource::exact2x2);
    CHECK(s.values[0].value.imag() > 0.0);
    CHECK(s.values[0].value.imag() == doctest::Approx(0.0311).epsilon(0.01));
}

TEST_CASE("pseudocontinuous spectrum: ordering, symmetry, no zero mode") {
    const LaserParams p = feedback(-0.095);
    for (MuRule rule : {MuRule::leading_order, MuRule::implicit}) {
        const Spectrum s = pcs_spectrum(p, ecm(p), 100, rule);
        REQUIRE(s.values.size() == 100);
        for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
            CHECK(s.values[i].value.real() >= s.values[i + 1].value.real());
        }
        for (const Eigenvalue& e : s.values) {
            CHECK(std::abs(e.value) > 1e-8);
            CHECK(e.value.real() < 0.0);
        }
        for (std::size_t i = 0; i < 50; ++i) {
            const cplx c = std::conj(s.values[i].value);
            const bool found = std::any_of(s.values.begin(), s.values.end(),
                                           [&](const Eigenvalue& e) { return std::abs(e.value - c) < 1e-12; });
            CHECK(found);
        }
    }
    const Spectrum lo = pcs_spectrum(p, ecm(p), 10);
    for (const Eigenvalue& e : lo.values) {
        const double mu = e.value.imag();
        CHECK(std::remainder(mu * p.tau, 2.0 * kPi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
}

TEST_CASE("Newton refinement lands on roots near the pseudocontinuous seeds") {
    const LaserParams p = feedback(0.05);
    const Ecm m = ecm(p);
    const CharacteristicSystem sys = characteristic_system(p, m);
    const Spectrum seeds = pcs_spectrum(p, m, 40, MuRule::implicit);
    for (const Eigenvalue& e : seeds.values) {
        const NewtonResult r = newton_refine(e.value, sys);
        CHECK(r.converged);
        CHECK(r.residual < 1e-12);
        CHECK(std::abs(r.value - e.value) < 5.0 / (p.tau * p.tau));
    }
    const NewtonResult bad = newton_refine(cplx(0.3, 0.2), sys, 1e-30, 2);
    CHECK_FALSE(bad.converged);
    CHECK(bad.value == cplx(0.3, 0.2));

    const Spectrum refined = refined_spectrum(p, 50);
    CHECK(refined.values.size() == 50);
    CHECK(refined.newton_failures == 0);
    for (const Eigenvalue& e : refined.values) {
        CHECK(e.source == EigenSource::newton);
        CHECK(std::abs(characteristic_value(e.value, sys)) < 1e-12);
    }
}

TEST_CASE("predictors from a hand-made spectrum") {
    Spectrum s;
    s.values = {{cplx(-0.01, 0.02), 1, 0, EigenSource::pcs},
                {cplx(-0.01, -0.02), 1, 0, EigenSource::pcs},
                {cplx(-0.1, 0.0), 2, 0, EigenSource::pcs},
                {cplx(0.0, 0.0), 1, 0, EigenSource::pcs}};
    const double t = 100.0;
    const Predictors pr = predictors(s, t, 10);
    CHECK(pr.count == 3);
    const double phi = std::fmod(0.02 * t, kPi);
    CHECK(pr.phi[0] == doctest::Approx(phi));
    CHECK(pr.phi[1] == doctest::Approx(phi));
    CHECK(pr.phi[2] == 0.0);
    CHECK(pr.phi_hat == doctest::Approx(2.0 * phi / 3.0));
    CHECK(pr.lambda_hat == doctest::Approx((2.0 * std::exp(-1.0) + std::exp(-10.0)) / 3.0));
    CHECK_FALSE(pr.degenerate);
    CHECK(predictors(s, t, 1).count == 1);

    Spectrum real_only;
    real_only.values = {{cplx(-0.2, 0.0), 1, 0, EigenSource::pcs}};
    CHECK(predictors(real_only, t, 5).degenerate);
}

TEST_CASE("distance reduction orders the two operating points") {
    const double t = 350.0;
    const double below = predictors(pcs_spectrum(feedback(-0.095), ecm(feedback(-0.095)), 100), t, 100).lambda_hat;
    const double above = predictors(pcs_spectrum(feedback(0.095), ecm(feedback(0.095)), 100), t, 100).lambda_hat;
    CHECK(below > above);
    CHECK(below < 1.0);
    CHECK(above > 0.0);
}

TEST_CASE("resonance helpers") {
    CHECK(resonance_distance(0.1) == doctest::Approx(0.1));
    CHECK(resonance_distance(kPi - 0.2) == doctest::Approx(0.2));
    const cplx lambda(-0.001, 0.0311);
    const auto ts = resonant_clock_cycles(lambda, 350.0);
    REQUIRE(ts.size() == 3);
    CHECK(ts[1] == doctest::Approx(2.0 * kPi / 0.0311));
    CHECK(resonant_clock_cycles(cplx(-0.1, 0.0), 1e6).empty());
    CHECK(lambda_level_clock_cycle(lambda, 0.5) == doctest::Approx(std::log(0.5) / -0.001));
    CHECK(std::isnan(lambda_level_clock_cycle(cplx(0.1, 0.0), 0.5)));

    const std::vector<LaserParams> grid{solitary(100.0)};
    const auto [l1, l2] = solitary_eigenvalues(grid[0]);
    const double t_res = kPi / l1.imag();
    const std::vector<double> clocks{t_res, 0.5 * t_res};
    // Both eigenvalues share |Im|, so Phi_hat is the single-eigenvalue angle.
    const auto hits = resonance_lines(grid, clocks, 2, 0.05);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].clock_cycle == doctest::Approx(t_res));
}
