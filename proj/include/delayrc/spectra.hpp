#pragma once

// Linear stability of the laser's operating point: external cavity mode,
// solitary-laser eigenvalues, the long-delay pseudocontinuous spectrum,
// Newton refinement on the characteristic equation, and the clock-cycle
// predictors built from them.

#include "delayrc/dde_core.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace delayrc {

using cplx = std::complex<double>;

/// Rotating-wave equilibrium E = A e^{i omega t}, N = N*.
struct Ecm {
    double a_sq = 0.0;
    double n_star = 0.0;
    double omega = 0.0;
};

/// The maximum-gain mode N* = -kappa, omega = 0, A^2 = (P + kappa)/(1 - 2 kappa).
/// Requires alpha = 0, phi = 0 (mod 2 pi), kappa < 1/2 and P > -kappa.
[[nodiscard]] Ecm ecm(const LaserParams& params);

/// 2x2 Jacobian of (Re E, N) at the solitary equilibrium (kappa = 0).
[[nodiscard]] Eigen::Matrix2d solitary_jacobian(const LaserParams& params);

/// Roots of lambda^2 + eps(1 + 2P) lambda + 2 eps P = 0. The first root has the
/// larger real part (or positive imaginary part for a complex pair).
[[nodiscard]] std::pair<cplx, cplx> solitary_eigenvalues(const LaserParams& params);

/// det(-lambda I + B + C e^{-lambda tau}) in coordinates (Re E, Im E, N) with the
/// ECM rotated onto the real axis.
struct CharacteristicSystem {
    Eigen::Matrix3d instantaneous;  // B
    Eigen::Matrix3d delayed;        // C
    double tau = 0.0;
};

[[nodiscard]] CharacteristicSystem characteristic_system(const LaserParams& params, const Ecm& mode);
[[nodiscard]] cplx characteristic_value(cplx lambda, const CharacteristicSystem& system);

/// Y_1(mu), Y_2(mu): the two roots in e^{-gamma - i mu tau} of the leading-order
/// characteristic equation.
[[nodiscard]] std::pair<cplx, cplx> pcs_roots(double mu, const LaserParams& params, const Ecm& mode);

/// gamma_j(mu) = -ln |Y_j(mu)|. Throws for kappa = 0.
[[nodiscard]] std::pair<double, double> pcs_gamma(double mu, const LaserParams& params,
                                                  const Ecm& mode);

enum class EigenSource { exact2x2, pcs, newton };
[[nodiscard]] const char* to_string(EigenSource source);

struct Eigenvalue {
    cplx value;
    int branch = 1;
    int k = 0;
    EigenSource source = EigenSource::pcs;
};

struct Spectrum {
    std::vector<Eigenvalue> values;  // descending real part
    LaserParams params;
    int newton_failures = 0;
};

/// How imaginary parts of the pseudocontinuous spectrum are placed:
/// leading_order uses mu = pi (2k - nu)/tau; implicit solves
/// mu = (2 pi k - arg Y_j(mu))/tau by fixed-point iteration.
enum class MuRule { leading_order, implicit };

/// The `count` pseudocontinuous eigenvalues with largest real part, the
/// phase-symmetry zero mode excluded.
[[nodiscard]] Spectrum pcs_spectrum(const LaserParams& params, const Ecm& mode, int count,
                                    MuRule rule = MuRule::leading_order);

struct NewtonResult {
    cplx value;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

/// Newton iteration on characteristic_value with a central-difference
/// derivative. On failure the seed is returned with converged = false.
[[nodiscard]] NewtonResult newton_refine(cplx seed, const CharacteristicSystem& system,
                                         double tol = 1e-12, int max_iter = 50);

/// Newton-refined spectrum seeded from the implicit pseudocontinuous spectrum;
/// duplicates within 1e-8 are merged and the zero mode is removed.
[[nodiscard]] Spectrum refined_spectrum(const LaserParams& params, int count, double tol = 1e-12,
                                        int max_iter = 50);

/// Both solitary-laser eigenvalues (kappa = 0).
[[nodiscard]] Spectrum solitary_spectrum(const LaserParams& params);

enum class SpectrumMethod { pcs, newton };

/// Solitary spectrum for kappa = 0, otherwise pcs or refined.
[[nodiscard]] Spectrum operating_spectrum(const LaserParams& params, int count,
                                          SpectrumMethod method = SpectrumMethod::pcs);

struct Predictors {
    std::vector<double> phi;     // |Im(lambda_i)| T mod pi
    std::vector<double> lambda;  // exp(Re(lambda_i) T)
    double phi_hat = 0.0;
    double lambda_hat = 0.0;
    int count = 0;
    bool degenerate = false;  // every Im(lambda_i) = 0
};

/// Angular distance and distance reduction over the first `count` eigenvalues
/// (fewer if the spectrum is shorter). Zero modes are skipped.
[[nodiscard]] Predictors predictors(const Spectrum& spectrum, double clock_cycle, int count);

/// Distance of an angle in [0, pi) to the nearest resonance 0 or pi.
[[nodiscard]] double resonance_distance(double phi);

struct ResonancePoint {
    std::size_t point = 0;  // index into the parameter list
    double clock_cycle = 0.0;
    double phi_hat = 0.0;
    int line = 0;  // 0: near 0, 1: near pi
    bool degenerate = false;
};

/// Scans `clock_cycles` for every parameter set and reports where Phi_hat lies
/// within `band` of 0 or pi.
[[nodiscard]] std::vector<ResonancePoint> resonance_lines(std::span<const LaserParams> grid,
                                                          std::span<const double> clock_cycles,
                                                          int count, double band,
                                                          SpectrumMethod method = SpectrumMethod::pcs);

/// Clock cycles T = j pi / |Im(lambda)| (j >= 1) up to `max_clock` for one eigenvalue.
[[nodiscard]] std::vector<double> resonant_clock_cycles(cplx lambda, double max_clock);

/// Clock cycle at which exp(Re(lambda) T) = level, or NaN if Re(lambda) >= 0.
[[nodiscard]] double lambda_level_clock_cycle(cplx lambda, double level);

}  // namespace delayrc
