#include "delayrc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace delayrc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroMode = 1e-8;
constexpr double kDuplicate = 1e-8;

bool phase_is_zero(double phi) {
    const double r = std::remainder(phi, 2.0 * kPi);
    return std::abs(r) < 1e-12;
}

void sort_descending(std::vector<Eigenvalue>& values) {
    std::stable_sort(values.begin(), values.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        if (a.value.real() != b.value.real()) {
            return a.value.real() > b.value.real();
        }
        return a.value.imag() > b.value.imag();
    });
}

}  // namespace

Ecm ecm(const LaserParams& p) {
    p.validate();
    if (p.alpha != 0.0) {
        throw std::invalid_argument("ecm: only alpha = 0 is supported");
    }
    if (!phase_is_zero(p.phi)) {
        throw std::invalid_argument("ecm: only feedback phase 0 is supported");
    }
    if (!(p.kappa < 0.5)) {
        throw std::invalid_argument("ecm: kappa must be below 1/2");
    }
    Ecm mode;
    mode.n_star = -p.kappa;
    mode.omega = 0.0;
    mode.a_sq = (p.pump + p.kappa) / (1.0 - 2.0 * p.kappa);
    if (!(mode.a_sq > 0.0)) {
        throw std::invalid_argument("ecm: pump at or below threshold P_th = -kappa");
    }
    return mode;
}

Eigen::Matrix2d solitary_jacobian(const LaserParams& p) {
    if (p.kappa != 0.0) {
        throw std::invalid_argument("solitary_jacobian: requires kappa = 0");
    }
    if (!(p.pump > 0.0)) {
        throw std::invalid_argument("solitary_jacobian: requires P > 0");
    }
    const double eps = p.epsilon();
    const double a = std::sqrt(p.pump);
    Eigen::Matrix2d j;
    j << 0.0, a, -2.0 * eps * a, -eps * (1.0 + 2.0 * p.pump);
    return j;
}

std::pair<cplx, cplx> solitary_eigenvalues(const LaserParams& p) {
    if (p.kappa != 0.0) {
        throw std::invalid_argument("solitary_eigenvalues: requires kappa = 0");
    }
    if (!(p.pump > 0.0) || !(p.t_lk > 0.0)) {
        throw std::invalid_argument("solitary_eigenvalues: requires P > 0 and T_LK > 0");
    }
    const double eps = p.epsilon();
    const double b = eps * (1.0 + 2.0 * p.pump);
    const double c = 2.0 * eps * p.pump;
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        // Avoid cancellation: q = -(b + sqrt(disc))/2, roots q and c/q.
        const double q = -0.5 * (b + std::sqrt(disc));
        const double r1 = c / q;
        const double r2 = q;
        return {cplx(std::max(r1, r2), 0.0), cplx(std::min(r1, r2), 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {cplx(-0.5 * b, im), cplx(-0.5 * b, -im)};
}

CharacteristicSystem characteristic_system(const LaserParams& p, const Ecm& mode) {
    const double eps = p.epsilon();
    const double a = std::sqrt(mode.a_sq);
    const double n = mode.n_star;
    CharacteristicSystem sys;
    sys.instantaneous << n, -p.alpha * n, a,                      //
        p.alpha * n, n, p.alpha * a,                              //
        -2.0 * eps * (2.0 * n + 1.0) * a, 0.0, -eps * (1.0 + 2.0 * mode.a_sq);
    const double c = p.kappa * std::cos(p.phi);
    const double s = p.kappa * std::sin(p.phi);
    sys.delayed << c, -s, 0.0,  //
        s, c, 0.0,              //
        0.0, 0.0, 0.0;
    sys.tau = p.tau;
    return sys;
}

cplx characteristic_value(cplx lambda, const CharacteristicSystem& sys) {
    const cplx z = std::exp(-lambda * sys.tau);
    Eigen::Matrix3cd m = sys.instantaneous.cast<cplx>() + z * sys.delayed.cast<cplx>();
    m.diagonal().array() -= lambda;
    return m.determinant();
}

std::pair<cplx, cplx> pcs_roots(double mu, const LaserParams& p, const Ecm& mode) {
    if (p.kappa == 0.0) {
        throw std::invalid_argument("pcs_roots: kappa = 0 has no pseudocontinuous spectrum");
    }
    const double eps = p.epsilon();
    const double b = 1.0 + 2.0 * mode.a_sq;
    const cplx y1(1.0, mu / p.kappa);
    const cplx num = 2.0 * eps * (p.pump + p.kappa) * cplx(eps * b, -mu);
    const double den = p.kappa * (mu * mu + eps * eps * b * b);
    return {y1, y1 + num / den};
}

std::pair<double, double> pcs_gamma(double mu, const LaserParams& p, const Ecm& mode) {
    const auto [y1, y2] = pcs_roots(mu, p, mode);
    return {-std::log(std::abs(y1)), -std::log(std::abs(y2))};
}

const char* to_string(EigenSource source) {
    switch (source) {
        case EigenSource::exact2x2: return "exact2x2";
        case EigenSource::pcs: return "pcs";
        case EigenSource::newton: return "newton";
    }
    return "unknown";
}

Spectrum pcs_spectrum(const LaserParams& p, const Ecm& mode, int count, MuRule rule) {
    if (count < 1) {
        throw std::invalid_argument("pcs_spectrum: count must be positive");
    }
    if (p.tau < 50.0) {
        std::cerr << "warning: pseudocontinuous spectrum with tau = " << p.tau
                  << " is a poor approximation (long-delay limit)\n";
    }
    const double tau = p.tau;
    const auto [y1_0, y2_0] = pcs_roots(0.0, p, mode);
    const std::array<cplx, 2> y_at_zero{y1_0, y2_0};

    Spectrum out;
    out.params = p;
    const int k_max = count + 10;
    for (int branch = 1; branch <= 2; ++branch) {
        const cplx y0 = y_at_zero[static_cast<std::size_t>(branch - 1)];
        const int nu = y0.real() > 0.0 ? 0 : 1;
        auto root = [&](double mu) {
            const auto roots = pcs_roots(mu, p, mode);
            return branch == 1 ? roots.first : roots.second;
        };
        for (int k = -k_max + nu; k <= k_max; ++k) {
            double mu = kPi * (2.0 * k - nu) / tau;
            if (rule == MuRule::implicit) {
                for (int it = 0; it < 200; ++it) {
                    const double next = (kPi * (2.0 * k - nu) - std::arg(root(mu) / y0)) / tau;
                    const bool settled = std::abs(next - mu) <= 1e-15 * std::max(1.0, std::abs(mu));
                    mu = next;
                    if (settled) {
                        break;
                    }
                }
            }
            const double gamma = -std::log(std::abs(root(mu)));
            const cplx lambda(gamma / tau, mu);
            if (std::abs(lambda) < kZeroMode) {
                continue;  // phase-symmetry zero mode
            }
            out.values.push_back({lambda, branch, k, EigenSource::pcs});
        }
    }
    sort_descending(out.values);
    if (out.values.size() > static_cast<std::size_t>(count)) {
        out.values.resize(static_cast<std::size_t>(count));
    }
    return out;
}

NewtonResult newton_refine(cplx seed, const CharacteristicSystem& sys, double tol, int max_iter) {
    NewtonResult res;
    res.value = seed;
    cplx lambda = seed;
    cplx f = characteristic_value(lambda, sys);
    const double h = 1e-7;
    for (int it = 0; it <= max_iter; ++it) {
        res.iterations = it;
        if (std::abs(f) < tol) {
            res.value = lambda;
            res.converged = true;
            res.residual = std::abs(f);
            return res;
        }
        if (it == max_iter) {
            break;
        }
        const cplx df = (characteristic_value(lambda + h, sys) - characteristic_value(lambda - h, sys)) /
                        (2.0 * h);
        if (df == cplx(0.0) || !std::isfinite(std::abs(df))) {
            break;
        }
        lambda -= f / df;
        f = characteristic_value(lambda, sys);
        if (!std::isfinite(std::abs(f))) {
            break;
        }
    }
    res.value = seed;
    res.converged = false;
    res.residual = std::abs(characteristic_value(seed, sys));
    return res;
}

Spectrum refined_spectrum(const LaserParams& p, int count, double tol, int max_iter) {
    const Ecm mode = ecm(p);
    const CharacteristicSystem sys = characteristic_system(p, mode);
    // Seeds reach further than `count` so refinement can reorder the tail.
    const Spectrum seeds = pcs_spectrum(p, mode, count + 20, MuRule::implicit);
    Spectrum out;
    out.params = p;
    for (const Eigenvalue& seed : seeds.values) {
        const NewtonResult r = newton_refine(seed.value, sys, tol, max_iter);
        Eigenvalue e = seed;
        if (r.converged) {
            e.value = r.value;
            e.source = EigenSource::newton;
        } else {
            ++out.newton_failures;
        }
        if (std::abs(e.value) < kZeroMode) {
            continue;
        }
        const bool duplicate = std::any_of(out.values.begin(), out.values.end(), [&](const Eigenvalue& o) {
            return std::abs(o.value - e.value) < kDuplicate;
        });
        if (!duplicate) {
            out.values.push_back(e);
        }
    }
    sort_descending(out.values);
    if (out.values.size() > static_cast<std::size_t>(count)) {
        out.values.resize(static_cast<std::size_t>(count));
    }
    return out;
}

Spectrum solitary_spectrum(const LaserParams& p) {
    const auto [l1, l2] = solitary_eigenvalues(p);
    Spectrum out;
    out.params = p;
    out.values.push_back({l1, 1, 0, EigenSource::exact2x2});
    out.values.push_back({l2, 2, 0, EigenSource::exact2x2});
    sort_descending(out.values);
    return out;
}

Spectrum operating_spectrum(const LaserParams& p, int count, SpectrumMethod method) {
    if (p.kappa == 0.0) {
        return solitary_spectrum(p);
    }
    if (method == SpectrumMethod::newton) {
        return refined_spectrum(p, count);
    }
    return pcs_spectrum(p, ecm(p), count);
}

Predictors predictors(const Spectrum& spectrum, double clock_cycle, int count) {
    Predictors out;
    bool any_rotation = false;
    for (const Eigenvalue& e : spectrum.values) {
        if (out.count >= count) {
            break;
        }
        if (std::abs(e.value) < kZeroMode) {
            continue;
        }
        double phi = std::fmod(std::abs(e.value.imag()) * clock_cycle, kPi);
        if (phi >= kPi) {
            phi = 0.0;
        }
        const double lam = std::exp(e.value.real() * clock_cycle);
        any_rotation = any_rotation || e.value.imag() != 0.0;
        out.phi.push_back(phi);
        out.lambda.push_back(lam);
        out.phi_hat += phi;
        out.lambda_hat += lam;
        ++out.count;
    }
    if (out.count > 0) {
        out.phi_hat /= out.count;
        out.lambda_hat /= out.count;
    }
    out.degenerate = !any_rotation;
    return out;
}

double resonance_distance(double phi) { return std::min(phi, kPi - phi); }

std::vector<ResonancePoint> resonance_lines(std::span<const LaserParams> grid,
                                            std::span<const double> clock_cycles, int count,
                                            double band, SpectrumMethod method) {
    std::vector<ResonancePoint> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Spectrum spectrum = operating_spectrum(grid[i], count, method);
        for (double t : clock_cycles) {
            const Predictors pr = predictors(spectrum, t, count);
            if (pr.degenerate || resonance_distance(pr.phi_hat) <= band) {
                out.push_back({i, t, pr.phi_hat, pr.phi_hat < 0.5 * kPi ? 0 : 1, pr.degenerate});
            }
        }
    }
    return out;
}

std::vector<double> resonant_clock_cycles(cplx lambda, double max_clock) {
    std::vector<double> out;
    const double w = std::abs(lambda.imag());
    if (w == 0.0) {
        return out;
    }
    for (int j = 1; j * kPi / w <= max_clock; ++j) {
        out.push_back(j * kPi / w);
    }
    return out;
}

double lambda_level_clock_cycle(cplx lambda, double level) {
    if (!(lambda.real() < 0.0) || !(level > 0.0 && level < 1.0)) {
        return std::nan("");
    }
    return std::log(level) / lambda.real();
}

}  // namespace delayrc
