#include "delayrc/dde_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace delayrc {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::int64_t steps_on_grid(double value, double dt, const char* what) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    const double ratio = value / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
        throw std::invalid_argument(std::string(what) + " = " + std::to_string(value) +
                                    " is not an integer multiple of dt = " + std::to_string(dt));
    }
    return static_cast<std::int64_t>(rounded);
}

void LaserParams::validate() const {
    for (double v : {alpha, kappa, phi, tau, pump, eta, t_lk, noise, dt}) {
        if (!finite(v)) {
            throw std::invalid_argument("laser parameters must be finite");
        }
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    if (tau < 0.0) {
        throw std::invalid_argument("tau must be non-negative");
    }
    if (!(t_lk > 0.0)) {
        throw std::invalid_argument("T_LK must be positive");
    }
    if (noise < 0.0) {
        throw std::invalid_argument("noise amplitude must be non-negative");
    }
    (void)steps_on_grid(tau, dt, "tau");
}

std::int64_t LaserParams::delay_steps() const { return steps_on_grid(tau, dt, "tau"); }

namespace detail {

RhsCoefficients::RhsCoefficients(const LaserParams& p)
    : fb_re(p.kappa * std::cos(p.phi)),
      fb_im(p.kappa * std::sin(p.phi)),
      alpha(p.alpha),
      pump(p.pump),
      eta(p.eta),
      inv_t_lk(1.0 / p.t_lk) {}

}  // namespace detail

namespace {

inline Derivative rhs(const detail::RhsCoefficients& c, double e_re, double e_im, double n,
                      double d_re, double d_im, double drive) {
    const double an = c.alpha * n;
    Derivative d;
    d.e_re = n * e_re - an * e_im + c.fb_re * d_re - c.fb_im * d_im;
    d.e_im = n * e_im + an * e_re + c.fb_re * d_im + c.fb_im * d_re;
    d.n = (c.pump + c.eta * drive - n - (2.0 * n + 1.0) * (e_re * e_re + e_im * e_im)) * c.inv_t_lk;
    return d;
}

}  // namespace

Derivative lk_rhs(const SystemState& s, const SystemState& delayed, const LaserParams& p,
                  double drive) {
    if (!finite(s.e_re) || !finite(s.e_im) || !finite(s.n) || !finite(delayed.e_re) ||
        !finite(delayed.e_im) || !finite(drive)) {
        throw std::domain_error("lk_rhs: non-finite input");
    }
    return rhs(detail::RhsCoefficients(p), s.e_re, s.e_im, s.n, delayed.e_re, delayed.e_im, drive);
}

// ---------------------------------------------------------------------------

History::History(std::int64_t delay_steps, std::complex<double> initial_history,
                 std::complex<double> field_at_start)
    : delay_steps_(delay_steps),
      initial_(initial_history),
      fields_(static_cast<std::size_t>(delay_steps + 1)),
      derivs_(static_cast<std::size_t>(delay_steps + 1)) {
    if (delay_steps < 0) {
        throw std::invalid_argument("History: negative delay");
    }
    fields_[0] = field_at_start;
}

std::size_t History::slot(std::int64_t index) const {
    return static_cast<std::size_t>(index % (delay_steps_ + 1));
}

std::complex<double> History::field(std::int64_t index) const {
    if (index > current_ || index < current_ - delay_steps_) {
        throw std::out_of_range("History: index outside [t - tau, t]");
    }
    if (index < 0) {
        return initial_;
    }
    return fields_[slot(index)];
}

std::complex<double> History::field_mid(std::int64_t index) const {
    if (index < 0) {
        return initial_;
    }
    if (index + 1 > current_ || index < current_ - delay_steps_) {
        throw std::out_of_range("History: half-step outside [t - tau, t]");
    }
    const std::size_t a = slot(index);
    const std::size_t b = slot(index + 1);
    // dt/8 (E'(a) - E'(b)) term of the cubic Hermite midpoint, dt folded into the
    // stored derivatives by the caller.
    return 0.5 * (fields_[a] + fields_[b]) + 0.125 * (derivs_[a] - derivs_[b]);
}

void History::set_current_derivative(std::complex<double> derivative) {
    derivs_[slot(current_)] = derivative;
}

void History::push(std::complex<double> field) {
    ++current_;
    fields_[slot(current_)] = field;
}

// ---------------------------------------------------------------------------

namespace detail {

SystemState rk4_kernel(const SystemState& s, History& history, const RhsCoefficients& c, double h,
                       const StepDrive& drive) {
    const double hh = 0.5 * h;
    const std::int64_t m = history.delay_steps();
    Derivative k1, k2, k3, k4;
    if (m == 0) {
        k1 = rhs(c, s.e_re, s.e_im, s.n, s.e_re, s.e_im, drive.start);
        history.set_current_derivative(h * std::complex<double>(k1.e_re, k1.e_im));
        double r = s.e_re + hh * k1.e_re, i = s.e_im + hh * k1.e_im;
        k2 = rhs(c, r, i, s.n + hh * k1.n, r, i, drive.mid);
        r = s.e_re + hh * k2.e_re;
        i = s.e_im + hh * k2.e_im;
        k3 = rhs(c, r, i, s.n + hh * k2.n, r, i, drive.mid);
        r = s.e_re + h * k3.e_re;
        i = s.e_im + h * k3.e_im;
        k4 = rhs(c, r, i, s.n + h * k3.n, r, i, drive.end);
    } else {
        const std::int64_t base = history.current_index() - m;
        const std::complex<double> d0 = history.field(base);
        k1 = rhs(c, s.e_re, s.e_im, s.n, d0.real(), d0.imag(), drive.start);
        history.set_current_derivative(h * std::complex<double>(k1.e_re, k1.e_im));
        const std::complex<double> dm = history.field_mid(base);
        const std::complex<double> de = history.field(base + 1);
        k2 = rhs(c, s.e_re + hh * k1.e_re, s.e_im + hh * k1.e_im, s.n + hh * k1.n, dm.real(),
                 dm.imag(), drive.mid);
        k3 = rhs(c, s.e_re + hh * k2.e_re, s.e_im + hh * k2.e_im, s.n + hh * k2.n, dm.real(),
                 dm.imag(), drive.mid);
        k4 = rhs(c, s.e_re + h * k3.e_re, s.e_im + h * k3.e_im, s.n + h * k3.n, de.real(),
                 de.imag(), drive.end);
    }
    const double w = h / 6.0;
    SystemState out;
    out.e_re = s.e_re + w * (k1.e_re + 2.0 * k2.e_re + 2.0 * k3.e_re + k4.e_re);
    out.e_im = s.e_im + w * (k1.e_im + 2.0 * k2.e_im + 2.0 * k3.e_im + k4.e_im);
    out.n = s.n + w * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n);
    out.t = s.t + h;
    return out;
}

}  // namespace detail

SystemState rk4_step(const SystemState& s, History& history, const LaserParams& p,
                     const StepDrive& drive) {
    return detail::rk4_kernel(s, history, detail::RhsCoefficients(p), p.dt, drive);
}

// ---------------------------------------------------------------------------

Integrator::Integrator(const LaserParams& params, const SystemState& initial,
                       std::complex<double> history_value, std::uint64_t seed)
    : params_((params.validate(), params)),
      history_(params.delay_steps(), history_value, initial.field()),
      state_(initial),
      coeffs_(params),
      rng_(seed),
      noise_scale_(params.noise * std::sqrt(params.dt)) {
    state_.t = 0.0;
}

Integrator::Integrator(const LaserParams& params, std::uint64_t seed)
    : Integrator(params,
                 SystemState{std::sqrt(std::max(params.pump, 0.01)) + 1e-3, 0.0, 0.0, 0.0},
                 std::complex<double>(std::sqrt(std::max(params.pump, 0.01)) + 1e-3, 0.0), seed) {
    apply_noise();
    history_ = History(params_.delay_steps(),
                       std::complex<double>(std::sqrt(std::max(params_.pump, 0.01)) + 1e-3, 0.0),
                       state_.field());
}

void Integrator::apply_noise() {
    if (noise_scale_ == 0.0) {
        return;
    }
    state_.e_re += noise_scale_ * normal_(rng_);
    state_.e_im += noise_scale_ * normal_(rng_);
}

void Integrator::step(double drive) {
    const std::int64_t next = history_.current_index() + 1;
    state_ = detail::rk4_kernel(state_, history_, coeffs_, params_.dt, StepDrive{drive, drive, drive});
    apply_noise();
    state_.t = static_cast<double>(next) * params_.dt;
    history_.push(state_.field());
}

void Integrator::relax(std::int64_t n_steps) {
    for (std::int64_t i = 0; i < n_steps; ++i) {
        step(0.0);
    }
}

// ---------------------------------------------------------------------------

DriveSignal::DriveSignal(std::vector<double> inputs, std::vector<double> mask,
                         std::int64_t steps_per_node, std::int64_t start_step)
    : inputs_(std::move(inputs)),
      mask_(std::move(mask)),
      steps_per_node_(steps_per_node),
      start_step_(start_step) {
    if (steps_per_node_ < 1) {
        throw std::invalid_argument("DriveSignal: node spacing must span at least one step");
    }
    if (mask_.empty()) {
        throw std::invalid_argument("DriveSignal: empty mask");
    }
}

double DriveSignal::at_step(std::int64_t step) const {
    if (inputs_.empty() || step < start_step_ || step >= end_step()) {
        return 0.0;
    }
    const std::int64_t rel = step - start_step_;
    const std::int64_t cycle = rel / steps_per_cycle();
    const std::int64_t node = (rel % steps_per_cycle()) / steps_per_node_;
    return inputs_[static_cast<std::size_t>(cycle)] * mask_[static_cast<std::size_t>(node)];
}

double DriveSignal::at_time(double t, double dt) const {
    return at_step(static_cast<std::int64_t>(std::floor(t / dt + 1e-9)));
}

std::vector<double> integrate(const LaserParams& params, const DriveSignal& drive, double duration,
                              std::span<const double> sample_times, std::uint64_t seed,
                              const IntegrateOptions& options) {
    params.validate();
    const std::int64_t total = steps_on_grid(duration, params.dt, "duration");
    std::vector<std::int64_t> sample_steps;
    sample_steps.reserve(sample_times.size());
    for (double t : sample_times) {
        const std::int64_t s = steps_on_grid(t, params.dt, "sample time");
        if (s < 0 || s > total || (!sample_steps.empty() && s < sample_steps.back())) {
            throw std::invalid_argument("sample times must be ascending within [0, duration]");
        }
        sample_steps.push_back(s);
    }

    Integrator integrator = options.initial
                                ? Integrator(params, *options.initial,
                                             options.history.value_or(options.initial->field()), seed)
                                : Integrator(params, seed);
    std::vector<double> out;
    out.reserve(sample_steps.size());
    std::size_t next = 0;
    auto collect = [&](std::int64_t step) {
        while (next < sample_steps.size() && sample_steps[next] == step) {
            out.push_back(integrator.state().intensity());
            ++next;
        }
    };
    collect(0);
    for (std::int64_t s = 0; s < total; ++s) {
        integrator.step(drive.at_step(s));
        collect(s + 1);
    }
    return out;
}

}  // namespace delayrc
