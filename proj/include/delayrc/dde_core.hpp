#pragma once

// Lang-Kobayashi laser with delayed self-feedback, integrated with a
// fixed-step RK4 scheme on a grid that contains the delay exactly.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace delayrc {

struct LaserParams {
    double alpha = 0.0;    // amplitude-phase coupling
    double kappa = 0.0;    // feedback rate
    double phi = 0.0;      // feedback phase [rad]
    double tau = 0.0;      // delay, photon lifetimes
    double pump = 0.05;    // pump above solitary threshold
    double eta = 0.01;     // input strength
    double t_lk = 1.0;     // carrier / photon lifetime ratio
    double noise = 1e-7;   // D_noise
    double dt = 0.01;

    /// Throws std::invalid_argument on dt <= 0, tau < 0, tau off the dt grid,
    /// t_lk <= 0 or non-finite fields.
    void validate() const;

    /// tau / dt as an exact integer (validate() guarantees this is meaningful).
    [[nodiscard]] std::int64_t delay_steps() const;
    [[nodiscard]] double epsilon() const { return 1.0 / t_lk; }
};

/// Rounds `value` to the nearest integer multiple of `dt`; throws if the
/// residue exceeds a relative tolerance of 1e-9.
[[nodiscard]] std::int64_t steps_on_grid(double value, double dt, const char* what);

struct SystemState {
    double e_re = 0.0;
    double e_im = 0.0;
    double n = 0.0;
    double t = 0.0;

    [[nodiscard]] double intensity() const { return e_re * e_re + e_im * e_im; }
    [[nodiscard]] std::complex<double> field() const { return {e_re, e_im}; }
};

struct Derivative {
    double e_re = 0.0;
    double e_im = 0.0;
    double n = 0.0;
};

/// Deterministic right-hand side of the rate equations. `delayed` supplies
/// E(t - tau); its N and t are ignored. `drive` is the product I(t) g(t).
[[nodiscard]] Derivative lk_rhs(const SystemState& state, const SystemState& delayed,
                                const LaserParams& params, double drive);

/// Values of the piecewise-constant drive seen by one RK4 step.
struct StepDrive {
    double start = 0.0;
    double mid = 0.0;
    double end = 0.0;
};

/// Ring buffer of the field on the integration grid covering [t - tau, t],
/// together with the deterministic field derivative at each grid point.
/// Times before the start of integration return the constant initial history.
class History {
public:
    History(std::int64_t delay_steps, std::complex<double> initial_history,
            std::complex<double> field_at_start);

    [[nodiscard]] std::int64_t delay_steps() const { return delay_steps_; }
    [[nodiscard]] std::int64_t current_index() const { return current_; }

    /// Field at grid index `index` (<= current_index()).
    [[nodiscard]] std::complex<double> field(std::int64_t index) const;

    /// Field at the half-step after grid index `index` via cubic Hermite
    /// interpolation; needs the derivative at index + 1 to be recorded.
    [[nodiscard]] std::complex<double> field_mid(std::int64_t index) const;

    /// Record dt * dE/dt at the current grid point.
    void set_current_derivative(std::complex<double> derivative);

    /// Append the field for grid index current_index() + 1.
    void push(std::complex<double> field);

private:
    [[nodiscard]] std::size_t slot(std::int64_t index) const;

    std::int64_t delay_steps_;
    std::int64_t current_ = 0;
    std::complex<double> initial_;
    std::vector<std::complex<double>> fields_;
    std::vector<std::complex<double>> derivs_;
};

/// One deterministic RK4 step from `state`, reading delayed values from
/// `history` (whose current index must correspond to `state`). Records the
/// stage-one derivative in the history but does not push the new point.
[[nodiscard]] SystemState rk4_step(const SystemState& state, History& history,
                                   const LaserParams& params, const StepDrive& drive);

namespace detail {

struct RhsCoefficients {
    explicit RhsCoefficients(const LaserParams& p);
    double fb_re, fb_im, alpha, pump, eta, inv_t_lk;
};

SystemState rk4_kernel(const SystemState& s, History& history, const RhsCoefficients& c, double h,
                       const StepDrive& drive);

}  // namespace detail

/// Stateful integrator: owns the history and the per-run noise stream.
class Integrator {
public:
    /// Starts at `initial` with a constant history equal to `history_value`.
    Integrator(const LaserParams& params, const SystemState& initial,
               std::complex<double> history_value, std::uint64_t seed);

    /// Default start: constant history at (sqrt(max(P, 0.01)) + 1e-3, N = 0)
    /// followed by one noise kick on the field.
    Integrator(const LaserParams& params, std::uint64_t seed);

    [[nodiscard]] const SystemState& state() const { return state_; }
    [[nodiscard]] const LaserParams& params() const { return params_; }
    [[nodiscard]] std::int64_t step_index() const { return history_.current_index(); }

    /// Advances one step of length dt with the drive held at `drive`.
    void step(double drive);

    /// Advances `n_steps` with zero drive.
    void relax(std::int64_t n_steps);

private:
    void apply_noise();

    LaserParams params_;
    History history_;
    SystemState state_;
    detail::RhsCoefficients coeffs_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double noise_scale_;
};

/// Piecewise-constant drive: value u_l * mask_n on [lT + n theta, lT + (n+1) theta),
/// zero outside the input window. Time is measured from `start` on the dt grid.
class DriveSignal {
public:
    DriveSignal() = default;
    DriveSignal(std::vector<double> inputs, std::vector<double> mask,
                std::int64_t steps_per_node, std::int64_t start_step = 0);

    [[nodiscard]] double at_step(std::int64_t step) const;
    [[nodiscard]] double at_time(double t, double dt) const;
    [[nodiscard]] std::int64_t steps_per_node() const { return steps_per_node_; }
    [[nodiscard]] std::int64_t steps_per_cycle() const {
        return steps_per_node_ * static_cast<std::int64_t>(mask_.size());
    }
    [[nodiscard]] std::int64_t start_step() const { return start_step_; }
    [[nodiscard]] std::int64_t end_step() const {
        return start_step_ + steps_per_cycle() * static_cast<std::int64_t>(inputs_.size());
    }
    [[nodiscard]] std::span<const double> inputs() const { return inputs_; }
    [[nodiscard]] std::span<const double> mask() const { return mask_; }

private:
    std::vector<double> inputs_;
    std::vector<double> mask_;
    std::int64_t steps_per_node_ = 1;
    std::int64_t start_step_ = 0;
};

struct IntegrateOptions {
    std::optional<SystemState> initial;           // default start when empty
    std::optional<std::complex<double>> history;  // defaults to initial field
};

/// Integrates for `duration` and returns |E|^2 at each requested sample time
/// (time since start, multiples of dt, ascending). Throws on off-grid times.
[[nodiscard]] std::vector<double> integrate(const LaserParams& params, const DriveSignal& drive,
                                            double duration, std::span<const double> sample_times,
                                            std::uint64_t seed, const IntegrateOptions& options = {});

}  // namespace delayrc
