#pragma once

// Time-multiplexed reservoir: mask, drive construction, state harvesting,
// linear readout and error metric.

#include "delayrc/dde_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace delayrc {

struct ReservoirClocking {
    double clock_cycle = 220.0;  // T
    int nodes = 10;              // N_V
    std::vector<double> mask;    // N_V values in [0, 1]
    std::uint64_t mask_seed = 0;

    [[nodiscard]] double theta() const { return clock_cycle / nodes; }

    /// Checks N_V >= 1, mask length, mask range, and that theta and T sit on
    /// the dt grid with T = N_V * theta exactly.
    void validate(double dt) const;
    [[nodiscard]] std::int64_t steps_per_node(double dt) const;
};

/// Builds a clocking from N_V and theta with a fresh random mask.
[[nodiscard]] ReservoirClocking make_clocking(int nodes, double theta, std::uint64_t mask_seed);

struct InputSequence {
    std::vector<double> values;
    std::uint64_t seed = 0;
    double lo = -1.0;
    double hi = 1.0;
};

/// iid uniform inputs on [lo, hi].
[[nodiscard]] InputSequence make_inputs(std::size_t length, double lo, double hi,
                                        std::uint64_t seed);

/// iid uniform [0, 1] mask values.
[[nodiscard]] std::vector<double> make_mask(int nodes, std::uint64_t seed);

/// drive(t) = u_l * mask_n on [lT + n theta, lT + (n+1) theta), starting at step 0.
[[nodiscard]] DriveSignal build_drive(std::span<const double> inputs,
                                      const ReservoirClocking& clocking, double dt);

/// L x N_V responses. Row r was sampled during the clock cycle that injected
/// input index `input_offset + r`, so that input is "delay 1" for that row.
struct StateMatrix {
    Eigen::MatrixXd values;
    bool centered = false;
    Eigen::VectorXd column_means;
    std::int64_t input_offset = 0;
    std::uint64_t mask_seed = 0;
    std::uint64_t input_seed = 0;
    std::uint64_t noise_seed = 0;

    [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return values.cols(); }

    /// Copy with every column shifted to zero mean; means are recorded.
    [[nodiscard]] StateMatrix centered_copy() const;
};

struct HarvestOptions {
    double transient = 1e5;   // input-free settling time, discarded
    std::int64_t buffer = 5000;  // driven clock cycles, discarded
};

/// Simulates transient + buffer + (inputs.size() - buffer) cycles and samples
/// |E|^2 at the end of every node interval after the buffer.
[[nodiscard]] StateMatrix harvest(const LaserParams& params, const ReservoirClocking& clocking,
                                  const InputSequence& inputs, std::uint64_t noise_seed,
                                  const HarvestOptions& options = {});

struct ReadoutWeights {
    Eigen::VectorXd weights;
    double bias = 0.0;
    bool has_bias = false;
    double regularizer = 0.0;

    [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& states) const;
};

/// Solves min ||S w (+ b) - y||^2 + lambda ||w||^2. With lambda = 0 the
/// minimum-norm least-squares (pseudoinverse) solution is returned.
[[nodiscard]] ReadoutWeights train_readout(const Eigen::MatrixXd& states,
                                           std::span<const double> targets, double regularizer,
                                           bool with_bias = false);

/// sqrt(sum (target - y)^2 / (N var(target))). Throws on length mismatch or
/// constant targets.
[[nodiscard]] double nrmse(std::span<const double> prediction, std::span<const double> target);

/// CSV with a '#' metadata line, a header row, then one row per clock cycle.
void write_state_matrix_csv(std::ostream& out, const StateMatrix& states);
[[nodiscard]] StateMatrix read_state_matrix_csv(std::istream& in);

}  // namespace delayrc
