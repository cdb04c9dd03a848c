#pragma once

#include "delayrc/reservoir.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace delayrc {

struct NarmaDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tenth-order NARMA recursion driven by `u`, with zero-padded history:
/// A_{n+1} = 0.3 A_n + 0.05 A_n sum_{i=0..9} A_{n-i} + 1.5 u_{n-9} u_n + 0.1.
/// Returns A_0..A_{len-1} (A_0 = 0). Throws NarmaDivergence if |A| > 1e3.
[[nodiscard]] std::vector<double> narma10(std::span<const double> u);

struct NarmaSequence {
    std::vector<double> inputs;   // uniform [0, 0.5]
    std::vector<double> targets;  // A_n
    std::size_t burn_in = 100;
};

[[nodiscard]] NarmaSequence make_narma10(std::size_t length, std::uint64_t seed,
                                         std::size_t burn_in = 100);

struct NarmaOptions {
    std::int64_t train = 10000;
    std::int64_t test = 10000;
    std::int64_t buffer = 5000;   // discarded driven cycles, >= burn-in
    double transient = 1e5;
    double regularizer = 0.0;
    bool bias = true;
    std::size_t burn_in = 100;
};

struct NarmaResult {
    double train_nrmse = 0.0;
    double test_nrmse = 0.0;
};

/// Harvests the reservoir on NARMA10 inputs, trains on the first segment and
/// evaluates on the disjoint following segment.
[[nodiscard]] NarmaResult run_narma10(const LaserParams& params, const ReservoirClocking& clocking,
                                      const NarmaOptions& options, std::uint64_t input_seed,
                                      std::uint64_t noise_seed);

struct LagRegressionResult {
    double train_nrmse = 0.0;
    double test_nrmse = 0.0;
};

/// Ridge regression of y[n] on (u_n, ..., u_{n-lags+1}) plus bias, using rows
/// n in [first, first + train) for fitting and [first + train, end) for testing.
[[nodiscard]] LagRegressionResult linear_lag_regression(std::span<const double> u,
                                                        std::span<const double> y, int lags,
                                                        std::size_t first, std::size_t train,
                                                        double regularizer = 0.0);

/// No-reservoir reference: regress A_{n+1} on the last `lags` NARMA inputs.
/// `train_fraction` of the usable rows (after burn-in) are used for fitting.
[[nodiscard]] LagRegressionResult baseline_linear(std::span<const double> u, int lags,
                                                  double train_fraction = 0.5,
                                                  std::size_t burn_in = 100);

}  // namespace delayrc
