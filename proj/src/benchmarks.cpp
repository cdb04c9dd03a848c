#include "delayrc/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace delayrc {

std::vector<double> narma10(std::span<const double> u) {
    if (u.size() < 10) {
        throw std::invalid_argument("narma10: need at least 10 inputs");
    }
    const std::size_t n_total = u.size();
    std::vector<double> a(n_total, 0.0);
    double window = 0.0;  // sum_{i=0..9} A_{n-i}
    for (std::size_t n = 0; n + 1 < n_total; ++n) {
        window += a[n];
        if (n >= 10) {
            window -= a[n - 10];
        }
        const double u_lag = n >= 9 ? u[n - 9] : 0.0;
        a[n + 1] = 0.3 * a[n] + 0.05 * a[n] * window + 1.5 * u_lag * u[n] + 0.1;
        if (!(std::abs(a[n + 1]) <= 1e3)) {
            throw NarmaDivergence("narma10: sequence diverged at step " + std::to_string(n + 1));
        }
    }
    return a;
}

NarmaSequence make_narma10(std::size_t length, std::uint64_t seed, std::size_t burn_in) {
    NarmaSequence seq;
    seq.burn_in = burn_in;
    seq.inputs = make_inputs(length, 0.0, 0.5, seed).values;
    seq.targets = narma10(seq.inputs);
    return seq;
}

NarmaResult run_narma10(const LaserParams& params, const ReservoirClocking& clocking,
                        const NarmaOptions& options, std::uint64_t input_seed,
                        std::uint64_t noise_seed) {
    if (options.train < 1 || options.test < 1) {
        throw std::invalid_argument("run_narma10: train and test lengths must be positive");
    }
    if (options.buffer < static_cast<std::int64_t>(options.burn_in)) {
        throw std::invalid_argument("run_narma10: buffer must cover the NARMA burn-in");
    }
    const std::int64_t driven = options.buffer + options.train + options.test;
    // One extra input so the last row has its A_{n+1}.
    InputSequence inputs = make_inputs(static_cast<std::size_t>(driven + 1), 0.0, 0.5, input_seed);
    const std::vector<double> a = narma10(inputs.values);
    inputs.values.pop_back();

    const StateMatrix states =
        harvest(params, clocking, inputs, noise_seed, HarvestOptions{options.transient, options.buffer});

    std::vector<double> target(static_cast<std::size_t>(options.train + options.test));
    for (std::size_t r = 0; r < target.size(); ++r) {
        target[r] = a[static_cast<std::size_t>(states.input_offset) + r + 1];
    }
    const Eigen::MatrixXd train_s = states.values.topRows(options.train);
    const Eigen::MatrixXd test_s = states.values.bottomRows(options.test);
    const std::span<const double> train_y(target.data(), static_cast<std::size_t>(options.train));
    const std::span<const double> test_y(target.data() + options.train,
                                         static_cast<std::size_t>(options.test));

    const ReadoutWeights w = train_readout(train_s, train_y, options.regularizer, options.bias);
    const Eigen::VectorXd fit = w.predict(train_s);
    const Eigen::VectorXd pred = w.predict(test_s);
    NarmaResult out;
    out.train_nrmse = nrmse(std::span<const double>(fit.data(), static_cast<std::size_t>(fit.size())), train_y);
    out.test_nrmse = nrmse(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())), test_y);
    return out;
}

LagRegressionResult linear_lag_regression(std::span<const double> u, std::span<const double> y,
                                          int lags, std::size_t first, std::size_t train,
                                          double regularizer) {
    if (lags < 1) {
        throw std::invalid_argument("linear_lag_regression: lags must be >= 1");
    }
    if (u.size() != y.size()) {
        throw std::invalid_argument("linear_lag_regression: u and y lengths differ");
    }
    first = std::max(first, static_cast<std::size_t>(lags - 1));
    if (first + train >= u.size()) {
        throw std::invalid_argument("linear_lag_regression: no rows left for testing");
    }
    const auto rows = static_cast<Eigen::Index>(u.size() - first);
    Eigen::MatrixXd x(rows, lags);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t n = first + static_cast<std::size_t>(r);
        for (int j = 0; j < lags; ++j) {
            x(r, j) = u[n - static_cast<std::size_t>(j)];
        }
    }
    const auto n_train = static_cast<Eigen::Index>(train);
    const std::span<const double> y_train = y.subspan(first, train);
    const std::span<const double> y_test = y.subspan(first + train);
    const ReadoutWeights w = train_readout(x.topRows(n_train), y_train, regularizer, true);
    const Eigen::VectorXd fit = w.predict(x.topRows(n_train));
    const Eigen::VectorXd pred = w.predict(x.bottomRows(rows - n_train));
    LagRegressionResult out;
    out.train_nrmse = nrmse(std::span<const double>(fit.data(), static_cast<std::size_t>(fit.size())), y_train);
    out.test_nrmse = nrmse(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())), y_test);
    return out;
}

LagRegressionResult baseline_linear(std::span<const double> u, int lags, double train_fraction,
                                    std::size_t burn_in) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("baseline_linear: train fraction must lie in (0, 1)");
    }
    const std::vector<double> a = narma10(u);
    // Row n predicts A_{n+1}; the last input has no successor.
    std::vector<double> next(a.begin() + 1, a.end());
    const std::span<const double> inputs = u.first(u.size() - 1);
    const std::size_t first = std::max(burn_in, static_cast<std::size_t>(lags - 1));
    if (first + 2 >= inputs.size()) {
        throw std::invalid_argument("baseline_linear: sequence too short");
    }
    const auto train = static_cast<std::size_t>(train_fraction * static_cast<double>(inputs.size() - first));
    return linear_lag_regression(inputs, next, lags, first, train);
}

}  // namespace delayrc
