#pragma once

// Grid evaluation of experiment configurations over a worker pool.

#include "delayrc/config.hpp"
#include "delayrc/spectra.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace delayrc {

struct SweepRecord {
    std::size_t index = 0;
    std::vector<double> coordinates;  // one per axis
    LaserParams laser;
    double clock_cycle = 0.0;
    int nodes = 0;
    std::uint64_t input_seed = 0;
    std::uint64_t noise_seed = 0;

    std::optional<CapacityReport> capacity;
    std::optional<NarmaResult> narma;

    // Predictors over the configured eigenvalue count; NaN when the operating
    // point has no spectrum (e.g. below threshold).
    double phi_hat = 0.0;
    double lambda_hat = 0.0;
    // Least-stable eigenvalue alone.
    double phi_lead = 0.0;
    double lambda_lead = 0.0;

    bool ok = true;
    std::string error;
    double wall_seconds = 0.0;
};

struct SweepResult {
    std::vector<std::string> axis_names;
    SweepMode mode = SweepMode::capacity;
    int max_degree = 0;
    std::vector<SweepRecord> records;

    [[nodiscard]] std::size_t failures() const;
};

/// Configuration of one grid point: axis values applied in order, tau_ratio
/// applied after them, input and noise seeds XOR the grid index. The mask seed
/// is shared so every point uses the same reservoir.
[[nodiscard]] ExperimentConfig point_config(const ExperimentConfig& base, std::size_t index,
                                            std::vector<double>* coordinates = nullptr);

/// Evaluates a single configuration; errors are caught and recorded.
[[nodiscard]] SweepRecord evaluate_point(const ExperimentConfig& config, std::size_t index = 0);

/// Worker count from DELAYRC_JOBS, else the hardware concurrency (at least 1).
[[nodiscard]] int default_jobs();

using ProgressFn = std::function<void(const SweepRecord&, std::size_t done, std::size_t total)>;

/// Evaluates every grid point with `jobs` workers. Records are ordered by grid
/// index regardless of completion order.
[[nodiscard]] SweepResult run_sweep(const ExperimentConfig& config, int jobs,
                                    const ProgressFn& progress = {});

}  // namespace delayrc
