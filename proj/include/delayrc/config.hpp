#pragma once

// Experiment configuration: JSON file plus dotted key=value overrides.

#include "delayrc/benchmarks.hpp"
#include "delayrc/capacity.hpp"
#include "delayrc/dde_core.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace delayrc {

/// Configuration error carrying a source location ("file:line").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, const std::string& message);

    [[nodiscard]] const std::string& source() const { return source_; }
    [[nodiscard]] int line() const { return line_; }

private:
    std::string source_;
    int line_;
};

struct SweepAxis {
    std::string parameter;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log = false;

    [[nodiscard]] std::vector<double> values() const;
};

enum class SweepMode { spectra, capacity, narma10, full };
[[nodiscard]] const char* to_string(SweepMode mode);

struct Seeds {
    std::uint64_t mask = 1;
    std::uint64_t input = 2;
    std::uint64_t noise = 3;
};

struct ExperimentConfig {
    LaserParams laser;

    int nodes = 10;
    double clock_cycle = 220.0;
    /// If positive, tau = tau_ratio * T (snapped to the dt grid) at every point.
    double tau_ratio = 0.0;

    std::int64_t length = 20000;  // retained input cycles
    std::int64_t buffer = 5000;   // discarded driven cycles
    double transient = 1e5;

    CapacityOptions capacity;  // max_delay defaults to 100 here
    NarmaOptions narma;

    int eigen_count = 100;
    bool newton = false;  // refine the spectrum before computing predictors

    SweepMode mode = SweepMode::capacity;
    std::vector<SweepAxis> axes;
    Seeds seeds;

    std::string output_csv;
    std::string output_json;

    ExperimentConfig();

    /// Throws ConfigError (line 0) on inconsistent values.
    void validate() const;
    [[nodiscard]] std::size_t grid_size() const;
};

/// Parameter names accepted by sweep axes.
[[nodiscard]] const std::vector<std::string>& sweep_parameters();

/// Sets one sweepable parameter; throws std::invalid_argument for unknown names.
void set_parameter(ExperimentConfig& config, const std::string& name, double value);

/// Applies tau_ratio, if set.
void apply_tau_ratio(ExperimentConfig& config);

/// Full-scale lengths: L = 250000, buffer = 1e5, max_delay = 500,
/// NARMA10 train/test = 25000.
void apply_paper_scale(ExperimentConfig& config);

/// Parses JSON text, then applies `overrides` ("section.key=value").
[[nodiscard]] ExperimentConfig parse_config(const std::string& text, const std::string& source,
                                            const std::vector<std::string>& overrides = {});

[[nodiscard]] ExperimentConfig load_config(const std::string& path,
                                           const std::vector<std::string>& overrides = {});

}  // namespace delayrc
