#pragma once

// CSV and JSON writers. CSV floats use 9 significant digits; JSON reports
// carry "schema": 1.

#include "delayrc/capacity.hpp"
#include "delayrc/config.hpp"
#include "delayrc/spectra.hpp"
#include "delayrc/sweep.hpp"

#include <ostream>
#include <span>
#include <string>

namespace delayrc {

inline constexpr int kReportSchema = 1;

/// "%.9g"; NaN prints as "nan".
[[nodiscard]] std::string format_number(double value);

/// "# generated YYYY-MM-DDTHH:MM:SSZ"
[[nodiscard]] std::string timestamp_line();

/// One row per grid point. Wall times are left out so reruns are byte
/// identical apart from the optional timestamp line.
void write_sweep_csv(std::ostream& out, const SweepResult& result, bool timestamp = true);
void write_sweep_json(std::ostream& out, const SweepResult& result, const ExperimentConfig& config);

void write_capacity_json(std::ostream& out, const CapacityReport& report, const ExperimentConfig& config);
void write_narma_json(std::ostream& out, const NarmaResult& result, const ExperimentConfig& config);

/// Columns: re, im, branch, k, source, phi, lambda.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, const Predictors& predictors);
void write_spectrum_json(std::ostream& out, const Spectrum& spectrum, const Predictors& predictors,
                         double clock_cycle);

/// Columns: t, e_re, e_im, n, intensity.
void write_trajectory_csv(std::ostream& out, std::span<const SystemState> trajectory);

}  // namespace delayrc
