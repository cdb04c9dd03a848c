// delayrc: command-line front end for simulations, capacities, spectra and sweeps.

#include "delayrc/benchmarks.hpp"
#include "delayrc/config.hpp"
#include "delayrc/report.hpp"
#include "delayrc/reservoir.hpp"
#include "delayrc/spectra.hpp"
#include "delayrc/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace delayrc;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2, kPartial = 3 };

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    bool paper_scale = false;
    std::string output;
};

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config_path.empty() ? parse_config("", "<defaults>", c.overrides)
                                                 : load_config(c.config_path, c.overrides);
    if (c.paper_scale) {
        apply_paper_scale(cfg);
        cfg.validate();
    }
    return cfg;
}

// Writes to `path`, or stdout when empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    write(out);
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("-c,--config", c.config_path, "JSON configuration file");
    app->add_option("-s,--set", c.overrides, "Override, e.g. laser.kappa=0.1 (repeatable)");
    app->add_flag("--paper-scale", c.paper_scale, "Use full-length runs (L = 250000, buffer = 1e5)");
    app->add_option("-o,--output", c.output, "Output file (default: stdout)");
}

int cmd_simulate(const Common& c, double duration, double every, std::size_t inputs) {
    ExperimentConfig cfg = load(c);
    apply_tau_ratio(cfg);
    const LaserParams& p = cfg.laser;
    const std::int64_t total = steps_on_grid(duration, p.dt, "duration");
    const std::int64_t stride = steps_on_grid(every, p.dt, "sample interval");
    if (stride < 1) {
        throw ConfigError("simulate", 0, "sample interval must be positive");
    }
    DriveSignal drive;
    if (inputs > 0) {
        const ReservoirClocking clocking = make_clocking(cfg.nodes, cfg.clock_cycle / cfg.nodes, cfg.seeds.mask);
        const InputSequence in = make_inputs(inputs, -1.0, 1.0, cfg.seeds.input);
        drive = build_drive(in.values, clocking, p.dt);
    }
    Integrator integ(p, cfg.seeds.noise);
    std::vector<SystemState> trajectory{integ.state()};
    for (std::int64_t s = 0; s < total; ++s) {
        integ.step(inputs > 0 ? drive.at_step(s) : 0.0);
        if ((s + 1) % stride == 0) {
            trajectory.push_back(integ.state());
        }
    }
    emit(c.output, [&](std::ostream& out) { write_trajectory_csv(out, trajectory); });
    return kOk;
}

int cmd_capacity(const Common& c, bool keep_tasks) {
    ExperimentConfig cfg = load(c);
    cfg.mode = SweepMode::capacity;
    cfg.capacity.keep_tasks = keep_tasks;
    if (cfg.grid_size() != 1 || !cfg.axes.empty()) {
        std::cerr << "note: capacity ignores sweep axes; use 'sweep' for grids\n";
        cfg.axes.clear();
    }
    apply_tau_ratio(cfg);
    const SweepRecord rec = evaluate_point(cfg);
    if (!rec.ok) {
        throw std::runtime_error(rec.error);
    }
    emit(c.output.empty() ? cfg.output_json : c.output,
         [&](std::ostream& out) { write_capacity_json(out, *rec.capacity, cfg); });
    return kOk;
}

int cmd_narma(const Common& c) {
    ExperimentConfig cfg = load(c);
    cfg.mode = SweepMode::narma10;
    cfg.axes.clear();
    apply_tau_ratio(cfg);
    const SweepRecord rec = evaluate_point(cfg);
    if (!rec.ok) {
        throw std::runtime_error(rec.error);
    }
    emit(c.output.empty() ? cfg.output_json : c.output,
         [&](std::ostream& out) { write_narma_json(out, *rec.narma, cfg); });
    return kOk;
}

int cmd_spectrum(const Common& c, const std::string& format) {
    ExperimentConfig cfg = load(c);
    cfg.axes.clear();
    apply_tau_ratio(cfg);
    const Spectrum spectrum = operating_spectrum(cfg.laser, cfg.eigen_count,
                                                 cfg.newton ? SpectrumMethod::newton : SpectrumMethod::pcs);
    const Predictors pr = predictors(spectrum, cfg.clock_cycle, cfg.eigen_count);
    emit(c.output, [&](std::ostream& out) {
        if (format == "csv") {
            write_spectrum_csv(out, spectrum, pr);
        } else {
            write_spectrum_json(out, spectrum, pr, cfg.clock_cycle);
        }
    });
    return kOk;
}

int cmd_sweep(const Common& c, int jobs, bool quiet) {
    ExperimentConfig cfg = load(c);
    const SweepResult result = run_sweep(cfg, jobs, [&](const SweepRecord& r, std::size_t done, std::size_t total) {
        if (!quiet) {
            std::cerr << "[" << done << "/" << total << "] point " << r.index << (r.ok ? " ok" : " failed")
                      << (r.ok ? "" : ": " + r.error) << " (" << format_number(r.wall_seconds) << " s)\n";
        }
    });
    emit(c.output.empty() ? cfg.output_csv : c.output, [&](std::ostream& out) { write_sweep_csv(out, result); });
    if (!cfg.output_json.empty()) {
        emit(cfg.output_json, [&](std::ostream& out) { write_sweep_json(out, result, cfg); });
    }
    return result.failures() == 0 ? kOk : kPartial;
}

int cmd_lines(const Common& c, double clock_min, double clock_max, int clock_count, double band,
              const std::vector<double>& levels) {
    ExperimentConfig cfg = load(c);
    if (!(clock_min > 0.0 && clock_max >= clock_min) || clock_count < 1) {
        throw ConfigError("lines", 0, "need 0 < clock-min <= clock-max and clock-count >= 1");
    }
    std::vector<double> clocks(static_cast<std::size_t>(clock_count));
    for (int i = 0; i < clock_count; ++i) {
        clocks[static_cast<std::size_t>(i)] =
            clock_count == 1 ? clock_min : clock_min + (clock_max - clock_min) * i / (clock_count - 1);
    }
    const SpectrumMethod method = cfg.newton ? SpectrumMethod::newton : SpectrumMethod::pcs;
    std::vector<std::string> axis_names;
    for (const SweepAxis& a : cfg.axes) {
        axis_names.push_back(a.parameter);
    }

    std::ostringstream body;
    body << "index";
    for (const std::string& a : axis_names) {
        body << ",axis_" << a;
    }
    body << ",kind,order,clock_cycle,value\n";
    for (std::size_t i = 0; i < cfg.grid_size(); ++i) {
        std::vector<double> coords;
        const ExperimentConfig pc = point_config(cfg, i, &coords);
        auto prefix = [&] {
            std::ostringstream os;
            os << i;
            for (double v : coords) {
                os << ',' << format_number(v);
            }
            return os.str();
        };
        Spectrum spectrum;
        try {
            spectrum = operating_spectrum(pc.laser, pc.eigen_count, method);
        } catch (const std::exception& e) {
            std::cerr << "point " << i << ": " << e.what() << '\n';
            continue;
        }
        if (spectrum.values.empty()) {
            continue;
        }
        const cplx lead = spectrum.values.front().value;
        int j = 1;
        for (double t : resonant_clock_cycles(lead, clock_max)) {
            body << prefix() << ",phi_lead," << j++ << ',' << format_number(t) << ','
                 << format_number(std::fmod(std::abs(lead.imag()) * t, std::numbers::pi)) << '\n';
        }
        for (double level : levels) {
            const double t = lambda_level_clock_cycle(lead, level);
            if (std::isfinite(t)) {
                body << prefix() << ",lambda_level,0," << format_number(t) << ',' << format_number(level) << '\n';
            }
        }
        const std::vector<LaserParams> one{pc.laser};
        for (const ResonancePoint& r : resonance_lines(one, clocks, pc.eigen_count, band, method)) {
            body << prefix() << ",phi_hat_band," << r.line << ',' << format_number(r.clock_cycle) << ','
                 << format_number(r.phi_hat) << '\n';
        }
    }
    emit(c.output, [&](std::ostream& out) { out << body.str(); });
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-based reservoir computing with a Lang-Kobayashi laser"};
    app.require_subcommand(1);

    Common common;

    auto* simulate = app.add_subcommand("simulate", "Dump a trajectory");
    add_common(simulate, common);
    double duration = 1000.0;
    double every = 1.0;
    std::size_t n_inputs = 0;
    simulate->add_option("--duration", duration, "Integration time");
    simulate->add_option("--every", every, "Sampling interval");
    simulate->add_option("--inputs", n_inputs, "Drive with this many masked random inputs");

    auto* capacity = app.add_subcommand("capacity", "Memory capacity at one operating point");
    add_common(capacity, common);
    bool keep_tasks = false;
    capacity->add_flag("--tasks", keep_tasks, "Include every retained task in the report");

    auto* narma = app.add_subcommand("narma10", "NARMA10 train/test NRMSE at one operating point");
    add_common(narma, common);

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues and clock-cycle predictors");
    add_common(spectrum, common);
    std::string format = "json";
    spectrum->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid");
    add_common(sweep, common);
    int jobs = default_jobs();
    bool quiet = false;
    sweep->add_option("-j,--jobs", jobs, "Worker threads (default: DELAYRC_JOBS or core count)")
        ->check(CLI::PositiveNumber);
    sweep->add_flag("-q,--quiet", quiet, "No progress output");

    auto* lines = app.add_subcommand("lines", "Resonance and distance-reduction contour data");
    add_common(lines, common);
    double clock_min = 10.0;
    double clock_max = 600.0;
    int clock_count = 591;
    double band = 0.05 * std::numbers::pi;
    std::vector<double> levels{0.5, 0.9};
    lines->add_option("--clock-min", clock_min, "Smallest clock cycle scanned");
    lines->add_option("--clock-max", clock_max, "Largest clock cycle scanned");
    lines->add_option("--clock-count", clock_count, "Number of clock cycles scanned");
    lines->add_option("--band", band, "Half-width around 0 and pi counted as resonant");
    lines->add_option("--levels", levels, "Distance-reduction levels for contour lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*simulate) return cmd_simulate(common, duration, every, n_inputs);
        if (*capacity) return cmd_capacity(common, keep_tasks);
        if (*narma) return cmd_narma(common);
        if (*spectrum) return cmd_spectrum(common, format);
        if (*sweep) return cmd_sweep(common, jobs, quiet);
        if (*lines) return cmd_lines(common, clock_min, clock_max, clock_count, band, levels);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
