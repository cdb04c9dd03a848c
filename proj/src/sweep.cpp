#include "delayrc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace delayrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::size_t SweepResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const SweepRecord& r) { return !r.ok; }));
}

ExperimentConfig point_config(const ExperimentConfig& base, std::size_t index,
                              std::vector<double>* coordinates) {
    ExperimentConfig cfg = base;
    std::vector<double> coords(base.axes.size());
    std::size_t rest = index;
    for (std::size_t a = base.axes.size(); a-- > 0;) {
        const auto n = static_cast<std::size_t>(base.axes[a].count);
        coords[a] = base.axes[a].values()[rest % n];
        rest /= n;
    }
    for (std::size_t a = 0; a < base.axes.size(); ++a) {
        set_parameter(cfg, base.axes[a].parameter, coords[a]);
    }
    apply_tau_ratio(cfg);
    cfg.axes.clear();
    cfg.seeds.input = base.seeds.input ^ index;
    cfg.seeds.noise = base.seeds.noise ^ index;
    if (coordinates != nullptr) {
        *coordinates = std::move(coords);
    }
    return cfg;
}

SweepRecord evaluate_point(const ExperimentConfig& cfg, std::size_t index) {
    const auto start = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.index = index;
    rec.laser = cfg.laser;
    rec.clock_cycle = cfg.clock_cycle;
    rec.nodes = cfg.nodes;
    rec.input_seed = cfg.seeds.input;
    rec.noise_seed = cfg.seeds.noise;
    rec.phi_hat = rec.lambda_hat = rec.phi_lead = rec.lambda_lead = kNaN;

    try {
        cfg.laser.validate();
        try {
            const Spectrum spectrum = operating_spectrum(
                cfg.laser, cfg.eigen_count, cfg.newton ? SpectrumMethod::newton : SpectrumMethod::pcs);
            const Predictors all = predictors(spectrum, cfg.clock_cycle, cfg.eigen_count);
            const Predictors lead = predictors(spectrum, cfg.clock_cycle, 1);
            rec.phi_hat = all.phi_hat;
            rec.lambda_hat = all.lambda_hat;
            rec.phi_lead = lead.phi_hat;
            rec.lambda_lead = lead.lambda_hat;
        } catch (const std::exception& e) {
            if (cfg.mode == SweepMode::spectra) {
                throw;
            }
            rec.error = std::string("spectrum: ") + e.what();
        }

        if (cfg.mode == SweepMode::capacity || cfg.mode == SweepMode::full ||
            cfg.mode == SweepMode::narma10) {
            const ReservoirClocking clocking =
                make_clocking(cfg.nodes, cfg.clock_cycle / cfg.nodes, cfg.seeds.mask);
            if (cfg.mode != SweepMode::narma10) {
                const InputSequence inputs = make_inputs(
                    static_cast<std::size_t>(cfg.length + cfg.buffer), -1.0, 1.0, cfg.seeds.input);
                const StateMatrix states = harvest(cfg.laser, clocking, inputs, cfg.seeds.noise,
                                                   HarvestOptions{cfg.transient, cfg.buffer});
                rec.capacity = memory_capacity(states, inputs.values, cfg.capacity);
            }
            if (cfg.mode != SweepMode::capacity) {
                rec.narma = run_narma10(cfg.laser, clocking, cfg.narma, cfg.seeds.input, cfg.seeds.noise);
            }
        }
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

int default_jobs() {
    if (const char* env = std::getenv("DELAYRC_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<int>(v);
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

SweepResult run_sweep(const ExperimentConfig& config, int jobs, const ProgressFn& progress) {
    config.validate();
    SweepResult result;
    result.mode = config.mode;
    result.max_degree = config.capacity.max_degree;
    for (const SweepAxis& a : config.axes) {
        result.axis_names.push_back(a.parameter);
    }
    const std::size_t total = config.grid_size();
    result.records.resize(total);

    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            std::vector<double> coords;
            SweepRecord rec;
            try {
                const ExperimentConfig cfg = point_config(config, i, &coords);
                rec = evaluate_point(cfg, i);
            } catch (const std::exception& e) {
                rec.index = i;
                rec.ok = false;
                rec.error = e.what();
            }
            rec.coordinates = std::move(coords);
            result.records[i] = std::move(rec);
            const std::lock_guard lock(progress_mutex);
            ++done;
            if (progress) {
                progress(result.records[i], done, total);
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    return result;
}

}  // namespace delayrc
