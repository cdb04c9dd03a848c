#include "delayrc/report.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

namespace delayrc {

using nlohmann::json;

namespace {

json laser_json(const LaserParams& p) {
    return {{"alpha", p.alpha}, {"kappa", p.kappa}, {"phi", p.phi},     {"tau", p.tau}, {"pump", p.pump},
            {"eta", p.eta},     {"t_lk", p.t_lk},   {"noise", p.noise}, {"dt", p.dt}};
}

json config_json(const ExperimentConfig& c) {
    json axes = json::array();
    for (const SweepAxis& a : c.axes) {
        axes.push_back({{"parameter", a.parameter},
                        {"min", a.min},
                        {"max", a.max},
                        {"count", a.count},
                        {"scale", a.log ? "log" : "linear"}});
    }
    return {
        {"laser", laser_json(c.laser)},
        {"reservoir",
         {{"nodes", c.nodes},
          {"clock_cycle", c.clock_cycle},
          {"tau_ratio", c.tau_ratio},
          {"length", c.length},
          {"buffer", c.buffer},
          {"transient", c.transient}}},
        {"capacity",
         {{"max_degree", c.capacity.max_degree},
          {"max_delay", c.capacity.max_delay},
          {"cutoff", c.capacity.cutoff},
          {"window", c.capacity.window},
          {"stall", c.capacity.stall},
          {"span_stall", c.capacity.span_stall},
          {"noise_floor_alpha", c.capacity.noise_floor_alpha}}},
        {"narma10",
         {{"train", c.narma.train},
          {"test", c.narma.test},
          {"buffer", c.narma.buffer},
          {"transient", c.narma.transient},
          {"regularizer", c.narma.regularizer},
          {"bias", c.narma.bias},
          {"burn_in", c.narma.burn_in}}},
        {"spectrum", {{"count", c.eigen_count}, {"newton", c.newton}}},
        {"sweep", {{"mode", to_string(c.mode)}, {"axes", axes}}},
        {"seeds", {{"mask", c.seeds.mask}, {"input", c.seeds.input}, {"noise", c.seeds.noise}}},
    };
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json capacity_json(const CapacityReport& r) {
    json tasks = json::array();
    for (const TaskCapacity& t : r.tasks) {
        json factors = json::array();
        for (const auto& [delay, degree] : t.task.factors) {
            factors.push_back({delay, degree});
        }
        tasks.push_back({{"factors", factors}, {"capacity", t.capacity}});
    }
    json out = {{"total", r.total},         {"by_degree", r.by_degree}, {"cutoff", r.cutoff},
                {"cutoff_used", r.cutoff_used}, {"evaluated", r.evaluated}, {"retained", r.retained}};
    if (!r.tasks.empty()) {
        out["tasks"] = tasks;
    }
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out << (i ? "," : "") << cells[i];
    }
    out << '\n';
}

std::string csv_text(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    if (s.find_first_of(",\"") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c;
        if (c == '"') q += '"';
    }
    return q + '"';
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string timestamp_line() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[64];
    std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, bool timestamp) {
    if (timestamp) {
        out << timestamp_line() << '\n';
    }
    std::vector<std::string> header{"index"};
    for (const std::string& a : result.axis_names) {
        header.push_back("axis_" + a);
    }
    for (const char* h : {"kappa", "pump", "tau", "t_lk", "clock_cycle", "nodes", "mc_total"}) {
        header.emplace_back(h);
    }
    for (int d = 1; d <= result.max_degree; ++d) {
        header.push_back("mc" + std::to_string(d));
    }
    for (const char* h : {"cutoff_used", "phi_hat", "lambda_hat", "phi_lead", "lambda_lead",
                          "nrmse_train", "nrmse_test", "status", "error"}) {
        header.emplace_back(h);
    }
    write_row(out, header);

    const double nan = std::nan("");
    for (const SweepRecord& r : result.records) {
        std::vector<std::string> row{std::to_string(r.index)};
        for (std::size_t a = 0; a < result.axis_names.size(); ++a) {
            row.push_back(format_number(a < r.coordinates.size() ? r.coordinates[a] : nan));
        }
        row.push_back(format_number(r.laser.kappa));
        row.push_back(format_number(r.laser.pump));
        row.push_back(format_number(r.laser.tau));
        row.push_back(format_number(r.laser.t_lk));
        row.push_back(format_number(r.clock_cycle));
        row.push_back(std::to_string(r.nodes));
        row.push_back(format_number(r.capacity ? r.capacity->total : nan));
        for (int d = 1; d <= result.max_degree; ++d) {
            row.push_back(format_number(r.capacity ? r.capacity->degree(d) : nan));
        }
        row.push_back(format_number(r.capacity ? r.capacity->cutoff_used : nan));
        row.push_back(format_number(r.phi_hat));
        row.push_back(format_number(r.lambda_hat));
        row.push_back(format_number(r.phi_lead));
        row.push_back(format_number(r.lambda_lead));
        row.push_back(format_number(r.narma ? r.narma->train_nrmse : nan));
        row.push_back(format_number(r.narma ? r.narma->test_nrmse : nan));
        row.emplace_back(r.ok ? "ok" : "failed");
        row.push_back(csv_text(r.error));
        write_row(out, row);
    }
}

void write_sweep_json(std::ostream& out, const SweepResult& result, const ExperimentConfig& config) {
    json records = json::array();
    for (const SweepRecord& r : result.records) {
        json rec = {{"index", r.index},
                    {"coordinates", r.coordinates},
                    {"laser", laser_json(r.laser)},
                    {"clock_cycle", r.clock_cycle},
                    {"nodes", r.nodes},
                    {"input_seed", r.input_seed},
                    {"noise_seed", r.noise_seed},
                    {"phi_hat", number_or_null(r.phi_hat)},
                    {"lambda_hat", number_or_null(r.lambda_hat)},
                    {"phi_lead", number_or_null(r.phi_lead)},
                    {"lambda_lead", number_or_null(r.lambda_lead)},
                    {"status", r.ok ? "ok" : "failed"},
                    {"error", r.error},
                    {"wall_seconds", r.wall_seconds}};
        if (r.capacity) {
            rec["capacity"] = capacity_json(*r.capacity);
        }
        if (r.narma) {
            rec["narma10"] = {{"train_nrmse", r.narma->train_nrmse}, {"test_nrmse", r.narma->test_nrmse}};
        }
        records.push_back(std::move(rec));
    }
    const json doc = {{"schema", kReportSchema},
                      {"kind", "sweep"},
                      {"axes", result.axis_names},
                      {"failures", result.failures()},
                      {"config", config_json(config)},
                      {"records", records}};
    out << doc.dump(2) << '\n';
}

void write_capacity_json(std::ostream& out, const CapacityReport& report, const ExperimentConfig& config) {
    const json doc = {{"schema", kReportSchema},
                      {"kind", "capacity"},
                      {"config", config_json(config)},
                      {"result", capacity_json(report)}};
    out << doc.dump(2) << '\n';
}

void write_narma_json(std::ostream& out, const NarmaResult& result, const ExperimentConfig& config) {
    const json doc = {{"schema", kReportSchema},
                      {"kind", "narma10"},
                      {"config", config_json(config)},
                      {"result", {{"train_nrmse", result.train_nrmse}, {"test_nrmse", result.test_nrmse}}}};
    out << doc.dump(2) << '\n';
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, const Predictors& predictors) {
    out << "re,im,branch,k,source,phi,lambda\n";
    std::size_t used = 0;
    for (const Eigenvalue& e : spectrum.values) {
        const bool in = used < predictors.phi.size();
        const double nan = std::nan("");
        out << format_number(e.value.real()) << ',' << format_number(e.value.imag()) << ',' << e.branch << ','
            << e.k << ',' << to_string(e.source) << ','
            << format_number(in ? predictors.phi[used] : nan) << ','
            << format_number(in ? predictors.lambda[used] : nan) << '\n';
        ++used;
    }
}

void write_spectrum_json(std::ostream& out, const Spectrum& spectrum, const Predictors& predictors,
                         double clock_cycle) {
    json values = json::array();
    for (const Eigenvalue& e : spectrum.values) {
        values.push_back({{"re", e.value.real()},
                          {"im", e.value.imag()},
                          {"branch", e.branch},
                          {"k", e.k},
                          {"source", to_string(e.source)}});
    }
    const json doc = {{"schema", kReportSchema},
                      {"kind", "spectrum"},
                      {"laser", laser_json(spectrum.params)},
                      {"clock_cycle", clock_cycle},
                      {"newton_failures", spectrum.newton_failures},
                      {"eigenvalues", values},
                      {"predictors",
                       {{"count", predictors.count},
                        {"phi_hat", predictors.phi_hat},
                        {"lambda_hat", predictors.lambda_hat},
                        {"degenerate", predictors.degenerate},
                        {"phi", predictors.phi},
                        {"lambda", predictors.lambda}}}};
    out << doc.dump(2) << '\n';
}

void write_trajectory_csv(std::ostream& out, std::span<const SystemState> trajectory) {
    out << "t,e_re,e_im,n,intensity\n";
    for (const SystemState& s : trajectory) {
        out << format_number(s.t) << ',' << format_number(s.e_re) << ',' << format_number(s.e_im) << ','
            << format_number(s.n) << ',' << format_number(s.intensity()) << '\n';
    }
}

}  // namespace delayrc
