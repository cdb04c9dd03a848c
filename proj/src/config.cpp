#include "delayrc/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace delayrc {

using nlohmann::json;

namespace {

std::string located(const std::string& source, int line, const std::string& message) {
    std::ostringstream os;
    os << source;
    if (line > 0) {
        os << ':' << line;
    }
    os << ": error: " << message;
    return os.str();
}

int line_at(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Maps dotted key paths to source locations for diagnostics.
class Locator {
public:
    Locator(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    void mark_override(const std::string& path, const std::string& origin) { overrides_[path] = origin; }

    [[noreturn]] void fail(const std::string& path, const std::string& message) const {
        if (const auto it = overrides_.find(path); it != overrides_.end()) {
            throw ConfigError("override", 0, "'" + it->second + "': " + message);
        }
        throw ConfigError(source_, line_of(path), message);
    }

private:
    int line_of(const std::string& path) const {
        std::size_t pos = 0;
        std::size_t start = 0;
        while (start <= path.size()) {
            const std::size_t dot = path.find('.', start);
            std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            part = part.substr(0, part.find('['));
            const std::size_t found = text_.find('"' + part + '"', pos);
            if (found == std::string::npos) {
                return pos == 0 ? 0 : line_at(text_, pos);
            }
            pos = found;
            if (dot == std::string::npos) {
                break;
            }
            start = dot + 1;
        }
        return line_at(text_, pos);
    }

    const std::string& text_;
    std::string source_;
    std::map<std::string, std::string> overrides_;
};

class Reader {
public:
    Reader(const json& object, std::string section, const Locator& where)
        : object_(object), section_(std::move(section)), where_(where) {
        if (!object_.is_object()) {
            where_.fail(section_, "section \"" + section_ + "\" must be an object");
        }
    }

    void real(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) {
                fail(key, "expected a number");
            }
            out = v->get<double>();
            if (!std::isfinite(out)) {
                fail(key, "value must be finite");
            }
        }
    }

    template <typename Int>
    void integer(const char* key, Int& out) {
        if (const json* v = take(key)) {
            if (v->is_number_integer()) {
                out = v->get<Int>();
            } else if (v->is_number_float() && std::floor(v->get<double>()) == v->get<double>()) {
                out = static_cast<Int>(v->get<double>());
            } else {
                fail(key, "expected an integer");
            }
        }
    }

    void seed(const char* key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned()) {
                fail(key, "expected a non-negative integer seed");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) {
                fail(key, "expected true or false");
            }
            out = v->get<bool>();
        }
    }

    void text(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) {
                fail(key, "expected a string");
            }
            out = v->get<std::string>();
        }
    }

    const json* take(const char* key) {
        seen_.insert(key);
        const auto it = object_.find(key);
        return it == object_.end() ? nullptr : &*it;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        where_.fail(section_ + "." + key, "\"" + section_ + "." + key + "\": " + message);
    }

    void finish() const {
        for (const auto& [key, value] : object_.items()) {
            if (!seen_.contains(key)) {
                fail(key, "unknown key");
            }
        }
    }

private:
    const json& object_;
    std::string section_;
    const Locator& where_;
    std::set<std::string> seen_;
};

SweepMode parse_mode(const std::string& name, Reader& r) {
    if (name == "spectra") return SweepMode::spectra;
    if (name == "capacity") return SweepMode::capacity;
    if (name == "narma10") return SweepMode::narma10;
    if (name == "full") return SweepMode::full;
    r.fail("mode", "unknown mode '" + name + "' (spectra, capacity, narma10, full)");
}

json parse_override_value(const std::string& raw) {
    try {
        return json::parse(raw);
    } catch (const json::parse_error&) {
        return json(raw);
    }
}

void set_path(json& root, const std::string& path, const json& value, const std::string& origin) {
    json* node = &root;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) {
            throw ConfigError("override", 0, "'" + origin + "': empty key component");
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        json& child = (*node)[part];
        if (child.is_null()) {
            child = json::object();
        } else if (!child.is_object()) {
            throw ConfigError("override", 0, "'" + origin + "': '" + part + "' is not a section");
        }
        node = &child;
        start = dot + 1;
    }
}

ExperimentConfig from_json(const json& root, const Locator& where) {
    ExperimentConfig cfg;
    if (!root.is_object()) {
        where.fail("", "top level must be a JSON object");
    }
    static const std::set<std::string> sections{"laser",   "reservoir", "capacity", "narma10",
                                                "spectrum", "sweep",    "seeds",    "output"};
    for (const auto& [key, value] : root.items()) {
        if (!sections.contains(key)) {
            where.fail(key, "unknown section \"" + key + "\"");
        }
    }
    auto section = [&](const char* name) -> const json& {
        static const json empty = json::object();
        const auto it = root.find(name);
        return it == root.end() ? empty : *it;
    };

    {
        Reader r(section("laser"), "laser", where);
        LaserParams& p = cfg.laser;
        r.real("alpha", p.alpha);
        r.real("kappa", p.kappa);
        r.real("phi", p.phi);
        r.real("tau", p.tau);
        r.real("pump", p.pump);
        r.real("eta", p.eta);
        r.real("t_lk", p.t_lk);
        r.real("noise", p.noise);
        r.real("dt", p.dt);
        r.finish();
    }
    {
        Reader r(section("reservoir"), "reservoir", where);
        r.integer("nodes", cfg.nodes);
        r.real("clock_cycle", cfg.clock_cycle);
        double theta = 0.0;
        r.real("theta", theta);
        if (theta != 0.0) {
            if (section("reservoir").contains("clock_cycle")) {
                r.fail("theta", "give either clock_cycle or theta, not both");
            }
            cfg.clock_cycle = theta * cfg.nodes;
        }
        r.real("tau_ratio", cfg.tau_ratio);
        r.integer("length", cfg.length);
        r.integer("buffer", cfg.buffer);
        r.real("transient", cfg.transient);
        r.finish();
    }
    {
        Reader r(section("capacity"), "capacity", where);
        CapacityOptions& c = cfg.capacity;
        r.integer("max_degree", c.max_degree);
        r.integer("max_delay", c.max_delay);
        r.real("cutoff", c.cutoff);
        r.integer("window", c.window);
        r.integer("stall", c.stall);
        r.integer("span_stall", c.span_stall);
        r.real("noise_floor_alpha", c.noise_floor_alpha);
        r.finish();
    }
    {
        Reader r(section("narma10"), "narma10", where);
        NarmaOptions& n = cfg.narma;
        r.integer("train", n.train);
        r.integer("test", n.test);
        r.integer("buffer", n.buffer);
        r.real("transient", n.transient);
        r.real("regularizer", n.regularizer);
        r.boolean("bias", n.bias);
        r.integer("burn_in", n.burn_in);
        r.finish();
    }
    {
        Reader r(section("spectrum"), "spectrum", where);
        r.integer("count", cfg.eigen_count);
        r.boolean("newton", cfg.newton);
        r.finish();
    }
    {
        Reader r(section("sweep"), "sweep", where);
        std::string mode = to_string(cfg.mode);
        r.text("mode", mode);
        cfg.mode = parse_mode(mode, r);
        if (const json* axes = r.take("axes")) {
            if (!axes->is_array()) {
                r.fail("axes", "expected an array of axis objects");
            }
            for (std::size_t i = 0; i < axes->size(); ++i) {
                const std::string name = "sweep.axes[" + std::to_string(i) + "]";
                Reader a((*axes)[i], name, where);
                SweepAxis axis;
                a.text("parameter", axis.parameter);
                a.real("min", axis.min);
                a.real("max", axis.max);
                axis.max = (*axes)[i].contains("max") ? axis.max : axis.min;
                a.integer("count", axis.count);
                std::string scale = "linear";
                a.text("scale", scale);
                if (scale != "linear" && scale != "log") {
                    a.fail("scale", "expected \"linear\" or \"log\"");
                }
                axis.log = scale == "log";
                a.finish();
                const auto& names = sweep_parameters();
                if (std::find(names.begin(), names.end(), axis.parameter) == names.end()) {
                    a.fail("parameter", "unknown sweep parameter '" + axis.parameter + "'");
                }
                if (axis.count < 1) {
                    a.fail("count", "count must be >= 1");
                }
                if (axis.log && !(axis.min > 0.0 && axis.max > 0.0)) {
                    a.fail("scale", "log axes need positive bounds");
                }
                cfg.axes.push_back(axis);
            }
        }
        r.finish();
    }
    {
        Reader r(section("seeds"), "seeds", where);
        r.seed("mask", cfg.seeds.mask);
        r.seed("input", cfg.seeds.input);
        r.seed("noise", cfg.seeds.noise);
        r.finish();
    }
    {
        Reader r(section("output"), "output", where);
        r.text("csv", cfg.output_csv);
        r.text("json", cfg.output_json);
        r.finish();
    }
    return cfg;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(located(source, line, message)), source_(std::move(source)), line_(line) {}

std::vector<double> SweepAxis::values() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out[static_cast<std::size_t>(i)] =
            log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
    }
    if (count > 1) {
        out.back() = max;
    }
    return out;
}

const char* to_string(SweepMode mode) {
    switch (mode) {
        case SweepMode::spectra: return "spectra";
        case SweepMode::capacity: return "capacity";
        case SweepMode::narma10: return "narma10";
        case SweepMode::full: return "full";
    }
    return "unknown";
}

ExperimentConfig::ExperimentConfig() { capacity.max_delay = 100; }

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& m) { throw ConfigError("config", 0, m); };
    if (nodes < 1) bad("reservoir.nodes must be >= 1");
    if (!(clock_cycle > 0.0)) bad("reservoir.clock_cycle must be positive");
    if (tau_ratio < 0.0) bad("reservoir.tau_ratio must be >= 0");
    if (length < 1) bad("reservoir.length must be >= 1");
    if (buffer < 0) bad("reservoir.buffer must be >= 0");
    if (transient < 0.0) bad("reservoir.transient must be >= 0");
    if (capacity.max_degree < 1) bad("capacity.max_degree must be >= 1");
    if (capacity.max_delay < 1) bad("capacity.max_delay must be >= 1");
    if (capacity.window < 1 || capacity.stall < 1 || capacity.span_stall < 1)
        bad("capacity.window, stall and span_stall must be >= 1");
    if (capacity.max_delay > buffer + 1)
        bad("capacity.max_delay exceeds the input history kept by reservoir.buffer");
    if (eigen_count < 1) bad("spectrum.count must be >= 1");
    if (narma.train < 1 || narma.test < 1) bad("narma10.train and narma10.test must be >= 1");
    for (const SweepAxis& a : axes) {
        if (a.count < 1) bad("sweep axis '" + a.parameter + "': count must be >= 1");
        if (a.log && !(a.min > 0.0 && a.max > 0.0))
            bad("sweep axis '" + a.parameter + "': log axes need positive bounds");
    }
    try {
        LaserParams p = laser;
        if (tau_ratio > 0.0) {
            p.tau = std::round(tau_ratio * clock_cycle / p.dt) * p.dt;
        }
        p.validate();
    } catch (const std::invalid_argument& e) {
        bad(std::string("laser: ") + e.what());
    }
}

std::size_t ExperimentConfig::grid_size() const {
    std::size_t n = 1;
    for (const SweepAxis& a : axes) {
        n *= static_cast<std::size_t>(a.count);
    }
    return n;
}

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"alpha", "kappa", "phi",   "tau",         "pump",
                                                "eta",   "t_lk",  "noise", "clock_cycle", "theta",
                                                "tau_ratio"};
    return names;
}

void set_parameter(ExperimentConfig& c, const std::string& name, double v) {
    static const std::map<std::string, std::function<void(ExperimentConfig&, double)>> setters{
        {"alpha", [](ExperimentConfig& x, double y) { x.laser.alpha = y; }},
        {"kappa", [](ExperimentConfig& x, double y) { x.laser.kappa = y; }},
        {"phi", [](ExperimentConfig& x, double y) { x.laser.phi = y; }},
        {"tau", [](ExperimentConfig& x, double y) { x.laser.tau = y; }},
        {"pump", [](ExperimentConfig& x, double y) { x.laser.pump = y; }},
        {"eta", [](ExperimentConfig& x, double y) { x.laser.eta = y; }},
        {"t_lk", [](ExperimentConfig& x, double y) { x.laser.t_lk = y; }},
        {"noise", [](ExperimentConfig& x, double y) { x.laser.noise = y; }},
        {"clock_cycle", [](ExperimentConfig& x, double y) { x.clock_cycle = y; }},
        {"theta", [](ExperimentConfig& x, double y) { x.clock_cycle = y * x.nodes; }},
        {"tau_ratio", [](ExperimentConfig& x, double y) { x.tau_ratio = y; }},
    };
    const auto it = setters.find(name);
    if (it == setters.end()) {
        throw std::invalid_argument("unknown sweep parameter '" + name + "'");
    }
    it->second(c, v);
}

void apply_tau_ratio(ExperimentConfig& c) {
    if (c.tau_ratio > 0.0) {
        c.laser.tau = std::round(c.tau_ratio * c.clock_cycle / c.laser.dt) * c.laser.dt;
    }
}

void apply_paper_scale(ExperimentConfig& c) {
    c.length = 250000;
    c.buffer = 100000;
    c.capacity.max_delay = 500;
    c.narma.train = 25000;
    c.narma.test = 25000;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::vector<std::string>& overrides) {
    json root;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        root = json::object();
    } else {
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            std::string what = e.what();
            // Strip the library's "[json.exception.parse_error.101] " prefix.
            if (const auto close = what.find("] "); close != std::string::npos) {
                what = what.substr(close + 2);
            }
            throw ConfigError(source, line_at(text, e.byte == 0 ? 0 : e.byte - 1), what);
        }
    }
    Locator where(text, source);
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override", 0, "'" + o + "': expected key=value");
        }
        const std::string path = o.substr(0, eq);
        set_path(root, path, parse_override_value(o.substr(eq + 1)), o);
        where.mark_override(path, o);
    }
    ExperimentConfig cfg = from_json(root, where);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, 0, "cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path, overrides);
}

}  // namespace delayrc
