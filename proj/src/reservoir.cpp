#include "delayrc/reservoir.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace delayrc {

void ReservoirClocking::validate(double dt) const {
    if (nodes < 1) {
        throw std::invalid_argument("N_V must be at least 1");
    }
    if (mask.size() != static_cast<std::size_t>(nodes)) {
        throw std::invalid_argument("mask length must equal N_V");
    }
    for (double g : mask) {
        if (!(g >= 0.0 && g <= 1.0)) {
            throw std::invalid_argument("mask values must lie in [0, 1]");
        }
    }
    const std::int64_t node_steps = steps_on_grid(theta(), dt, "theta");
    const std::int64_t cycle_steps = steps_on_grid(clock_cycle, dt, "T");
    if (node_steps < 1 || node_steps * nodes != cycle_steps) {
        throw std::invalid_argument("T must equal N_V * theta on the dt grid");
    }
}

std::int64_t ReservoirClocking::steps_per_node(double dt) const {
    return steps_on_grid(theta(), dt, "theta");
}

std::vector<double> make_mask(int nodes, std::uint64_t seed) {
    if (nodes < 1) {
        throw std::invalid_argument("make_mask: N_V must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> mask(static_cast<std::size_t>(nodes));
    for (double& g : mask) {
        g = uniform(rng);
    }
    return mask;
}

ReservoirClocking make_clocking(int nodes, double theta, std::uint64_t mask_seed) {
    ReservoirClocking c;
    c.nodes = nodes;
    c.clock_cycle = nodes * theta;
    c.mask = make_mask(nodes, mask_seed);
    c.mask_seed = mask_seed;
    return c;
}

InputSequence make_inputs(std::size_t length, double lo, double hi, std::uint64_t seed) {
    InputSequence seq;
    seq.seed = seed;
    seq.lo = lo;
    seq.hi = hi;
    seq.values.resize(length);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(lo, hi);
    for (double& u : seq.values) {
        u = uniform(rng);
    }
    return seq;
}

DriveSignal build_drive(std::span<const double> inputs, const ReservoirClocking& clocking,
                        double dt) {
    clocking.validate(dt);
    return DriveSignal(std::vector<double>(inputs.begin(), inputs.end()), clocking.mask,
                       clocking.steps_per_node(dt));
}

StateMatrix StateMatrix::centered_copy() const {
    StateMatrix out = *this;
    out.column_means = values.colwise().mean().transpose();
    out.values.rowwise() -= out.column_means.transpose();
    out.centered = true;
    return out;
}

StateMatrix harvest(const LaserParams& params, const ReservoirClocking& clocking,
                    const InputSequence& inputs, std::uint64_t noise_seed,
                    const HarvestOptions& options) {
    params.validate();
    clocking.validate(params.dt);
    if (options.buffer < 0 || static_cast<std::size_t>(options.buffer) >= inputs.values.size()) {
        throw std::invalid_argument("harvest: input sequence must be longer than the buffer");
    }
    const std::int64_t transient_steps = steps_on_grid(options.transient, params.dt, "transient");
    const std::int64_t node_steps = clocking.steps_per_node(params.dt);
    const std::int64_t rows = static_cast<std::int64_t>(inputs.values.size()) - options.buffer;

    Integrator integrator(params, noise_seed);
    integrator.relax(transient_steps);

    StateMatrix out;
    out.values.resize(rows, clocking.nodes);
    out.input_offset = options.buffer;
    out.mask_seed = clocking.mask_seed;
    out.input_seed = inputs.seed;
    out.noise_seed = noise_seed;

    const auto n_inputs = static_cast<std::int64_t>(inputs.values.size());
    for (std::int64_t cycle = 0; cycle < n_inputs; ++cycle) {
        const double u = inputs.values[static_cast<std::size_t>(cycle)];
        const std::int64_t row = cycle - options.buffer;
        for (int node = 0; node < clocking.nodes; ++node) {
            const double drive = u * clocking.mask[static_cast<std::size_t>(node)];
            for (std::int64_t s = 0; s < node_steps; ++s) {
                integrator.step(drive);
            }
            if (row >= 0) {
                out.values(row, node) = integrator.state().intensity();
            }
        }
    }
    if (!out.values.allFinite()) {
        throw std::runtime_error("harvest: non-finite reservoir response");
    }
    return out;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd ReadoutWeights::predict(const Eigen::MatrixXd& states) const {
    Eigen::VectorXd y = states * weights;
    if (has_bias) {
        y.array() += bias;
    }
    return y;
}

ReadoutWeights train_readout(const Eigen::MatrixXd& states, std::span<const double> targets,
                             double regularizer, bool with_bias) {
    if (static_cast<std::size_t>(states.rows()) != targets.size()) {
        throw std::invalid_argument("train_readout: rows(S) != len(targets)");
    }
    if (regularizer < 0.0) {
        throw std::invalid_argument("train_readout: negative regularizer");
    }
    Eigen::Map<const Eigen::VectorXd> y_raw(targets.data(), static_cast<Eigen::Index>(targets.size()));

    // The bias is handled by centering, which leaves it unpenalized.
    Eigen::MatrixXd s = states;
    Eigen::VectorXd y = y_raw;
    Eigen::RowVectorXd s_mean = Eigen::RowVectorXd::Zero(states.cols());
    double y_mean = 0.0;
    if (with_bias) {
        s_mean = s.colwise().mean();
        s.rowwise() -= s_mean;
        y_mean = y.mean();
        y.array() -= y_mean;
    }

    ReadoutWeights out;
    out.regularizer = regularizer;
    out.has_bias = with_bias;
    if (regularizer == 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(s);
        out.weights = cod.solve(y);
    } else {
        Eigen::MatrixXd gram = s.transpose() * s;
        gram.diagonal().array() += regularizer;
        out.weights = gram.ldlt().solve(s.transpose() * y);
    }
    if (with_bias) {
        out.bias = y_mean - s_mean.dot(out.weights);
    }
    if (!out.weights.allFinite()) {
        throw std::runtime_error("train_readout: non-finite weights");
    }
    return out;
}

double nrmse(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size() || target.empty()) {
        throw std::invalid_argument("nrmse: length mismatch");
    }
    const auto n = static_cast<double>(target.size());
    double mean = 0.0;
    for (double v : target) {
        mean += v;
    }
    mean /= n;
    double var = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        var += (target[i] - mean) * (target[i] - mean);
        sq += (target[i] - prediction[i]) * (target[i] - prediction[i]);
    }
    var /= n;
    if (!(var > 0.0)) {
        throw std::invalid_argument("nrmse: target variance is zero");
    }
    return std::sqrt(sq / (n * var));
}

// ---------------------------------------------------------------------------

void write_state_matrix_csv(std::ostream& out, const StateMatrix& states) {
    out << "# delayrc state-matrix schema=1 L=" << states.rows() << " N_V=" << states.cols()
        << " input_offset=" << states.input_offset << " mask_seed=" << states.mask_seed
        << " input_seed=" << states.input_seed << " noise_seed=" << states.noise_seed
        << " centered=" << (states.centered ? 1 : 0) << '\n';
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
        out << (c ? "," : "") << "s" << c + 1;
    }
    out << '\n';
    std::ostringstream row;
    row.precision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index r = 0; r < states.rows(); ++r) {
        row.str("");
        for (Eigen::Index c = 0; c < states.cols(); ++c) {
            if (c) {
                row << ',';
            }
            row << states.values(r, c);
        }
        out << row.str() << '\n';
    }
}

namespace {

std::string metadata_value(const std::string& line, const std::string& key) {
    const std::string needle = " " + key + "=";
    const auto pos = line.find(needle);
    if (pos == std::string::npos) {
        throw std::runtime_error("state-matrix CSV: missing '" + key + "' in metadata line");
    }
    const auto start = pos + needle.size();
    return line.substr(start, line.find(' ', start) - start);
}

}  // namespace

StateMatrix read_state_matrix_csv(std::istream& in) {
    std::string meta;
    if (!std::getline(in, meta) || meta.rfind("# delayrc state-matrix", 0) != 0) {
        throw std::runtime_error("state-matrix CSV: missing metadata line");
    }
    const long rows = std::stol(metadata_value(meta, "L"));
    const long cols = std::stol(metadata_value(meta, "N_V"));
    StateMatrix out;
    out.input_offset = std::stoll(metadata_value(meta, "input_offset"));
    out.mask_seed = std::stoull(metadata_value(meta, "mask_seed"));
    out.input_seed = std::stoull(metadata_value(meta, "input_seed"));
    out.noise_seed = std::stoull(metadata_value(meta, "noise_seed"));
    out.centered = metadata_value(meta, "centered") == "1";
    std::string line;
    std::getline(in, line);  // header
    out.values.resize(rows, cols);
    for (long r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("state-matrix CSV: expected " + std::to_string(rows) + " rows");
        }
        std::istringstream fields(line);
        std::string cell;
        for (long c = 0; c < cols; ++c) {
            if (!std::getline(fields, cell, ',')) {
                throw std::runtime_error("state-matrix CSV: short row " + std::to_string(r + 1));
            }
            out.values(r, c) = std::stod(cell);
        }
    }
    if (out.centered) {
        out.column_means = Eigen::VectorXd::Zero(cols);
    }
    return out;
}

}  // namespace delayrc
