#include "delayrc/capacity.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace delayrc {

double legendre_normalized(int degree, double u) {
    if (degree < 0) {
        throw std::invalid_argument("legendre_normalized: negative degree");
    }
    if (!(std::abs(u) <= 1.0)) {
        throw std::domain_error("legendre_normalized: |u| > 1");
    }
    double prev = 1.0;
    double cur = u;
    if (degree == 0) {
        cur = 1.0;
    }
    for (int n = 1; n < degree; ++n) {
        const double next = ((2.0 * n + 1.0) * u * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return std::sqrt(2.0 * degree + 1.0) * cur;
}

int TaskSpec::degree() const {
    int d = 0;
    for (const auto& [delay, deg] : factors) {
        d += deg;
    }
    return d;
}

int TaskSpec::min_delay() const { return factors.empty() ? 0 : factors.front().first; }
int TaskSpec::max_delay() const { return factors.empty() ? 0 : factors.back().first; }

void TaskSpec::validate() const {
    if (factors.empty()) {
        throw std::invalid_argument("TaskSpec: no factors (constant target)");
    }
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].first < 1 || factors[i].second < 1) {
            throw std::invalid_argument("TaskSpec: delays and degrees must be >= 1");
        }
        if (i > 0 && factors[i].first <= factors[i - 1].first) {
            throw std::invalid_argument("TaskSpec: delays must be distinct and ascending");
        }
    }
}

std::vector<double> target_from_task(const TaskSpec& task, std::span<const double> inputs,
                                     std::int64_t input_offset, std::int64_t rows) {
    task.validate();
    const std::int64_t first = input_offset - (task.max_delay() - 1);
    if (first < 0 || input_offset + rows > static_cast<std::int64_t>(inputs.size())) {
        throw std::invalid_argument("target_from_task: insufficient input history");
    }
    std::vector<double> y(static_cast<std::size_t>(rows), 1.0);
    for (const auto& [delay, deg] : task.factors) {
        for (std::int64_t r = 0; r < rows; ++r) {
            y[static_cast<std::size_t>(r)] *=
                legendre_normalized(deg, inputs[static_cast<std::size_t>(input_offset + r - (delay - 1))]);
        }
    }
    return y;
}

// ---------------------------------------------------------------------------

ProjectionBasis::ProjectionBasis(const Eigen::MatrixXd& centered_states, double rank_tol) {
    if (centered_states.rows() == 0 || centered_states.cols() == 0) {
        throw std::invalid_argument("ProjectionBasis: empty state matrix");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered_states, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index rank = 0;
    const double threshold = rank_tol * sv(0);
    while (rank < sv.size() && sv(rank) > threshold) {
        ++rank;
    }
    basis_ = svd.matrixU().leftCols(rank);
    basis_sums_ = basis_.colwise().sum().transpose();
}

double ProjectionBasis::capacity(std::span<const double> target) const {
    if (static_cast<Eigen::Index>(target.size()) != basis_.rows()) {
        throw std::invalid_argument("capacity: target length differs from state rows");
    }
    Eigen::Map<const Eigen::VectorXd> y(target.data(), basis_.rows());
    const double n = static_cast<double>(basis_.rows());
    const double mean = y.sum() / n;
    const double norm_sq = y.squaredNorm() - n * mean * mean;
    if (!(norm_sq > 0.0)) {
        throw std::invalid_argument("capacity: target has zero norm after centering");
    }
    const Eigen::VectorXd proj = basis_.transpose() * y - mean * basis_sums_;
    return std::clamp(proj.squaredNorm() / norm_sq, 0.0, 1.0);
}

double capacity(const StateMatrix& states, std::span<const double> target) {
    const StateMatrix centered = states.centered ? states : states.centered_copy();
    return ProjectionBasis(centered.values).capacity(target);
}

double capacity_dambre(const Eigen::MatrixXd& states, std::span<const double> target) {
    if (static_cast<Eigen::Index>(target.size()) != states.rows()) {
        throw std::invalid_argument("capacity_dambre: target length differs from state rows");
    }
    Eigen::Map<const Eigen::VectorXd> y(target.data(), states.rows());
    const double l = static_cast<double>(states.rows());
    const double y_sq = y.squaredNorm() / l;
    if (!(y_sq > 0.0)) {
        throw std::invalid_argument("capacity_dambre: zero target");
    }
    const Eigen::VectorXd ys = states.transpose() * y / l;             // <y s_i>
    const Eigen::MatrixXd ss = states.transpose() * states / l;        // <s_i s_j>
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ss, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-14 * sv(0)) {
            inv(i) = 1.0 / sv(i);
        }
    }
    const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    return ys.dot(pinv * ys) / y_sq;
}

// ---------------------------------------------------------------------------

namespace {

// Calls `emit` with every composition of `total` into `parts` positive integers.
void compositions(int total, int parts, std::vector<int>& current,
                  const std::function<void(const std::vector<int>&)>& emit) {
    if (parts == 1) {
        current.push_back(total);
        emit(current);
        current.pop_back();
        return;
    }
    for (int first = 1; first <= total - (parts - 1); ++first) {
        current.push_back(first);
        compositions(total - first, parts - 1, current, emit);
        current.pop_back();
    }
}

// Calls `emit` with every ascending choice of `count` values from [lo, hi].
void choose(int lo, int hi, int count, std::vector<int>& current,
            const std::function<void(const std::vector<int>&)>& emit) {
    if (count == 0) {
        emit(current);
        return;
    }
    for (int v = lo; v <= hi - count + 1; ++v) {
        current.push_back(v);
        choose(v + 1, hi, count - 1, current, emit);
        current.pop_back();
    }
}

}  // namespace

std::vector<TaskSpec> tasks_in_shell(int degree, int base, int span) {
    std::vector<TaskSpec> out;
    if (degree < 1 || base < 1 || span < 0) {
        return out;
    }
    if (span == 0) {
        out.push_back(TaskSpec{{{base, degree}}});
        return out;
    }
    const int last = base + span;
    std::vector<int> interior;
    std::vector<int> parts;
    for (int m = 2; m <= std::min(degree, span + 1); ++m) {
        choose(base + 1, last - 1, m - 2, interior, [&](const std::vector<int>& mids) {
            std::vector<int> delays;
            delays.reserve(static_cast<std::size_t>(m));
            delays.push_back(base);
            delays.insert(delays.end(), mids.begin(), mids.end());
            delays.push_back(last);
            compositions(degree, m, parts, [&](const std::vector<int>& degs) {
                TaskSpec t;
                t.factors.reserve(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) {
                    t.factors.emplace_back(delays[static_cast<std::size_t>(i)],
                                           degs[static_cast<std::size_t>(i)]);
                }
                out.push_back(std::move(t));
            });
        });
    }
    return out;
}

TaskEnumerator::TaskEnumerator(EnumeratorOptions options) : opt_(options) {
    if (opt_.degree < 1) {
        throw std::invalid_argument("TaskEnumerator: degree must be >= 1");
    }
    done_ = opt_.max_delay < 1;
}

std::optional<TaskShell> TaskEnumerator::next() {
    if (done_) {
        return std::nullopt;
    }
    if (pending_) {
        throw std::logic_error("TaskEnumerator: record() the previous shell first");
    }
    pending_ = true;
    return TaskShell{base_, span_, tasks_in_shell(opt_.degree, base_, span_)};
}

void TaskEnumerator::finish_base() {
    if (base_contributed_) {
        base_misses_ = 0;
    } else {
        ++base_misses_;
    }
    if ((opt_.stall > 0 && base_misses_ >= opt_.stall) || base_ >= opt_.max_delay) {
        done_ = true;
        return;
    }
    ++base_;
    span_ = 0;
    span_misses_ = 0;
    base_contributed_ = false;
}

void TaskEnumerator::record(bool contributed) {
    if (!pending_) {
        throw std::logic_error("TaskEnumerator: record() without a shell");
    }
    pending_ = false;
    if (contributed) {
        base_contributed_ = true;
        span_misses_ = 0;
    } else {
        ++span_misses_;
    }
    if (opt_.degree == 1) {
        finish_base();
        return;
    }
    const int max_span = std::min(opt_.window, opt_.max_delay - base_);
    const bool span_stalled = opt_.span_stall > 0 && span_misses_ >= opt_.span_stall;
    if (span_stalled || span_ >= max_span) {
        finish_base();
    } else {
        ++span_;
    }
}

std::vector<TaskSpec> enumerate_tasks(int degree, int max_delay, int window) {
    TaskEnumerator it(EnumeratorOptions{degree, max_delay, window, 0, 0});
    std::vector<TaskSpec> out;
    while (auto shell = it.next()) {
        out.insert(out.end(), shell->tasks.begin(), shell->tasks.end());
        it.record(true);
    }
    return out;
}

double finite_sample_floor(Eigen::Index rank, Eigen::Index rows, double alpha) {
    if (alpha <= 0.0 || rank <= 0 || rows - 1 - rank <= 0) {
        return 0.0;
    }
    boost::math::beta_distribution<double> null_dist(0.5 * static_cast<double>(rank),
                                                     0.5 * static_cast<double>(rows - 1 - rank));
    return boost::math::quantile(boost::math::complement(null_dist, alpha));
}

// ---------------------------------------------------------------------------

CapacityReport memory_capacity(const StateMatrix& states, std::span<const double> inputs,
                               const CapacityOptions& options) {
    if (options.max_degree < 1 || options.max_delay < 1) {
        throw std::invalid_argument("memory_capacity: max_degree and max_delay must be >= 1");
    }
    const Eigen::Index rows = states.rows();
    const std::int64_t offset = states.input_offset;
    const std::int64_t lo = offset - (options.max_delay - 1);
    if (lo < 0 || offset + rows > static_cast<std::int64_t>(inputs.size())) {
        throw std::invalid_argument(
            "memory_capacity: inputs must cover max_delay - 1 steps before the first state row");
    }

    const StateMatrix centered = states.centered ? states : states.centered_copy();
    const ProjectionBasis basis(centered.values);

    CapacityReport report;
    report.by_degree.assign(static_cast<std::size_t>(options.max_degree), 0.0);
    report.cutoff = options.cutoff;
    report.cutoff_used =
        std::max(options.cutoff, finite_sample_floor(basis.rank(), rows, options.noise_floor_alpha));

    // table[d](k) = normalized P_d(u[lo + k])
    const Eigen::Index span_len = static_cast<Eigen::Index>(offset + rows - lo);
    std::vector<Eigen::ArrayXd> table(static_cast<std::size_t>(options.max_degree + 1));
    for (int d = 1; d <= options.max_degree; ++d) {
        auto& t = table[static_cast<std::size_t>(d)];
        t.resize(span_len);
        for (Eigen::Index k = 0; k < span_len; ++k) {
            t(k) = legendre_normalized(d, inputs[static_cast<std::size_t>(lo + k)]);
        }
    }

    Eigen::VectorXd target(rows);
    auto evaluate = [&](const TaskSpec& task) {
        bool first = true;
        for (const auto& [delay, deg] : task.factors) {
            const Eigen::Index start = static_cast<Eigen::Index>(offset - (delay - 1) - lo);
            const auto slice = table[static_cast<std::size_t>(deg)].segment(start, rows);
            if (first) {
                target.array() = slice;
                first = false;
            } else {
                target.array() *= slice;
            }
        }
        return basis.capacity(std::span<const double>(target.data(), static_cast<std::size_t>(rows)));
    };

    for (int d = 1; d <= options.max_degree; ++d) {
        TaskEnumerator enumerator(EnumeratorOptions{d, options.max_delay, options.window,
                                                    options.stall, options.span_stall});
        double sum = 0.0;
        while (auto shell = enumerator.next()) {
            bool contributed = false;
            for (const TaskSpec& task : shell->tasks) {
                const double c = evaluate(task);
                ++report.evaluated;
                if (c >= report.cutoff_used) {
                    contributed = true;
                    sum += c;
                    ++report.retained;
                    if (options.keep_tasks) {
                        report.tasks.push_back({task, c});
                    }
                }
            }
            enumerator.record(contributed);
        }
        report.by_degree[static_cast<std::size_t>(d - 1)] = sum;
        report.total += sum;
    }
    return report;
}

}  // namespace delayrc
