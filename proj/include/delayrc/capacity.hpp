#pragma once

// Task-independent memory capacity over products of normalized Legendre
// polynomials of past inputs.

#include "delayrc/reservoir.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace delayrc {

/// sqrt(2d + 1) P_d(u): unit mean square for u ~ U[-1, 1]. Throws for |u| > 1
/// or d < 0.
[[nodiscard]] double legendre_normalized(int degree, double u);

/// One Legendre product target: (delay, degree) factors, delays distinct and
/// ascending. Delay 1 is the input injected during the row's own clock cycle.
struct TaskSpec {
    std::vector<std::pair<int, int>> factors;

    [[nodiscard]] int degree() const;
    [[nodiscard]] int min_delay() const;
    [[nodiscard]] int max_delay() const;
    /// Throws when empty, when delays repeat or are < 1, or degrees are < 1.
    void validate() const;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Target column for `rows` state rows whose delay-1 input is
/// inputs[input_offset + r].
[[nodiscard]] std::vector<double> target_from_task(const TaskSpec& task,
                                                   std::span<const double> inputs,
                                                   std::int64_t input_offset, std::int64_t rows);

/// Orthonormal basis of col(S) from a thin SVD with relative rank tolerance
/// 1e-10; built once per state matrix and reused for every task.
class ProjectionBasis {
public:
    explicit ProjectionBasis(const Eigen::MatrixXd& centered_states, double rank_tol = 1e-10);

    [[nodiscard]] Eigen::Index rank() const { return basis_.cols(); }
    [[nodiscard]] Eigen::Index rows() const { return basis_.rows(); }

    /// ||Q^T y_c||^2 / ||y_c||^2 with y_c the mean-removed target, clamped to [0, 1].
    [[nodiscard]] double capacity(std::span<const double> target) const;

private:
    Eigen::MatrixXd basis_;
    Eigen::VectorXd basis_sums_;  // Q^T 1
};

/// Projection-form capacity of a target against a (centered) state matrix.
[[nodiscard]] double capacity(const StateMatrix& states, std::span<const double> target);

/// Correlation-form capacity sum_ij <y s_i> <s s>^+_ij <s_j y> / <y^2>, evaluated
/// literally on the data given (no centering). Kept as an independent route.
[[nodiscard]] double capacity_dambre(const Eigen::MatrixXd& states, std::span<const double> target);

/// Tasks sharing a base (smallest) delay and a span max - min.
struct TaskShell {
    int base = 1;
    int span = 0;
    std::vector<TaskSpec> tasks;
};

struct EnumeratorOptions {
    int degree = 1;
    int max_delay = 100;
    int window = 30;      // W: largest span for degree >= 2
    int stall = 50;       // J: consecutive empty bases (or delays at degree 1)
    int span_stall = 10;  // consecutive empty spans before leaving a base; <= 0 disables
};

/// Walks the tasks of one degree shell by shell. After each shell the caller
/// reports whether any task in it was retained; the stall rules use that.
class TaskEnumerator {
public:
    explicit TaskEnumerator(EnumeratorOptions options);

    [[nodiscard]] std::optional<TaskShell> next();
    void record(bool contributed);
    [[nodiscard]] bool done() const { return done_; }

private:
    void finish_base();

    EnumeratorOptions opt_;
    int base_ = 1;
    int span_ = 0;
    int span_misses_ = 0;
    int base_misses_ = 0;
    bool base_contributed_ = false;
    bool pending_ = false;
    bool done_ = false;
};

/// Every task of the degree with span <= window, without stall pruning.
[[nodiscard]] std::vector<TaskSpec> enumerate_tasks(int degree, int max_delay, int window);

/// All (interior delays, degree composition) tasks with fixed base and span.
[[nodiscard]] std::vector<TaskSpec> tasks_in_shell(int degree, int base, int span);

/// Upper (1 - alpha) quantile of the capacity of a target independent of a
/// rank-r state matrix with `rows` samples: Beta(r/2, (rows-1-r)/2).
[[nodiscard]] double finite_sample_floor(Eigen::Index rank, Eigen::Index rows, double alpha);

struct CapacityOptions {
    int max_degree = 5;
    int max_delay = 500;
    double cutoff = 0.001;
    int window = 30;
    int stall = 50;
    int span_stall = 10;
    /// Raise the cutoff to the finite-sample floor when alpha > 0.
    double noise_floor_alpha = 1e-8;
    bool keep_tasks = false;
};

struct TaskCapacity {
    TaskSpec task;
    double capacity = 0.0;
};

struct CapacityReport {
    std::vector<double> by_degree;  // MC^d at index d - 1
    double total = 0.0;
    double cutoff = 0.0;        // requested
    double cutoff_used = 0.0;   // after the finite-sample floor
    std::int64_t evaluated = 0;
    std::int64_t retained = 0;
    std::vector<TaskCapacity> tasks;  // only with keep_tasks

    [[nodiscard]] double degree(int d) const {
        return d >= 1 && static_cast<std::size_t>(d) <= by_degree.size() ? by_degree[d - 1] : 0.0;
    }
};

/// MC^d for d = 1..max_degree and their sum. `inputs` is the full sequence the
/// states were harvested from (values in [-1, 1]).
[[nodiscard]] CapacityReport memory_capacity(const StateMatrix& states,
                                             std::span<const double> inputs,
                                             const CapacityOptions& options = {});

}  // namespace delayrc
