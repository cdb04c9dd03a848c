#include "delayrc/reservoir.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <sstream>

using namespace delayrc;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

std::span<const double> view(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TEST_CASE("mask and inputs are seeded and in range") {
    const auto m1 = make_mask(50, 11);
    const auto m2 = make_mask(50, 11);
    const auto m3 = make_mask(50, 12);
    CHECK(m1 == m2);
    CHECK(m1 != m3);
    for (double g : m1) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
    }
    const InputSequence in = make_inputs(1000, -1.0, 1.0, 5);
    CHECK(in.values.size() == 1000);
    CHECK(in.seed == 5);
    double mean = 0.0;
    for (double u : in.values) {
        CHECK(u >= -1.0);
        CHECK(u <= 1.0);
        mean += u / 1000.0;
    }
    CHECK(std::abs(mean) < 0.1);
}

TEST_CASE("clocking must place nodes on the integration grid") {
    ReservoirClocking c = make_clocking(10, 22.0, 1);
    CHECK(c.clock_cycle == doctest::Approx(220.0));
    CHECK(c.steps_per_node(0.01) == 2200);
    CHECK_NOTHROW(c.validate(0.01));
    c.clock_cycle = 220.005;
    CHECK_THROWS_AS(c.validate(0.01), std::invalid_argument);
    c = make_clocking(10, 22.0, 1);
    c.mask[0] = 1.5;
    CHECK_THROWS_AS(c.validate(0.01), std::invalid_argument);
}

TEST_CASE("least-squares readout equals the pseudoinverse solution") {
    Eigen::MatrixXd s = random_matrix(60, 6, 1);
    s.col(5) = s.col(0) + s.col(1);  // rank deficient
    const Eigen::VectorXd y = random_matrix(60, 1, 2).col(0);
    const ReadoutWeights w = train_readout(s, view(y), 0.0, false);
    const Eigen::VectorXd oracle = s.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    CHECK((w.weights - oracle).norm() < 1e-10);
}

TEST_CASE("ridge readout matches the normal-equation closed form") {
    const Eigen::MatrixXd s = random_matrix(80, 5, 3);
    const Eigen::VectorXd y = random_matrix(80, 1, 4).col(0);
    const double lambda = 0.7;
    const ReadoutWeights w = train_readout(s, view(y), lambda, false);
    const Eigen::MatrixXd a = s.transpose() * s + lambda * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::VectorXd oracle = a.inverse() * (s.transpose() * y);
    CHECK((w.weights - oracle).norm() < 1e-10);
}

TEST_CASE("readout with bias recovers an affine target exactly") {
    const Eigen::MatrixXd s = random_matrix(40, 3, 5);
    Eigen::VectorXd y = 2.0 * s.col(0) - 0.5 * s.col(2);
    y.array() += 3.0;
    const ReadoutWeights w = train_readout(s, view(y), 0.0, true);
    CHECK(w.has_bias);
    CHECK(w.bias == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(w.weights(0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(w.weights(1)) < 1e-10);
    const Eigen::VectorXd fit = w.predict(s);
    CHECK(nrmse(view(fit), view(y)) < 1e-10);
}

TEST_CASE("nrmse of simple cases") {
    const std::vector<double> target{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> same = target;
    CHECK(nrmse(same, target) == 0.0);
    const std::vector<double> mean(4, 2.5);
    CHECK(nrmse(mean, target) == doctest::Approx(1.0));
    const std::vector<double> flat(4, 1.0);
    CHECK_THROWS_AS((void)nrmse(same, flat), std::invalid_argument);
    const std::vector<double> short_pred{1.0};
    CHECK_THROWS_AS((void)nrmse(short_pred, target), std::invalid_argument);
}

TEST_CASE("state matrix CSV round trip is exact") {
    StateMatrix m;
    m.values = random_matrix(7, 3, 9);
    m.values(0, 0) = 1.0 / 3.0;
    m.input_offset = 42;
    m.mask_seed = 1;
    m.input_seed = 2;
    m.noise_seed = 18446744073709551615ull;
    std::stringstream buf;
    write_state_matrix_csv(buf, m);
    const StateMatrix back = read_state_matrix_csv(buf);
    CHECK(back.values == m.values);
    CHECK(back.input_offset == 42);
    CHECK(back.noise_seed == m.noise_seed);
    CHECK(back.centered == false);

    const StateMatrix c = m.centered_copy();
    CHECK(c.centered);
    CHECK(c.values.colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
    CHECK((c.column_means - m.values.colwise().mean().transpose()).norm() < 1e-14);
}

TEST_CASE("harvest produces one row per retained input") {
    LaserParams p;
    p.tau = 20.0;
    const ReservoirClocking c = make_clocking(4, 5.0, 3);
    const InputSequence in = make_inputs(30, -1.0, 1.0, 4);
    const StateMatrix s = harvest(p, c, in, 5, HarvestOptions{100.0, 10});
    CHECK(s.rows() == 20);
    CHECK(s.cols() == 4);
    CHECK(s.input_offset == 10);
    CHECK(s.mask_seed == 3);
    CHECK(s.values.allFinite());
    CHECK(s.values.minCoeff() > 0.0);
    const StateMatrix again = harvest(p, c, in, 5, HarvestOptions{100.0, 10});
    CHECK(again.values == s.values);
    CHECK_THROWS_AS((void)harvest(p, c, in, 5, HarvestOptions{100.0, 30}), std::invalid_argument);
}
