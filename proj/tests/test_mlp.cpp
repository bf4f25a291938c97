#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pvfdi/error.hpp"
#include "pvfdi/models/mlp.hpp"
#include "support.hpp"

using namespace pvfdi;
using testutil::to_eigen;

namespace {

struct Batch {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Batch random_batch(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    const auto x = oracle::random_matrix(rng, n, d, 0.0, 1.0);
    oracle::Vec y;
    for (const auto& row : x) {
        y.push_back(0.5 * row[0] - 0.2 * row[1] + 0.1);
    }
    return {to_eigen(x), to_eigen(y)};
}

/// Central differences over every parameter, in the order w1, b1, w2, b2.
std::vector<double> numeric_gradient(MlpModel m, const Batch& b, double h) {
    std::vector<double> out;
    auto probe = [&](double& p) {
        const double keep = p;
        p = keep + h;
        const double up = mlp_loss(m, b.x, b.y);
        p = keep - h;
        const double down = mlp_loss(m, b.x, b.y);
        p = keep;
        out.push_back((up - down) / (2.0 * h));
    };
    for (Eigen::Index i = 0; i < m.w1.size(); ++i) {
        probe(m.w1.data()[i]);
    }
    for (Eigen::Index i = 0; i < m.b1.size(); ++i) {
        probe(m.b1(i));
    }
    for (Eigen::Index i = 0; i < m.w2.size(); ++i) {
        probe(m.w2(i));
    }
    probe(m.b2);
    return out;
}

std::vector<double> flatten(const MlpGradient& g) {
    std::vector<double> out(g.w1.data(), g.w1.data() + g.w1.size());
    out.insert(out.end(), g.b1.data(), g.b1.data() + g.b1.size());
    out.insert(out.end(), g.w2.data(), g.w2.data() + g.w2.size());
    out.push_back(g.b2);
    return out;
}

} // namespace

TEST_CASE("MLP: zero weights predict the output bias") {
    auto m = init_mlp(12, 100, 1);
    m.w1.setZero();
    m.w2.setZero();
    m.b2 = 0.42;
    std::mt19937_64 rng(1);
    for (const auto& x : oracle::random_matrix(rng, 5, 12)) {
        CHECK(m.predict(x) == 0.42);
    }
}

TEST_CASE("MLP: He-uniform initialisation") {
    const auto m = init_mlp(12, 100, 3);
    CHECK(m.w1.rows() == 100);
    CHECK(m.w1.cols() == 12);
    CHECK(m.w1.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 12.0));
    CHECK(m.w2.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 100.0));
    CHECK(m.b1.isZero(0.0));
    CHECK(m.b2 == 0.0);
    CHECK(init_mlp(12, 100, 3).w1 == m.w1);
    CHECK(init_mlp(12, 100, 4).w1 != m.w1);
}

TEST_CASE("MLP: analytic gradient matches central differences") {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        auto m = init_mlp(12, 5, seed);
        m.b1 = to_eigen(oracle::random_vector(rng, 5, -0.1, 0.1));
        m.b2 = 0.05;
        const auto batch = random_batch(rng, 16, 12);
        const auto analytic = flatten(mlp_gradient(m, batch.x, batch.y));
        const auto numeric = numeric_gradient(m, batch, 1e-5);
        REQUIRE(analytic.size() == numeric.size());
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double scale = std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-6});
            worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / scale);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("MLP: gradient carries the matching loss") {
    std::mt19937_64 rng(2);
    const auto m = init_mlp(12, 8, 2);
    const auto b = random_batch(rng, 30, 12);
    CHECK(mlp_gradient(m, b.x, b.y).loss == Catch::Approx(mlp_loss(m, b.x, b.y)).epsilon(1e-14));
}

TEST_CASE("MLP: one small Adam step lowers the batch loss") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed + 100);
        auto m = init_mlp(12, 100, seed);
        const auto b = random_batch(rng, 64, 12);
        MlpParams p;
        p.learning_rate = 1e-5;
        AdamState adam(m, p);
        const double before = mlp_loss(m, b.x, b.y);
        adam.step(m, mlp_gradient(m, b.x, b.y));
        CHECK(mlp_loss(m, b.x, b.y) < before);
    }
}

TEST_CASE("MLP: constant targets are learned") {
    std::mt19937_64 rng(3);
    const auto x = to_eigen(oracle::random_matrix(rng, 200, 12, 0.0, 1.0));
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(200, 0.6);
    MlpParams p;
    p.learning_rate = 1e-2;
    const auto m = fit_mlp(x, y, p, 5);
    const Eigen::VectorXd pred = m.predict(x);
    const double rmse = std::sqrt((pred - y).squaredNorm() / 200.0);
    CHECK(rmse < 1e-2);
    CHECK(m.loss_history.size() <= 500);
}

TEST_CASE("MLP: training is deterministic per seed") {
    std::mt19937_64 rng(4);
    const auto b = random_batch(rng, 100, 12);
    MlpParams p;
    p.max_epochs = 50;
    const auto a = fit_mlp(b.x, b.y, p, 9);
    const auto c = fit_mlp(b.x, b.y, p, 9);
    CHECK(a.w1 == c.w1);
    CHECK(a.loss_history == c.loss_history);
    p.batch_size = 16;
    const auto d = fit_mlp(b.x, b.y, p, 9);
    const auto e = fit_mlp(b.x, b.y, p, 9);
    CHECK(d.w1 == e.w1);
    CHECK(d.w1 != a.w1);
}

TEST_CASE("MLP: early stopping ends a stalled run") {
    std::mt19937_64 rng(5);
    const auto b = random_batch(rng, 50, 12);
    MlpParams p;
    p.learning_rate = 1e-12; // loss barely moves
    const auto m = fit_mlp(b.x, b.y, p, 1);
    CHECK(m.loss_history.size() == static_cast<std::size_t>(p.n_iter_no_change) + 1);
}

TEST_CASE("MLP: divergence raises NonFiniteLoss") {
    std::mt19937_64 rng(6);
    const auto b = random_batch(rng, 20, 12);
    const Eigen::VectorXd huge = Eigen::VectorXd::Constant(20, 1e200);
    CHECK_THROWS_AS(fit_mlp(b.x, huge, MlpParams{}, 1), NonFiniteLoss);
}
