#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pvfdi/error.hpp"
#include "pvfdi/models/gpr.hpp"
#include "pvfdi/models/knn.hpp"
#include "support.hpp"

using namespace pvfdi;
using testutil::to_eigen;

namespace {

double predict_at(const auto& model, const oracle::Vec& q) {
    return model.predict(std::span<const double>(q));
}

GprParams gp(double length, double noise, std::size_t cap = 2000) {
    GprParams p;
    p.length_scale = length;
    p.noise_variance = noise;
    p.subset_cap = cap;
    return p;
}

} // namespace

TEST_CASE("GPR: single training pair") {
    const double noise = 0.25;
    const auto m = fit_gpr(to_eigen(oracle::Mat{{0.3, 0.6}}), to_eigen(oracle::Vec{0.8}), gp(1.0, noise), 1);
    CHECK(predict_at(m, {0.3, 0.6}) == Catch::Approx(0.8 / (1.0 + noise)).epsilon(1e-14));
}

TEST_CASE("GPR: far from the data the prior mean 0 is returned") {
    std::mt19937_64 rng(1);
    const auto x = oracle::random_matrix(rng, 20, 3, 0.0, 1.0);
    const auto y = oracle::random_vector(rng, 20, 0.0, 1.0);
    const auto m = fit_gpr(to_eigen(x), to_eigen(y), gp(0.5, 0.01), 1);
    CHECK(std::fabs(predict_at(m, {50.0, -40.0, 30.0})) < 1e-6);
}

TEST_CASE("GPR: matches dense inversion") {
    std::mt19937_64 rng(2);
    for (std::size_t n : {5u, 20u, 60u}) {
        const auto x = oracle::random_matrix(rng, n, 4, 0.0, 1.0);
        const auto y = oracle::random_vector(rng, n, 0.0, 1.0);
        const auto queries = oracle::random_matrix(rng, 10, 4, -0.2, 1.2);
        const auto want = oracle::gpr_predict(x, y, 0.7, 0.05, queries);
        const auto m = fit_gpr(to_eigen(x), to_eigen(y), gp(0.7, 0.05), 3);
        CHECK(m.jitter == 0.0);
        for (std::size_t q = 0; q < queries.size(); ++q) {
            CHECK(oracle::rel_err(predict_at(m, queries[q]), want[q]) < 1e-8);
        }
    }
}

TEST_CASE("GPR: tiny noise interpolates the training targets") {
    std::mt19937_64 rng(3);
    for (std::size_t n : {5u, 12u, 20u}) {
        const auto x = oracle::random_matrix(rng, n, 3, 0.0, 1.0);
        const auto y = oracle::random_vector(rng, n, 0.0, 1.0);
        const auto m = fit_gpr(to_eigen(x), to_eigen(y), gp(0.2, 1e-10), 1);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::fabs(predict_at(m, x[i]) - y[i]) < 1e-4);
        }
    }
}

TEST_CASE("GPR: jitter ladder and failure") {
    // Duplicate inputs with zero noise give a singular kernel matrix.
    const auto x = to_eigen(oracle::Mat{{0.1}, {0.1}, {0.9}});
    const auto y = to_eigen(oracle::Vec{0.2, 0.2, 0.7});
    const auto m = fit_gpr(x, y, gp(1.0, 0.0), 1);
    CHECK(m.jitter > 0.0);
    CHECK(m.jitter <= 1e-6);
    CHECK_THROWS_AS(fit_gpr(x, y, gp(1.0, -1.0), 1), NotPositiveDefinite);
}

TEST_CASE("GPR: subset cap draws a seeded subsample") {
    std::mt19937_64 rng(4);
    const auto x = to_eigen(oracle::random_matrix(rng, 100, 2, 0.0, 1.0));
    const auto y = to_eigen(oracle::random_vector(rng, 100, 0.0, 1.0));
    const auto a = fit_gpr(x, y, gp(1.0, 0.01, 30), 5);
    const auto b = fit_gpr(x, y, gp(1.0, 0.01, 30), 5);
    const auto c = fit_gpr(x, y, gp(1.0, 0.01, 30), 6);
    CHECK(a.inputs.rows() == 30);
    CHECK(a.inputs == b.inputs);
    CHECK(a.alpha == b.alpha);
    CHECK(a.inputs != c.inputs);
    CHECK(fit_gpr(x, y, gp(1.0, 0.01, 100), 5).inputs.rows() == 100);
}

TEST_CASE("KNN: k=2 on a line") {
    const auto m = fit_knn(to_eigen(oracle::Mat{{0}, {1}, {2}}), to_eigen(oracle::Vec{0, 1, 2}), 2);
    CHECK(predict_at(m, {0.0}) == 0.5);
}

TEST_CASE("KNN: k=n returns the training mean") {
    std::mt19937_64 rng(5);
    const auto x = oracle::random_matrix(rng, 9, 3);
    const auto y = oracle::random_vector(rng, 9);
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= 9.0;
    const auto m = fit_knn(to_eigen(x), to_eigen(y), 9);
    CHECK(predict_at(m, {0.1, 0.2, 0.3}) == Catch::Approx(mean).epsilon(1e-14));
    CHECK(predict_at(m, {9.0, -9.0, 0.0}) == Catch::Approx(mean).epsilon(1e-14));
}

TEST_CASE("KNN: duplicated training point") {
    const auto m = fit_knn(to_eigen(oracle::Mat{{0.5, 0.5}, {0.5, 0.5}, {3, 3}}), to_eigen(oracle::Vec{0.4, 0.4, 9}), 2);
    CHECK(predict_at(m, {0.5, 0.5}) == 0.4);
}

TEST_CASE("KNN: distance ties go to the lower index") {
    // Query 1.0 is equidistant from 0 and 2.
    const auto m = fit_knn(to_eigen(oracle::Mat{{2}, {0}, {5}}), to_eigen(oracle::Vec{20, 0, 50}), 1);
    CHECK(m.neighbors(std::vector<double>{1.0}) == std::vector<std::size_t>{0});
    const auto m2 = fit_knn(to_eigen(oracle::Mat{{0}, {2}, {5}}), to_eigen(oracle::Vec{0, 20, 50}), 1);
    CHECK(m2.neighbors(std::vector<double>{1.0}) == std::vector<std::size_t>{0});
}

TEST_CASE("KNN: errors") {
    const auto x = to_eigen(oracle::Mat{{0}, {1}});
    const auto y = to_eigen(oracle::Vec{0, 1});
    CHECK_THROWS_AS(fit_knn(x, y, 3), KTooLarge);
    CHECK_THROWS_AS(fit_knn(x, y, 0), InvalidSpec);
}

TEST_CASE("KNN: k=1 at a unique training input returns its own target") {
    std::mt19937_64 rng(6);
    const auto x = oracle::random_matrix(rng, 50, 4);
    const auto y = oracle::random_vector(rng, 50);
    const auto m = fit_knn(to_eigen(x), to_eigen(y), 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(predict_at(m, x[i]) == y[i]);
    }
}

TEST_CASE("KNN: matches an exhaustive distance scan exactly") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 30; ++t) {
        // Coarse grid values force plenty of distance ties.
        auto x = oracle::random_matrix(rng, 40, 3, 0.0, 4.0);
        for (auto& row : x) {
            for (auto& v : row) {
                v = std::floor(v);
            }
        }
        const auto y = oracle::random_vector(rng, 40);
        const std::size_t k = 1 + static_cast<std::size_t>(t % 7);
        const auto m = fit_knn(to_eigen(x), to_eigen(y), k);
        for (const auto& q : oracle::random_matrix(rng, 20, 3, 0.0, 4.0)) {
            oracle::Vec qq = q;
            for (auto& v : qq) {
                v = std::floor(v) + 0.5 * (t % 2);
            }
            CHECK(predict_at(m, qq) == oracle::knn_predict(x, y, k, qq));
        }
    }
}
