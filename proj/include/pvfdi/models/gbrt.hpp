#pragma once

#include <span>
#include <vector>

#include "pvfdi/models/tree.hpp"

namespace pvfdi {

/// Second-order boosted trees on squared loss.
struct GbrtModel {
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;
    /// Training loss (1/2n) sum (y - y')^2 before the first round and after each round.
    std::vector<double> training_loss;

    double predict(std::span<const double> x) const;
};

inline double leaf_weight(double grad_sum, double hess_sum, double lambda) {
    return -grad_sum / (hess_sum + lambda);
}

GbrtModel fit_gbrt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GbrtParams& params);

} // namespace pvfdi
