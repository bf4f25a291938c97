#pragma once

#include <span>
#include <vector>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

/// y' = bias + sum_j coefficients[j] * x[j]; fitted form of LR and LASSO.
struct LinearModel {
    Eigen::VectorXd coefficients;
    double bias = 0.0;
    /// Lasso objective after each coordinate sweep (empty for OLS).
    std::vector<double> objective_history;

    double predict(std::span<const double> x) const;
};

/**
 * Ordinary least squares with an unpenalized intercept.
 *
 * Features and targets are centered, the centered system is solved with a
 * complete orthogonal decomposition (column-pivoted QR followed by an RQ step),
 * which yields the minimum-norm solution when the design is rank deficient.
 */
LinearModel fit_lr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Cyclic coordinate descent on (1/2n)||y - X theta - b||^2 + lambda ||theta||_1.
LinearModel fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoParams& params);

/// Smallest lambda at which every lasso coefficient is zero: max_j |x_j^T (y - mean y)| / n.
double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// (1/2n)||y - X theta - b||^2 + lambda ||theta||_1
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LinearModel& model, double lambda);

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) {
        return z - gamma;
    }
    if (z < -gamma) {
        return z + gamma;
    }
    return 0.0;
}

} // namespace pvfdi
