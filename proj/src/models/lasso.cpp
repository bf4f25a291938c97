#include <cmath>

#include "pvfdi/models/linear.hpp"

namespace pvfdi {

double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    return (xc.transpose() * yc).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LinearModel& model,
                       double lambda) {
    const Eigen::VectorXd r = (y - x * model.coefficients).array() - model.bias;
    return r.squaredNorm() / (2.0 * static_cast<double>(x.rows())) + lambda * model.coefficients.lpNorm<1>();
}

LinearModel fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoParams& params) {
    const auto n = static_cast<double>(x.rows());
    const Eigen::Index d = x.cols();
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd col_scale = xc.colwise().squaredNorm().transpose() / n;

    // The bias is profiled out by centering, so each coordinate update is an
    // exact minimisation of the full objective.
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd residual = y.array() - y_mean;

    LinearModel model;
    for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (col_scale(j) <= 0.0) {
                continue;
            }
            const double old = theta(j);
            const double z = xc.col(j).dot(residual) / n + col_scale(j) * old;
            const double updated = soft_threshold(z, params.lambda) / col_scale(j);
            if (updated != old) {
                residual -= (updated - old) * xc.col(j);
                theta(j) = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        model.objective_history.push_back(residual.squaredNorm() / (2.0 * n) + params.lambda * theta.lpNorm<1>());
        if (max_change < params.tolerance) {
            break;
        }
    }
    model.coefficients = theta;
    model.bias = y_mean - x_mean.dot(theta);
    return model;
}

} // namespace pvfdi
