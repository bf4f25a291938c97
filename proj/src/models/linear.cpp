#include "pvfdi/models/linear.hpp"

namespace pvfdi {

double LinearModel::predict(std::span<const double> x) const {
    double y = bias;
    for (std::size_t j = 0; j < x.size(); ++j) {
        y += coefficients(static_cast<Eigen::Index>(j)) * x[j];
    }
    return y;
}

LinearModel fit_lr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    LinearModel model;
    model.coefficients = xc.completeOrthogonalDecomposition().solve(yc);
    model.bias = y_mean - x_mean.dot(model.coefficients);
    return model;
}

} // namespace pvfdi
