#include "pvfdi/models/gbrt.hpp"

#include <array>

namespace pvfdi {

double GbrtModel::predict(std::span<const double> x) const {
    double y = base_score;
    for (const auto& tree : trees) {
        y += learning_rate * tree.predict(x);
    }
    return y;
}

namespace {

double half_mse(const Eigen::VectorXd& y, const std::vector<double>& pred) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double e = y(i) - pred[static_cast<std::size_t>(i)];
        sum += e * e;
    }
    return sum / (2.0 * static_cast<double>(y.size()));
}

} // namespace

GbrtModel fit_gbrt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GbrtParams& params) {
    const auto n = static_cast<std::size_t>(y.size());
    GbrtModel model;
    model.base_score = y.mean();
    model.learning_rate = params.learning_rate;

    GrowParams grow;
    grow.max_depth = params.max_depth;
    grow.min_samples_leaf = 1;
    grow.min_child_weight = params.min_child_weight;
    grow.lambda = params.lambda;
    grow.gamma = params.gamma;

    const FeatureOrder order = FeatureOrder::of(x);
    const RowMatrix rows = x;
    const auto d = static_cast<std::size_t>(x.cols());
    std::vector<double> pred(n, model.base_score);
    std::vector<double> grad(n);
    const std::vector<double> hess(n, 1.0);
    model.training_loss.push_back(half_mse(y, pred));

    for (int round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = pred[i] - y(static_cast<Eigen::Index>(i));
        }
        RegressionTree tree = grow_tree(x, order, grad, hess, grow);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] += params.learning_rate * tree.predict({rows.row(static_cast<Eigen::Index>(i)).data(), d});
        }
        model.trees.push_back(std::move(tree));
        model.training_loss.push_back(half_mse(y, pred));
    }
    return model;
}

} // namespace pvfdi
