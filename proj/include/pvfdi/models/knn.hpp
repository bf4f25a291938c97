#pragma once

#include <span>
#include <vector>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

/// Brute-force Euclidean k-NN regressor. Distance ties go to the lower training index.
struct KnnModel {
    std::size_t k = 2;
    RowMatrix inputs;
    Eigen::VectorXd targets;

    /// Training indices of the k nearest neighbours, nearest first.
    std::vector<std::size_t> neighbors(std::span<const double> x) const;
    double predict(std::span<const double> x) const;
};

KnnModel fit_knn(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t k);

} // namespace pvfdi
