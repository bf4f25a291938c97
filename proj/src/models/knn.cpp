#include "pvfdi/models/knn.hpp"

#include <algorithm>
#include <numeric>

#include "pvfdi/error.hpp"

namespace pvfdi {

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> x) const {
    const auto n = static_cast<std::size_t>(inputs.rows());
    const auto d = static_cast<std::size_t>(inputs.cols());
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = inputs.row(static_cast<Eigen::Index>(i)).data();
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = row[j] - x[j];
            sq += diff * diff;
        }
        dist[i] = {sq, i};
    }
    // Lexicographic pair order breaks distance ties by lower index.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = dist[i].second;
    }
    return out;
}

double KnnModel::predict(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto i : neighbors(x)) {
        sum += targets(static_cast<Eigen::Index>(i));
    }
    return sum / static_cast<double>(k);
}

KnnModel fit_knn(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t k) {
    if (k == 0) {
        throw InvalidSpec("KNN: k must be >= 1");
    }
    if (k > static_cast<std::size_t>(x.rows())) {
        throw KTooLarge(k, static_cast<std::size_t>(x.rows()));
    }
    return KnnModel{k, x, y};
}

} // namespace pvfdi
