#include "pvfdi/models/gpr.hpp"

#include <array>
#include <cmath>

#include "pvfdi/error.hpp"
#include "pvfdi/rng.hpp"

namespace pvfdi {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double length_scale) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-sq / (2.0 * length_scale * length_scale));
}

double GprModel::predict(std::span<const double> x) const {
    const auto cols = static_cast<std::size_t>(inputs.cols());
    double mean = 0.0;
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        mean += rbf_kernel({inputs.row(i).data(), cols}, x, length_scale) * alpha(i);
    }
    return mean;
}

GprModel fit_gpr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GprParams& params, std::uint64_t seed) {
    GprModel model;
    model.length_scale = params.length_scale;
    model.noise_variance = params.noise_variance;

    Eigen::VectorXd targets;
    const auto n = static_cast<std::size_t>(x.rows());
    if (n > params.subset_cap) {
        Rng rng(derive_seed(seed, "gpr-subset"));
        const auto rows = rng.sample_indices(n, params.subset_cap);
        model.inputs.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
        targets.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            model.inputs.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
            targets(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
        }
    } else {
        model.inputs = x;
        targets = y;
    }

    const Eigen::Index m = model.inputs.rows();
    const auto cols = static_cast<std::size_t>(model.inputs.cols());
    Eigen::MatrixXd k(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = rbf_kernel({model.inputs.row(i).data(), cols}, {model.inputs.row(j).data(), cols},
                                        params.length_scale);
            k(i, j) = v;
            k(j, i) = v;
        }
    }

    constexpr std::array<double, 6> kJitterLadder{0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
    for (const double jitter : kJitterLadder) {
        Eigen::MatrixXd a = k;
        a.diagonal().array() += params.noise_variance + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            model.jitter = jitter;
            model.alpha = llt.solve(targets);
            return model;
        }
    }
    throw NotPositiveDefinite("GPR kernel matrix is not positive definite even with jitter 1e-6");
}

} // namespace pvfdi
