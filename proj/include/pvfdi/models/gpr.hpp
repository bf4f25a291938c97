#pragma once

#include <cstdint>
#include <span>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

/// Zero-mean GP with unit-variance RBF kernel; only the posterior mean is exposed.
struct GprModel {
    double length_scale = 1.0;
    double noise_variance = 0.01;
    /// Diagonal increment beyond noise_variance that made the kernel factorizable.
    double jitter = 0.0;
    RowMatrix inputs;
    Eigen::VectorXd alpha;

    double predict(std::span<const double> x) const;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double length_scale);

/**
 * alpha = (K + noise_variance I)^-1 y by Cholesky. When n exceeds
 * params.subset_cap a uniform seeded subsample of that size is used. If the
 * factorization fails, jitter 1e-10, 1e-9, ..., 1e-6 is tried in turn before
 * NotPositiveDefinite is thrown.
 */
GprModel fit_gpr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GprParams& params, std::uint64_t seed);

} // namespace pvfdi
