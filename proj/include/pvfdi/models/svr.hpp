#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

/// f(x) = sum_i coefficients[i] k(sv_i, x) + bias, coefficients = alpha_i - alpha_i*.
struct SvrModel {
    SvrKernel kernel = SvrKernel::Rbf;
    double gamma = 1.0 / 12.0;
    RowMatrix support_vectors;
    Eigen::VectorXd coefficients;
    double bias = 0.0;
    bool converged = true;
    std::size_t iterations = 0;
    /// Final maximal KKT violation (m(alpha) - M(alpha) in the working-set sense).
    double kkt_violation = 0.0;
    /// Dual objective (maximisation form) at the start and after every SMO step, if requested.
    std::vector<double> objective_history;

    double predict(std::span<const double> x) const;
};

double svr_kernel(SvrKernel kernel, double gamma, std::span<const double> a, std::span<const double> b);

/// Full dual solution over all training points, before support-vector extraction.
struct SvrDualSolution {
    Eigen::VectorXd alpha;      // alpha_i, upper tube side
    Eigen::VectorXd alpha_star; // alpha_i*, lower tube side
    double bias = 0.0;
    bool converged = true;
    std::size_t iterations = 0;
    double kkt_violation = 0.0;
    std::vector<double> objective_history;
};

/**
 * epsilon-SVR dual solved by SMO over the 2n variables (alpha, alpha*), with
 * second-order working-set selection. Stops when the maximal KKT violation
 * drops below params.tolerance or after params.max_iterations steps (then
 * converged == false and the last iterate is kept).
 */
SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrParams& params);

SvrModel fit_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrParams& params);

/// -1/2 beta^T K beta - eps sum (alpha + alpha*) + y^T beta, with beta = alpha - alpha*.
double svr_dual_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrParams& params,
                          const Eigen::VectorXd& alpha, const Eigen::VectorXd& alpha_star);

} // namespace pvfdi
