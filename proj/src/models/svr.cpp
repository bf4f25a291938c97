#include "pvfdi/models/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>


namespace pvfdi {

double svr_kernel(SvrKernel kernel, double gamma, std::span<const double> a, std::span<const double> b) {
    if (kernel == SvrKernel::Linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
        }
        return dot;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

double SvrModel::predict(std::span<const double> x) const {
    const auto d = static_cast<std::size_t>(support_vectors.cols());
    double f = bias;
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
        f += coefficients(i) * svr_kernel(kernel, gamma, {support_vectors.row(i).data(), d}, x);
    }
    return f;
}

namespace {

/// LRU cache of kernel rows K(i, .) over the n training samples.
class KernelRows {
public:
    KernelRows(const RowMatrix& x, const SvrParams& params)
        : x_(x), params_(params), n_(static_cast<std::size_t>(x.rows())),
          capacity_(std::max<std::size_t>(2, params.cache_mb * (std::size_t{1} << 20) / (n_ * sizeof(double) + 1))) {}

    const std::vector<double>& row(std::size_t i) {
        if (const auto it = index_.find(i); it != index_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second);
            return it->second->second;
        }
        std::vector<double> values;
        if (lru_.size() >= capacity_) {
            values = std::move(lru_.back().second);
            index_.erase(lru_.back().first);
            lru_.pop_back();
        }
        values.resize(n_);
        const auto d = static_cast<std::size_t>(x_.cols());
        const std::span<const double> xi(x_.row(static_cast<Eigen::Index>(i)).data(), d);
        for (std::size_t j = 0; j < n_; ++j) {
            values[j] = svr_kernel(params_.kernel, params_.gamma, xi, {x_.row(static_cast<Eigen::Index>(j)).data(), d});
        }
        lru_.emplace_front(i, std::move(values));
        index_[i] = lru_.begin();
        return lru_.front().second;
    }

    double diagonal(std::size_t i) const {
        const auto d = static_cast<std::size_t>(x_.cols());
        const std::span<const double> xi(x_.row(static_cast<Eigen::Index>(i)).data(), d);
        return svr_kernel(params_.kernel, params_.gamma, xi, xi);
    }

private:
    using Entry = std::pair<std::size_t, std::vector<double>>;
    const RowMatrix& x_;
    const SvrParams& params_;
    std::size_t n_;
    std::size_t capacity_;
    std::list<Entry> lru_;
    std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

constexpr double kTau = 1e-12;

} // namespace

double svr_dual_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrParams& params,
                          const Eigen::VectorXd& alpha, const Eigen::VectorXd& alpha_star) {
    const RowMatrix rows = x;
    const auto d = static_cast<std::size_t>(x.cols());
    const Eigen::VectorXd beta = alpha - alpha_star;
    double quad = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.rows(); ++j) {
            quad += beta(i) * beta(j) *
                    svr_kernel(params.kernel, params.gamma, {rows.row(i).data(), d}, {rows.row(j).data(), d});
        }
    }
    return -0.5 * quad - params.epsilon * (alpha.sum() + alpha_star.sum()) + y.dot(beta);
}

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrParams& params) {
    // Variables t < n are alpha_t (sign +1), t >= n are alpha*_{t-n} (sign -1).
    // Minimises 1/2 a^T Q a + p^T a subject to sum sign_t a_t = 0, 0 <= a_t <= C,
    // where Q_ts = sign_t sign_s K(t mod n, s mod n).
    const RowMatrix rows = x;
    const std::size_t n = static_cast<std::size_t>(x.rows());
    const std::size_t m = 2 * n;
    const double c = params.c;
    KernelRows kernel(rows, params);

    std::vector<double> a(m, 0.0);
    std::vector<double> grad(m);
    std::vector<double> p(m);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y(static_cast<Eigen::Index>(i));
        p[i] = params.epsilon - yi;
        p[i + n] = params.epsilon + yi;
        diag[i] = kernel.diagonal(i);
    }
    grad = p;
    auto sign = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
    auto at_upper = [&](std::size_t t) { return a[t] >= c; };
    auto at_lower = [&](std::size_t t) { return a[t] <= 0.0; };
    auto objective = [&] {
        double f = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            f += a[t] * (grad[t] + p[t]);
        }
        return -0.5 * f;
    };

    SvrDualSolution out;
    out.converged = false;
    if (params.record_objective) {
        out.objective_history.push_back(objective());
    }

    while (true) {
        // Second-order working-set selection.
        double g_max = -std::numeric_limits<double>::infinity();
        std::size_t i = m;
        for (std::size_t t = 0; t < m; ++t) {
            const double v = sign(t) > 0 ? (at_upper(t) ? -std::numeric_limits<double>::infinity() : -grad[t])
                                         : (at_lower(t) ? -std::numeric_limits<double>::infinity() : grad[t]);
            if (v > g_max) {
                g_max = v;
                i = t;
            }
        }
        double g_max2 = -std::numeric_limits<double>::infinity();
        std::size_t j = m;
        if (i < m) {
            const auto& ki = kernel.row(i % n);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < m; ++t) {
                double grad_diff;
                if (sign(t) > 0) {
                    if (at_lower(t)) {
                        continue;
                    }
                    g_max2 = std::max(g_max2, grad[t]);
                    grad_diff = g_max + grad[t];
                } else {
                    if (at_upper(t)) {
                        continue;
                    }
                    g_max2 = std::max(g_max2, -grad[t]);
                    grad_diff = g_max - grad[t];
                }
                if (grad_diff > 0.0) {
                    double quad = diag[i % n] + diag[t % n] - 2.0 * ki[t % n];
                    if (quad <= 0.0) {
                        quad = kTau;
                    }
                    const double obj_diff = -(grad_diff * grad_diff) / quad;
                    if (obj_diff < best) {
                        best = obj_diff;
                        j = t;
                    }
                }
            }
        }
        out.kkt_violation = std::max(0.0, g_max + g_max2);
        if (i == m || j == m || g_max + g_max2 < params.tolerance) {
            out.converged = true;
            break;
        }
        if (out.iterations >= params.max_iterations) {
            break;
        }
        ++out.iterations;

        const std::vector<double> ki = kernel.row(i % n);
        const std::vector<double>& kj = kernel.row(j % n);
        const double qij = sign(i) * sign(j) * ki[j % n];
        const double old_ai = a[i];
        const double old_aj = a[j];
        if (sign(i) != sign(j)) {
            double quad = diag[i % n] + diag[j % n] + 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if (diff > 0.0) {
                if (a[i] > c) {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if (a[j] > c) {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            double quad = diag[i % n] + diag[j % n] - 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > c) {
                if (a[i] > c) {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if (a[j] < 0.0) {
                a[j] = 0.0;
                a[i] = sum;
            }
            if (sum > c) {
                if (a[j] > c) {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = sum;
            }
        }

        const double dai = (a[i] - old_ai) * sign(i);
        const double daj = (a[j] - old_aj) * sign(j);
        for (std::size_t t = 0; t < m; ++t) {
            // Q_ti * delta_i = sign_t * sign_i * K * delta_i
            grad[t] += sign(t) * (ki[t % n] * dai + kj[t % n] * daj);
        }
        if (params.record_objective) {
            out.objective_history.push_back(objective());
        }
    }

    // Bias from free variables, else the midpoint of the feasible interval.
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double yg = sign(t) * grad[t];
        if (at_upper(t)) {
            if (sign(t) < 0) {
                upper = std::min(upper, yg);
            } else {
                lower = std::max(lower, yg);
            }
        } else if (at_lower(t)) {
            if (sign(t) > 0) {
                upper = std::min(upper, yg);
            } else {
                lower = std::max(lower, yg);
            }
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;
    out.bias = -rho;
    out.alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(n));
    out.alpha_star = Eigen::Map<const Eigen::VectorXd>(a.data() + n, static_cast<Eigen::Index>(n));
    return out;
}

SvrModel fit_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrParams& params) {
    SvrDualSolution dual = solve_svr_dual(x, y, params);
    SvrModel model;
    model.kernel = params.kernel;
    model.gamma = params.gamma;
    model.bias = dual.bias;
    model.converged = dual.converged;
    model.iterations = dual.iterations;
    model.kkt_violation = dual.kkt_violation;
    model.objective_history = std::move(dual.objective_history);

    const Eigen::VectorXd beta = dual.alpha - dual.alpha_star;
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        if (beta(i) != 0.0) {
            support.push_back(i);
        }
    }
    model.support_vectors.resize(static_cast<Eigen::Index>(support.size()), x.cols());
    model.coefficients.resize(static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
        model.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(support[s]);
        model.coefficients(static_cast<Eigen::Index>(s)) = beta(support[s]);
    }
    return model;
}

} // namespace pvfdi
