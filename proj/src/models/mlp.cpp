#include "pvfdi/models/mlp.hpp"

#include <cmath>
#include <limits>

#include "pvfdi/error.hpp"
#include "pvfdi/rng.hpp"

namespace pvfdi {

double MlpModel::predict(std::span<const double> x) const {
    const Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd hidden = (w1 * in + b1).cwiseMax(0.0);
    return hidden.dot(w2) + b2;
}

Eigen::VectorXd MlpModel::predict(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd hidden = ((x * w1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
    return (hidden * w2).array() + b2;
}

double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    return (m.predict(x) - y).squaredNorm() / (2.0 * static_cast<double>(x.rows()));
}

MlpGradient mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd pre = (x * m.w1.transpose()).rowwise() + m.b1.transpose();
    const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
    const Eigen::VectorXd out = (hidden * m.w2).array() + m.b2;
    const Eigen::VectorXd d_out = (out - y) / static_cast<double>(x.rows());

    MlpGradient g;
    g.loss = (out - y).squaredNorm() / (2.0 * static_cast<double>(x.rows()));
    g.w2 = hidden.transpose() * d_out;
    g.b2 = d_out.sum();
    const Eigen::MatrixXd d_pre = ((d_out * m.w2.transpose()).array() * (pre.array() > 0.0).cast<double>()).matrix();
    g.w1 = d_pre.transpose() * x;
    g.b1 = d_pre.colwise().sum().transpose();
    return g;
}

MlpModel init_mlp(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "mlp-init"));
    const auto in = static_cast<Eigen::Index>(inputs);
    const auto h = static_cast<Eigen::Index>(hidden);
    const double limit1 = std::sqrt(6.0 / static_cast<double>(inputs));
    const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden));
    MlpModel m;
    m.w1.resize(h, in);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < in; ++c) {
            m.w1(r, c) = rng.uniform(-limit1, limit1);
        }
    }
    m.b1 = Eigen::VectorXd::Zero(h);
    m.w2.resize(h);
    for (Eigen::Index r = 0; r < h; ++r) {
        m.w2(r) = rng.uniform(-limit2, limit2);
    }
    m.b2 = 0.0;
    return m;
}

AdamState::AdamState(const MlpModel& m, const MlpParams& params) : params_(params) {
    m_.w1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
    m_.b1 = Eigen::VectorXd::Zero(m.b1.size());
    m_.w2 = Eigen::VectorXd::Zero(m.w2.size());
    v_ = m_;
}

void AdamState::step(MlpModel& m, const MlpGradient& g) {
    ++t_;
    const double b1 = params_.beta1;
    const double b2 = params_.beta2;
    const double lr = params_.learning_rate * std::sqrt(1.0 - std::pow(b2, t_)) / (1.0 - std::pow(b1, t_));
    const double eps = params_.epsilon;
    auto update = [&](auto& param, auto& first, auto& second, const auto& grad) {
        first = b1 * first + (1.0 - b1) * grad;
        second = b2 * second + (1.0 - b2) * grad.cwiseProduct(grad);
        param -= (lr * first.array() / (second.array().sqrt() + eps)).matrix();
    };
    update(m.w1, m_.w1, v_.w1, g.w1);
    update(m.b1, m_.b1, v_.b1, g.b1);
    update(m.w2, m_.w2, v_.w2, g.w2);
    m_.b2 = b1 * m_.b2 + (1.0 - b1) * g.b2;
    v_.b2 = b2 * v_.b2 + (1.0 - b2) * g.b2 * g.b2;
    m.b2 -= lr * m_.b2 / (std::sqrt(v_.b2) + eps);
}

MlpModel fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MlpParams& params, std::uint64_t seed) {
    MlpModel model = init_mlp(static_cast<std::size_t>(x.cols()), params.hidden_units, seed);
    AdamState adam(model, params);
    const auto n = static_cast<std::size_t>(x.rows());
    const bool full_batch = params.batch_size == 0 || params.batch_size >= n;
    Rng batch_rng(derive_seed(seed, "mlp-batches"));

    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        double epoch_loss = 0.0;
        if (full_batch) {
            const MlpGradient g = mlp_gradient(model, x, y);
            epoch_loss = g.loss;
            if (!std::isfinite(epoch_loss)) {
                throw NonFiniteLoss("MLPR loss diverged at epoch " + std::to_string(epoch));
            }
            adam.step(model, g);
        } else {
            const auto perm = batch_rng.permutation(n);
            for (std::size_t start = 0; start < n; start += params.batch_size) {
                const std::size_t count = std::min(params.batch_size, n - start);
                Eigen::MatrixXd xb(static_cast<Eigen::Index>(count), x.cols());
                Eigen::VectorXd yb(static_cast<Eigen::Index>(count));
                for (std::size_t r = 0; r < count; ++r) {
                    xb.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(perm[start + r]));
                    yb(static_cast<Eigen::Index>(r)) = y(static_cast<Eigen::Index>(perm[start + r]));
                }
                const MlpGradient g = mlp_gradient(model, xb, yb);
                if (!std::isfinite(g.loss)) {
                    throw NonFiniteLoss("MLPR loss diverged at epoch " + std::to_string(epoch));
                }
                epoch_loss += g.loss * static_cast<double>(count) / static_cast<double>(n);
                adam.step(model, g);
            }
        }
        model.loss_history.push_back(epoch_loss);
        if (epoch_loss > best - params.tolerance) {
            if (++stale >= params.n_iter_no_change) {
                break;
            }
        } else {
            stale = 0;
        }
        best = std::min(best, epoch_loss);
    }
    if (!std::isfinite(mlp_loss(model, x, y))) {
        throw NonFiniteLoss("MLPR loss is not finite after training");
    }
    return model;
}

} // namespace pvfdi
