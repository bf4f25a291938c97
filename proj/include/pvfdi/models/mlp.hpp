#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

/// in -> hidden (ReLU) -> 1 (linear).
struct MlpModel {
    Eigen::MatrixXd w1; // hidden x in
    Eigen::VectorXd b1;
    Eigen::VectorXd w2; // hidden
    double b2 = 0.0;
    std::vector<double> loss_history;

    double predict(std::span<const double> x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

struct MlpGradient {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::VectorXd w2;
    double b2 = 0.0;
    double loss = 0.0; // mlp_loss at the same parameters
};

/// Loss (1/2n) sum (y' - y)^2 over the rows of x.
double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Backpropagated gradient of mlp_loss. ReLU'(0) is taken as 0.
MlpGradient mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// He-style uniform init: weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), biases 0.
MlpModel init_mlp(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

/// Adam optimiser state for one MlpModel.
class AdamState {
public:
    AdamState(const MlpModel& m, const MlpParams& params);
    void step(MlpModel& m, const MlpGradient& g);

private:
    MlpParams params_;
    MlpGradient m_;
    MlpGradient v_;
    int t_ = 0;
};

/**
 * Trains on squared loss with Adam. Full batch when params.batch_size is 0,
 * otherwise seeded mini-batches. Stops after max_epochs or when the epoch loss
 * has not improved on the best seen by at least `tolerance` for
 * n_iter_no_change consecutive epochs. Throws NonFiniteLoss on divergence.
 */
MlpModel fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MlpParams& params, std::uint64_t seed);

} // namespace pvfdi
