#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pvfdi/models/spec.hpp"

namespace pvfdi {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;  // x[feature] < threshold
    int right = -1; // x[feature] >= threshold
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// Binary axis-aligned tree; node 0 is the root.
struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const;
    int depth() const;
    std::size_t leaf_count() const;
};

/**
 * Settings of the shared second-order tree grower.
 *
 * Every node minimises sum_i (g_i w + h_i w^2 / 2) + lambda w^2 / 2, so a leaf
 * holds w = -G / (H + lambda) and a split gains
 *   1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma.
 * With g = -y, h = 1 and lambda = 0 this is the CART variance-reduction tree.
 */
struct GrowParams {
    int max_depth = -1;
    std::size_t min_samples_leaf = 1;
    double min_child_weight = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    /// Stop at nodes whose targets are all equal.
    bool stop_on_pure = false;
};

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/**
 * Exhaustive search for the best split of the samples in `rows`. Thresholds
 * are midpoints of adjacent distinct sorted values; ties keep the lower
 * feature index, then the lower threshold. feature == -1 if no split has
 * positive gain.
 */
SplitCandidate best_split(const Eigen::MatrixXd& x, std::span<const double> grad, std::span<const double> hess,
                          std::span<const std::size_t> rows, const GrowParams& params);

/// Per-feature row orders sorted by (value, row). Reusable across trees grown on the same x.
struct FeatureOrder {
    std::vector<std::vector<std::size_t>> rows;

    static FeatureOrder of(const Eigen::MatrixXd& x);
};

RegressionTree grow_tree(const Eigen::MatrixXd& x, std::span<const double> grad, std::span<const double> hess,
                         const GrowParams& params);
RegressionTree grow_tree(const Eigen::MatrixXd& x, const FeatureOrder& order, std::span<const double> grad,
                         std::span<const double> hess, const GrowParams& params);

/// CART regression tree: greedy SSE-reducing splits, mean-valued leaves.
RegressionTree fit_dt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeParams& params);

} // namespace pvfdi
