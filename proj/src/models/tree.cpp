#include "pvfdi/models/tree.hpp"

#include <algorithm>
#include <numeric>

namespace pvfdi {

namespace {

struct NodeTotals {
    double grad = 0.0;
    double hess = 0.0;
    double grad_sq = 0.0;
};

// Gains closer than this (relative to the node's gradient scale) count as
// ties, so rounding in the running sums cannot override the index order.
constexpr double kTieTolerance = 1e-12;

double structure_score(double g, double h, double lambda) {
    const double denom = h + lambda;
    return denom > 0.0 ? g * g / denom : 0.0;
}

/// Scans one feature's rows (sorted by value) and updates `best` with any
/// strictly better split.
void scan_feature(const Eigen::MatrixXd& x, int feature, std::span<const std::size_t> sorted,
                  std::span<const double> grad, std::span<const double> hess, const NodeTotals& total,
                  const GrowParams& params, SplitCandidate& best) {
    const std::size_t n = sorted.size();
    const double parent = structure_score(total.grad, total.hess, params.lambda);
    const double tie = kTieTolerance * std::max(total.grad_sq, parent);
    double g_left = 0.0;
    double h_left = 0.0;
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const std::size_t row = sorted[pos];
        g_left += grad[row];
        h_left += hess[row];
        const double here = x(static_cast<Eigen::Index>(row), feature);
        const double next = x(static_cast<Eigen::Index>(sorted[pos + 1]), feature);
        if (!(here < next)) {
            continue;
        }
        const std::size_t n_left = pos + 1;
        if (n_left < params.min_samples_leaf || n - n_left < params.min_samples_leaf) {
            continue;
        }
        const double g_right = total.grad - g_left;
        const double h_right = total.hess - h_left;
        if (h_left < params.min_child_weight || h_right < params.min_child_weight) {
            continue;
        }
        const double gain = 0.5 * (structure_score(g_left, h_left, params.lambda) +
                                   structure_score(g_right, h_right, params.lambda) - parent) -
                            params.gamma;
        if (gain > best.gain + tie) {
            double threshold = 0.5 * (here + next);
            if (!(here < threshold)) {
                threshold = next;
            }
            best = {feature, threshold, gain};
        }
    }
}

NodeTotals totals(std::span<const std::size_t> rows, std::span<const double> grad, std::span<const double> hess) {
    NodeTotals t;
    for (const auto r : rows) {
        t.grad += grad[r];
        t.hess += hess[r];
        t.grad_sq += grad[r] * grad[r];
    }
    return t;
}

bool is_pure(std::span<const std::size_t> rows, std::span<const double> grad) {
    return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return grad[r] == grad[rows.front()]; });
}

class TreeGrower {
public:
    TreeGrower(const Eigen::MatrixXd& x, const FeatureOrder& order, std::span<const double> grad,
               std::span<const double> hess, const GrowParams& params)
        : x_(x), sorted_(order.rows), grad_(grad), hess_(hess), params_(params),
          go_left_(static_cast<std::size_t>(x.rows()), 0), scratch_(static_cast<std::size_t>(x.rows())) {}

    RegressionTree grow() {
        RegressionTree tree;
        grow_node(tree, 0, static_cast<std::size_t>(x_.rows()), 0);
        return tree;
    }

private:
    int grow_node(RegressionTree& tree, std::size_t begin, std::size_t end, int depth) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        const std::span<const std::size_t> rows(sorted_[0].data() + begin, end - begin);
        const NodeTotals total = totals(rows, grad_, hess_);
        tree.nodes[static_cast<std::size_t>(id)].value = leaf_weight(total);

        const bool depth_left = params_.max_depth < 0 || depth < params_.max_depth;
        if (!depth_left || end - begin < 2 || (params_.stop_on_pure && is_pure(rows, grad_))) {
            return id;
        }
        SplitCandidate best;
        for (int f = 0; f < static_cast<int>(sorted_.size()); ++f) {
            const std::span<const std::size_t> feature_rows(sorted_[static_cast<std::size_t>(f)].data() + begin,
                                                            end - begin);
            scan_feature(x_, f, feature_rows, grad_, hess_, total, params_, best);
        }
        if (best.feature < 0) {
            return id;
        }

        std::size_t n_left = 0;
        for (std::size_t pos = begin; pos < end; ++pos) {
            const std::size_t r = sorted_[0][pos];
            const bool left = x_(static_cast<Eigen::Index>(r), best.feature) < best.threshold;
            go_left_[r] = left ? 1 : 0;
            n_left += left ? 1 : 0;
        }
        for (auto& column : sorted_) {
            // Stable partition keeps each side sorted.
            std::size_t l = begin;
            std::size_t r = 0;
            for (std::size_t pos = begin; pos < end; ++pos) {
                const std::size_t row = column[pos];
                if (go_left_[row] != 0) {
                    column[l++] = row;
                } else {
                    scratch_[r++] = row;
                }
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r),
                      column.begin() + static_cast<std::ptrdiff_t>(l));
        }

        const std::size_t mid = begin + n_left;
        const int left = grow_node(tree, begin, mid, depth + 1);
        const int right = grow_node(tree, mid, end, depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    double leaf_weight(const NodeTotals& t) const {
        const double denom = t.hess + params_.lambda;
        return denom > 0.0 ? -t.grad / denom : 0.0;
    }

    const Eigen::MatrixXd& x_;
    std::vector<std::vector<std::size_t>> sorted_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    GrowParams params_;
    std::vector<char> go_left_;
    std::vector<std::size_t> scratch_;
};

} // namespace

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& node = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                                               : node.right);
    }
    return nodes[i].value;
}

int RegressionTree::depth() const {
    std::vector<int> level(nodes.size(), 0);
    int deepest = 0;
    // Children always follow their parent in the node array.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes[i].is_leaf()) {
            level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
        }
    }
    return deepest;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

FeatureOrder FeatureOrder::of(const Eigen::MatrixXd& x) {
    FeatureOrder order;
    order.rows.resize(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        auto& rows = order.rows[static_cast<std::size_t>(f)];
        rows.resize(static_cast<std::size_t>(x.rows()));
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            const double va = x(static_cast<Eigen::Index>(a), f);
            const double vb = x(static_cast<Eigen::Index>(b), f);
            return va < vb || (va == vb && a < b);
        });
    }
    return order;
}

SplitCandidate best_split(const Eigen::MatrixXd& x, std::span<const double> grad, std::span<const double> hess,
                          std::span<const std::size_t> rows, const GrowParams& params) {
    const NodeTotals total = totals(rows, grad, hess);
    SplitCandidate best;
    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    for (int f = 0; f < static_cast<int>(x.cols()); ++f) {
        std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
            const double va = x(static_cast<Eigen::Index>(a), f);
            const double vb = x(static_cast<Eigen::Index>(b), f);
            return va < vb || (va == vb && a < b);
        });
        scan_feature(x, f, sorted, grad, hess, total, params, best);
    }
    return best;
}

RegressionTree grow_tree(const Eigen::MatrixXd& x, std::span<const double> grad, std::span<const double> hess,
                         const GrowParams& params) {
    return grow_tree(x, FeatureOrder::of(x), grad, hess, params);
}

RegressionTree grow_tree(const Eigen::MatrixXd& x, const FeatureOrder& order, std::span<const double> grad,
                         std::span<const double> hess, const GrowParams& params) {
    return TreeGrower(x, order, grad, hess, params).grow();
}

RegressionTree fit_dt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeParams& params) {
    const auto n = static_cast<std::size_t>(y.size());
    std::vector<double> grad(n);
    const std::vector<double> hess(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = -y(static_cast<Eigen::Index>(i));
    }
    GrowParams grow;
    grow.max_depth = params.max_depth;
    grow.min_samples_leaf = params.min_samples_leaf;
    grow.stop_on_pure = true;
    return grow_tree(x, grad, hess, grow);
}

} // namespace pvfdi
