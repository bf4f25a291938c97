#pragma once

#include <span>
#include <variant>
#include <vector>

#include "pvfdi/data.hpp"
#include "pvfdi/models/gbrt.hpp"
#include "pvfdi/models/gpr.hpp"
#include "pvfdi/models/knn.hpp"
#include "pvfdi/models/linear.hpp"
#include "pvfdi/models/mlp.hpp"
#include "pvfdi/models/spec.hpp"
#include "pvfdi/models/svr.hpp"
#include "pvfdi/models/tree.hpp"

namespace pvfdi {

using FittedParameters = std::variant<LinearModel, GprModel, KnnModel, RegressionTree, GbrtModel, SvrModel, MlpModel>;

/// A fitted model behind the uniform predict contract. Immutable; predict is reentrant.
class TrainedModel {
public:
    TrainedModel(ModelSpec spec, FittedParameters fitted, std::size_t feature_count);

    const ModelSpec& spec() const noexcept { return spec_; }
    const FittedParameters& fitted() const noexcept { return fitted_; }
    std::size_t feature_count() const noexcept { return feature_count_; }

    /// Throws DimensionMismatch unless x has feature_count() entries.
    double predict(std::span<const double> x) const;
    std::vector<double> predict(const Eigen::MatrixXd& x) const;
    std::vector<double> predict(const Dataset& d) const;

private:
    ModelSpec spec_;
    FittedParameters fitted_;
    std::size_t feature_count_;
};

/// Validates the spec and dispatches to the kind-specific fit.
TrainedModel fit(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
TrainedModel fit(const ModelSpec& spec, const Dataset& train);

} // namespace pvfdi
