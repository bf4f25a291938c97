#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace pvfdi {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ModelKind { LR, LASSO, GPR, KNN, DT, GBRT, SVR, MLPR };

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::LR,  ModelKind::LASSO, ModelKind::GPR, ModelKind::KNN,
    ModelKind::DT,  ModelKind::GBRT,  ModelKind::SVR, ModelKind::MLPR,
};

std::string_view to_string(ModelKind kind);
/// Case-insensitive.
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct LinearParams {};

struct LassoParams {
    double lambda = 0.01;
    double tolerance = 1e-8;
    int max_sweeps = 10000;
};

struct GprParams {
    double length_scale = 1.0;
    double noise_variance = 0.01;
    std::size_t subset_cap = 2000;
};

struct KnnParams {
    std::size_t k = 2;
};

struct TreeParams {
    int max_depth = -1; // negative: unlimited
    std::size_t min_samples_leaf = 5;
};

struct GbrtParams {
    int rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
};

enum class SvrKernel { Rbf, Linear };

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;
    SvrKernel kernel = SvrKernel::Rbf;
    double gamma = 1.0 / 12.0;
    double tolerance = 1e-3;
    std::size_t max_iterations = 10'000'000;
    std::size_t cache_mb = 256;
    bool record_objective = false;
};

struct MlpParams {
    std::size_t hidden_units = 100;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_epochs = 500;
    double tolerance = 1e-8;
    int n_iter_no_change = 10;
    std::size_t batch_size = 0; // 0: full batch
};

using Hyperparameters =
    std::variant<LinearParams, LassoParams, GprParams, KnnParams, TreeParams, GbrtParams, SvrParams, MlpParams>;

/// Declarative model configuration. `seed` drives MLPR initialization and the
/// GPR training subsample; other kinds ignore it.
struct ModelSpec {
    ModelKind kind = ModelKind::LR;
    Hyperparameters params = LinearParams{};
    std::uint64_t seed = 0;
    std::string name; // empty: to_string(kind)

    static ModelSpec defaults(ModelKind kind, std::uint64_t seed = 0);

    std::string display_name() const;

    /// Throws InvalidSpec when the hyperparameters are out of range or do not
    /// belong to `kind`.
    void validate() const;
};

} // namespace pvfdi
