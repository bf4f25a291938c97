#include <algorithm>
#include <array>
#include <cctype>

#include "pvfdi/error.hpp"
#include "pvfdi/regressors.hpp"

namespace pvfdi {

namespace {

constexpr std::array<std::string_view, 8> kKindNames{"LR", "LASSO", "GPR", "KNN", "DT", "GBRT", "SVR", "MLPR"};

template <class Params>
const Params& params_as(const ModelSpec& spec) {
    const auto* p = std::get_if<Params>(&spec.params);
    if (p == nullptr) {
        throw InvalidSpec(std::string(to_string(spec.kind)) + ": hyperparameters belong to a different model kind");
    }
    return *p;
}

void require(bool ok, const ModelSpec& spec, const std::string& what) {
    if (!ok) {
        throw InvalidSpec(spec.display_name() + ": " + what);
    }
}

} // namespace

std::string_view to_string(ModelKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == upper) {
            return static_cast<ModelKind>(i);
        }
    }
    return std::nullopt;
}

ModelSpec ModelSpec::defaults(ModelKind kind, std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    switch (kind) {
    case ModelKind::LR: spec.params = LinearParams{}; break;
    case ModelKind::LASSO: spec.params = LassoParams{}; break;
    case ModelKind::GPR: spec.params = GprParams{}; break;
    case ModelKind::KNN: spec.params = KnnParams{}; break;
    case ModelKind::DT: spec.params = TreeParams{}; break;
    case ModelKind::GBRT: spec.params = GbrtParams{}; break;
    case ModelKind::SVR: spec.params = SvrParams{}; break;
    case ModelKind::MLPR: spec.params = MlpParams{}; break;
    }
    return spec;
}

std::string ModelSpec::display_name() const {
    return name.empty() ? std::string(to_string(kind)) : name;
}

void ModelSpec::validate() const {
    switch (kind) {
    case ModelKind::LR: params_as<LinearParams>(*this); break;
    case ModelKind::LASSO: {
        const auto& p = params_as<LassoParams>(*this);
        require(p.lambda >= 0.0, *this, "lambda must be >= 0");
        require(p.tolerance > 0.0 && p.max_sweeps >= 1, *this, "tolerance > 0 and max_sweeps >= 1 required");
        break;
    }
    case ModelKind::GPR: {
        const auto& p = params_as<GprParams>(*this);
        require(p.length_scale > 0.0, *this, "length_scale must be > 0");
        require(p.noise_variance >= 0.0, *this, "noise_variance must be >= 0");
        require(p.subset_cap >= 1, *this, "subset_cap must be >= 1");
        break;
    }
    case ModelKind::KNN: require(params_as<KnnParams>(*this).k >= 1, *this, "k must be >= 1"); break;
    case ModelKind::DT:
        require(params_as<TreeParams>(*this).min_samples_leaf >= 1, *this, "min_samples_leaf must be >= 1");
        break;
    case ModelKind::GBRT: {
        const auto& p = params_as<GbrtParams>(*this);
        require(p.rounds >= 1, *this, "rounds must be >= 1");
        require(p.learning_rate > 0.0, *this, "learning_rate must be > 0");
        require(p.max_depth >= 0, *this, "max_depth must be >= 0");
        require(p.lambda >= 0.0 && p.gamma >= 0.0 && p.min_child_weight >= 0.0, *this,
                "lambda, gamma and min_child_weight must be >= 0");
        break;
    }
    case ModelKind::SVR: {
        const auto& p = params_as<SvrParams>(*this);
        require(p.c > 0.0, *this, "C must be > 0");
        require(p.epsilon >= 0.0, *this, "epsilon must be >= 0");
        require(p.gamma > 0.0, *this, "gamma must be > 0");
        require(p.tolerance > 0.0 && p.max_iterations >= 1, *this, "tolerance > 0 and max_iterations >= 1 required");
        break;
    }
    case ModelKind::MLPR: {
        const auto& p = params_as<MlpParams>(*this);
        require(p.hidden_units >= 1, *this, "hidden_units must be >= 1");
        require(p.learning_rate > 0.0, *this, "learning_rate must be > 0");
        require(p.max_epochs >= 1, *this, "max_epochs must be >= 1");
        require(p.beta1 >= 0.0 && p.beta1 < 1.0 && p.beta2 >= 0.0 && p.beta2 < 1.0, *this,
                "Adam betas must lie in [0,1)");
        break;
    }
    }
}

TrainedModel::TrainedModel(ModelSpec spec, FittedParameters fitted, std::size_t feature_count)
    : spec_(std::move(spec)), fitted_(std::move(fitted)), feature_count_(feature_count) {}

double TrainedModel::predict(std::span<const double> x) const {
    if (x.size() != feature_count_) {
        throw DimensionMismatch(feature_count_, x.size());
    }
    return std::visit([&](const auto& m) { return m.predict(x); }, fitted_);
}

std::vector<double> TrainedModel::predict(const Eigen::MatrixXd& x) const {
    if (static_cast<std::size_t>(x.cols()) != feature_count_) {
        throw DimensionMismatch(feature_count_, static_cast<std::size_t>(x.cols()));
    }
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    if (const auto* mlp = std::get_if<MlpModel>(&fitted_)) {
        const Eigen::VectorXd p = mlp->predict(x);
        std::copy(p.data(), p.data() + p.size(), out.begin());
        return out;
    }
    const RowMatrix rows = x;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const std::span<const double> row(rows.row(i).data(), static_cast<std::size_t>(rows.cols()));
        out[static_cast<std::size_t>(i)] = std::visit([&](const auto& m) { return m.predict(row); }, fitted_);
    }
    return out;
}

std::vector<double> TrainedModel::predict(const Dataset& d) const {
    return predict(d.feature_matrix());
}

TrainedModel fit(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    spec.validate();
    if (x.rows() == 0 || x.rows() != y.size()) {
        throw InvalidSpec(spec.display_name() + ": training set is empty or misaligned");
    }
    const auto d = static_cast<std::size_t>(x.cols());
    switch (spec.kind) {
    case ModelKind::LR: return {spec, fit_lr(x, y), d};
    case ModelKind::LASSO: return {spec, fit_lasso(x, y, std::get<LassoParams>(spec.params)), d};
    case ModelKind::GPR: return {spec, fit_gpr(x, y, std::get<GprParams>(spec.params), spec.seed), d};
    case ModelKind::KNN: return {spec, fit_knn(x, y, std::get<KnnParams>(spec.params).k), d};
    case ModelKind::DT: return {spec, fit_dt(x, y, std::get<TreeParams>(spec.params)), d};
    case ModelKind::GBRT: return {spec, fit_gbrt(x, y, std::get<GbrtParams>(spec.params)), d};
    case ModelKind::SVR: return {spec, fit_svr(x, y, std::get<SvrParams>(spec.params)), d};
    case ModelKind::MLPR: return {spec, fit_mlp(x, y, std::get<MlpParams>(spec.params), spec.seed), d};
    }
    throw InvalidSpec("unknown model kind");
}

TrainedModel fit(const ModelSpec& spec, const Dataset& train) {
    return fit(spec, train.feature_matrix(), train.targets());
}

} // namespace pvfdi
