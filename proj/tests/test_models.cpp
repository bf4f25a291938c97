#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <thread>

#include "pvfdi/data.hpp"
#include "pvfdi/error.hpp"
#include "pvfdi/metrics.hpp"
#include "pvfdi/model_io.hpp"
#include "pvfdi/regressors.hpp"
#include "support.hpp"

using namespace pvfdi;

namespace {

struct Fixture {
    Dataset train;
    Dataset test;
};

const Fixture& small_data() {
    static const Fixture f = [] {
        const auto parts = split(synth_generate(600, 21), SplitConfig{0.8, 4});
        const std::vector<Dataset> others{parts.test};
        auto n = normalize(parts.train, others);
        return Fixture{std::move(n.train), std::move(n.others[0])};
    }();
    return f;
}

/// Defaults scaled down so the whole suite stays quick.
ModelSpec quick_spec(ModelKind kind) {
    auto spec = ModelSpec::defaults(kind, 17);
    if (kind == ModelKind::MLPR) {
        std::get<MlpParams>(spec.params).max_epochs = 60;
        std::get<MlpParams>(spec.params).hidden_units = 20;
    }
    if (kind == ModelKind::GBRT) {
        std::get<GbrtParams>(spec.params).rounds = 20;
    }
    return spec;
}

} // namespace

TEST_CASE("model kinds parse case-insensitively") {
    for (const auto kind : kAllModelKinds) {
        CHECK(parse_model_kind(to_string(kind)) == kind);
    }
    CHECK(parse_model_kind("mlpr") == ModelKind::MLPR);
    CHECK(parse_model_kind("Lasso") == ModelKind::LASSO);
    CHECK_FALSE(parse_model_kind("xgboost").has_value());
}

TEST_CASE("default hyperparameters") {
    const auto lasso = std::get<LassoParams>(ModelSpec::defaults(ModelKind::LASSO).params);
    CHECK(lasso.lambda == 0.01);
    const auto gpr = std::get<GprParams>(ModelSpec::defaults(ModelKind::GPR).params);
    CHECK(gpr.length_scale == 1.0);
    CHECK(gpr.noise_variance == 0.01);
    CHECK(gpr.subset_cap == 2000);
    CHECK(std::get<KnnParams>(ModelSpec::defaults(ModelKind::KNN).params).k == 2);
    const auto dt = std::get<TreeParams>(ModelSpec::defaults(ModelKind::DT).params);
    CHECK(dt.max_depth < 0);
    CHECK(dt.min_samples_leaf == 5);
    const auto gbrt = std::get<GbrtParams>(ModelSpec::defaults(ModelKind::GBRT).params);
    CHECK(gbrt.rounds == 100);
    CHECK(gbrt.learning_rate == 0.1);
    CHECK(gbrt.max_depth == 3);
    CHECK(gbrt.lambda == 1.0);
    CHECK(gbrt.gamma == 0.0);
    const auto svr = std::get<SvrParams>(ModelSpec::defaults(ModelKind::SVR).params);
    CHECK(svr.c == 1.0);
    CHECK(svr.epsilon == 0.1);
    CHECK(svr.gamma == 1.0 / 12.0);
    CHECK(svr.kernel == SvrKernel::Rbf);
    const auto mlp = std::get<MlpParams>(ModelSpec::defaults(ModelKind::MLPR).params);
    CHECK(mlp.hidden_units == 100);
    CHECK(mlp.learning_rate == 1e-3);
    CHECK(mlp.max_epochs == 500);
    CHECK(mlp.beta1 == 0.9);
    CHECK(mlp.beta2 == 0.999);
    CHECK(mlp.epsilon == 1e-8);
    CHECK(mlp.batch_size == 0);
}

TEST_CASE("model spec validation") {
    auto knn = ModelSpec::defaults(ModelKind::KNN);
    std::get<KnnParams>(knn.params).k = 0;
    CHECK_THROWS_AS(fit(knn, small_data().train), InvalidSpec);
    auto gbrt = ModelSpec::defaults(ModelKind::GBRT);
    std::get<GbrtParams>(gbrt.params).rounds = 0;
    CHECK_THROWS_AS(gbrt.validate(), InvalidSpec);
    auto svr = ModelSpec::defaults(ModelKind::SVR);
    std::get<SvrParams>(svr.params).c = 0.0;
    CHECK_THROWS_AS(svr.validate(), InvalidSpec);
    ModelSpec wrong;
    wrong.kind = ModelKind::GPR;
    wrong.params = KnnParams{};
    CHECK_THROWS_AS(wrong.validate(), InvalidSpec);
    for (const auto kind : kAllModelKinds) {
        CHECK_NOTHROW(ModelSpec::defaults(kind).validate());
    }
}

TEST_CASE("KNN fit stores the training set") {
    const auto& d = small_data().train;
    const auto m = fit(ModelSpec::defaults(ModelKind::KNN), d);
    const auto& knn = std::get<KnnModel>(m.fitted());
    CHECK(Eigen::MatrixXd(knn.inputs) == d.feature_matrix());
    CHECK(knn.targets == d.targets());
}

TEST_CASE("predict rejects the wrong feature count") {
    const auto m = fit(ModelSpec::defaults(ModelKind::LR), small_data().train);
    CHECK(m.feature_count() == 12);
    const std::vector<double> eleven(11, 0.5);
    CHECK_THROWS_AS(m.predict(eleven), DimensionMismatch);
    CHECK_THROWS_AS(m.predict(Eigen::MatrixXd::Zero(3, 11)), DimensionMismatch);
}

TEST_CASE("DT on constant targets predicts the constant") {
    const auto x = small_data().train.feature_matrix();
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(x.rows(), 0.25);
    const auto m = fit(ModelSpec::defaults(ModelKind::DT), x, y);
    CHECK(m.predict(std::vector<double>(12, 0.9)) == 0.25);
}

TEST_CASE("every kind: same spec and data give identical predictions") {
    const auto& f = small_data();
    for (const auto kind : kAllModelKinds) {
        const auto spec = quick_spec(kind);
        const auto a = fit(spec, f.train).predict(f.test);
        const auto b = fit(spec, f.train).predict(f.test);
        INFO(to_string(kind));
        CHECK(a == b);
    }
}

TEST_CASE("every kind: concurrent fits match sequential fits") {
    const auto& f = small_data();
    std::vector<std::vector<double>> sequential;
    for (const auto kind : kAllModelKinds) {
        sequential.push_back(fit(quick_spec(kind), f.train).predict(f.test));
    }
    std::vector<std::vector<double>> parallel(std::size(kAllModelKinds));
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < std::size(kAllModelKinds); ++i) {
        threads.emplace_back([&, i] { parallel[i] = fit(quick_spec(kAllModelKinds[i]), f.train).predict(f.test); });
    }
    for (auto& t : threads) {
        t.join();
    }
    CHECK(parallel == sequential);
}

TEST_CASE("every kind beats the mean predictor on synthetic data") {
    const auto& f = small_data();
    const double baseline = mean_predictor_rmse(f.train.powers(), f.test.powers());
    for (const auto kind : kAllModelKinds) {
        const auto pred = fit(quick_spec(kind), f.train).predict(f.test);
        INFO(to_string(kind));
        CHECK(rmse(f.test.powers(), pred) < baseline);
    }
    auto stump = ModelSpec::defaults(ModelKind::DT);
    std::get<TreeParams>(stump.params).max_depth = 0;
    const auto pred = fit(stump, f.train).predict(f.test);
    CHECK(rmse(f.test.powers(), pred) == Catch::Approx(baseline).epsilon(1e-12));
}

TEST_CASE("serialization round-trips every kind bit-exactly") {
    const auto& f = small_data();
    for (const auto kind : kAllModelKinds) {
        auto spec = quick_spec(kind);
        spec.name = std::string(to_string(kind)) + "-copy";
        const auto m = fit(spec, f.train);
        std::stringstream buf;
        save_model(m, buf);
        const auto text = buf.str();
        const auto back = load_model(buf);
        INFO(to_string(kind));
        CHECK(back.spec().kind == kind);
        CHECK(back.spec().display_name() == spec.name);
        CHECK(back.spec().seed == spec.seed);
        CHECK(back.predict(f.test) == m.predict(f.test));
        std::stringstream again;
        save_model(back, again);
        CHECK(again.str() == text);
    }
}

TEST_CASE("serialization file helpers and format header") {
    testutil::TempDir dir("io");
    const auto m = fit(ModelSpec::defaults(ModelKind::LR), small_data().train);
    save_model(m, dir / "lr.model");
    const auto text = testutil::slurp(dir / "lr.model");
    CHECK(text.rfind("pvfdi-model 1\n", 0) == 0);
    CHECK(load_model(dir / "lr.model").predict(small_data().test) == m.predict(small_data().test));
    CHECK(hex_double(1.0) == "0x1p+0");
}

TEST_CASE("malformed model files raise IoError") {
    auto load = [](const std::string& text) {
        std::istringstream in(text);
        return load_model(in);
    };
    CHECK_THROWS_AS(load(""), IoError);
    CHECK_THROWS_AS(load("pvfdi-model 2\nkind LR\nend\n"), IoError);
    CHECK_THROWS_AS(load("pvfdi-model 1\nkind XGB\nend\n"), IoError);
    std::stringstream buf;
    save_model(fit(ModelSpec::defaults(ModelKind::KNN), small_data().train), buf);
    std::string truncated = buf.str();
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(load(truncated), IoError);
    CHECK_THROWS_AS(load_model(std::filesystem::path("/nonexistent/model")), IoError);
}
