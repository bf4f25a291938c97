#include "pvfdi/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "pvfdi/error.hpp"
#include "pvfdi/models/fields.hpp"
#include "pvfdi/rng.hpp"

namespace pvfdi {

std::string_view to_string(NoiseSpace space) {
    return space == NoiseSpace::Raw ? "raw" : "normalized";
}

std::optional<NoiseSpace> parse_noise_space(std::string_view text) {
    if (text == "normalized") {
        return NoiseSpace::Normalized;
    }
    if (text == "raw") {
        return NoiseSpace::Raw;
    }
    return std::nullopt;
}

ExperimentConfig ExperimentConfig::defaults(std::uint64_t root_seed) {
    ExperimentConfig cfg;
    for (const auto kind : kAllModelKinds) {
        cfg.models.push_back(ModelSpec::defaults(kind));
    }
    cfg.reseed(root_seed);
    return cfg;
}

void ExperimentConfig::reseed(std::uint64_t root_seed) {
    seed = root_seed;
    data.synth_seed = root_seed;
    split.seed = derive_seed(root_seed, "split");
    noise.seed = derive_seed(root_seed, "noise");
    for (auto& m : models) {
        m.seed = derive_seed(root_seed, "model:" + m.display_name());
    }
}

void ExperimentConfig::validate() const {
    if (models.empty()) {
        throw ConfigError("at least one model is required");
    }
    std::set<std::string> names;
    for (const auto& m : models) {
        if (!names.insert(m.display_name()).second) {
            throw ConfigError("duplicate model name '" + m.display_name() + "'");
        }
        try {
            m.validate();
        } catch (const InvalidSpec& e) {
            throw ConfigError(e.what());
        }
    }
    if (fractions.empty() || fractions.front() != 0.0) {
        throw ConfigError("fractions must start with 0");
    }
    for (const double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ConfigError("fraction outside [0,1]: " + format_double(f));
        }
    }
    if (repeats == 0) {
        throw ConfigError("repeats must be >= 1");
    }
    if (jobs == 0) {
        throw ConfigError("jobs must be >= 1");
    }
    if (!(split.train_ratio > 0.0 && split.train_ratio < 1.0)) {
        throw ConfigError("train_ratio must lie in (0,1)");
    }
    noise.validate();
}

std::uint64_t fraction_seed(std::uint64_t noise_seed, double fraction, std::size_t repeat) {
    return derive_seed(derive_seed(noise_seed, std::bit_cast<std::uint64_t>(fraction)),
                       static_cast<std::uint64_t>(repeat));
}

PreparedData prepare_data(const ExperimentConfig& cfg, const Dataset& raw, std::string source) {
    Split parts = split(raw, cfg.split);
    const NormalizationStats stats = fit_normalization(parts.train);
    Dataset train = apply_normalization(parts.train, stats);
    Dataset test = apply_normalization(parts.test, stats);
    return PreparedData{std::move(source),      dataset_checksum(raw), raw.size(),       std::move(parts.train),
                        std::move(parts.test),  stats,                 std::move(train), std::move(test)};
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
    if (cfg.data.path) {
        return prepare_data(cfg, load_csv(*cfg.data.path), cfg.data.path->string());
    }
    const Dataset raw = synth_generate(cfg.data.synth_n, cfg.data.synth_seed, {cfg.data.synth_residual_std});
    return prepare_data(cfg, raw,
                        "synth(n=" + std::to_string(cfg.data.synth_n) + ", seed=" + std::to_string(cfg.data.synth_seed) +
                            ", residual_std=" + format_double(cfg.data.synth_residual_std) + ")");
}

std::vector<std::string> SensitivityTable::labels() const {
    std::vector<std::string> out;
    for (const double f : fractions) {
        out.push_back("0% vs. " + percent_label(f));
    }
    return out;
}

bool ExperimentReport::any_model_failed() const {
    return std::any_of(clean_table.begin(), clean_table.end(), [](const CleanRow& r) { return !r.metrics; });
}

std::string percent_label(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g%%", 100.0 * fraction);
    return buf;
}

SensitivityTable compute_sensitivity(const NoiseTable& noise) {
    const auto zero = std::find(noise.fractions.begin(), noise.fractions.end(), 0.0);
    if (zero == noise.fractions.end()) {
        throw DataError("noise table has no 0% column");
    }
    const auto base_col = static_cast<std::size_t>(zero - noise.fractions.begin());
    SensitivityTable out;
    out.models = noise.models;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < noise.fractions.size(); ++c) {
        if (c != base_col) {
            out.fractions.push_back(noise.fractions[c]);
            cols.push_back(c);
        }
    }
    for (const auto& row : noise.rmse) {
        std::vector<double> pct;
        for (const auto c : cols) {
            pct.push_back(std::isnan(row[base_col]) || std::isnan(row[c])
                              ? std::numeric_limits<double>::quiet_NaN()
                              : percent_change(row[base_col], row[c]));
        }
        out.percent.push_back(std::move(pct));
    }
    return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::ordered_json spec_to_json(const ModelSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.display_name();
    j["kind"] = std::string(to_string(spec.kind));
    j["seed"] = spec.seed;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::visit(
        [&](const auto& p) {
            for_each_field_value(p, [&](const char* name, const auto& value) {
                using T = std::decay_t<decltype(value)>;
                if constexpr (std::is_same_v<T, SvrKernel>) {
                    params[name] = format_field(value);
                } else {
                    params[name] = value;
                }
            });
        },
        spec.params);
    j["hyperparameters"] = std::move(params);
    return j;
}

nlohmann::ordered_json diagnostics(const TrainedModel& model) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvrModel>) {
                j["converged"] = m.converged;
                j["iterations"] = m.iterations;
                j["support_vectors"] = m.support_vectors.rows();
            } else if constexpr (std::is_same_v<T, MlpModel>) {
                j["epochs"] = m.loss_history.size();
                j["final_loss"] = m.loss_history.empty() ? 0.0 : m.loss_history.back();
            } else if constexpr (std::is_same_v<T, GprModel>) {
                j["training_points"] = m.inputs.rows();
                j["jitter"] = m.jitter;
            } else if constexpr (std::is_same_v<T, RegressionTree>) {
                j["depth"] = m.depth();
                j["leaves"] = m.leaf_count();
            } else if constexpr (std::is_same_v<T, GbrtModel>) {
                j["trees"] = m.trees.size();
            } else if constexpr (std::is_same_v<T, LinearModel>) {
                j["nonzero_coefficients"] = (m.coefficients.array() != 0.0).count();
            }
        },
        model.fitted());
    return j;
}

std::vector<double> predict_all(const TrainedModel& model, const Dataset& d, bool clamp) {
    auto p = model.predict(d);
    if (clamp) {
        for (auto& v : p) {
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    return p;
}

struct ModelRun {
    CleanRow clean;
    std::vector<double> noise_rmse;
    PredictionSeries series;
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

/// Noisy copies of the test set, [fraction][repeat]; empty for fraction 0.
using NoisyTestSets = std::vector<std::vector<Dataset>>;

NoisyTestSets build_noisy_sets(const ExperimentConfig& cfg, const PreparedData& data) {
    NoisyTestSets sets(cfg.fractions.size());
    for (std::size_t f = 0; f < cfg.fractions.size(); ++f) {
        if (cfg.fractions[f] == 0.0) {
            continue;
        }
        for (std::size_t r = 0; r < cfg.repeats; ++r) {
            NoiseConfig nc = cfg.noise;
            nc.fraction = cfg.fractions[f];
            nc.seed = fraction_seed(cfg.noise.seed, cfg.fractions[f], r);
            if (cfg.noise_space == NoiseSpace::Raw) {
                sets[f].push_back(apply_normalization(inject(data.test_raw, nc).noisy, data.stats));
            } else {
                sets[f].push_back(inject(data.test, nc).noisy);
            }
        }
    }
    return sets;
}

ModelRun run_model(const ExperimentConfig& cfg, const ModelSpec& spec, const PreparedData& data,
                   const NoisyTestSets* noisy) {
    ModelRun run;
    run.clean.model = spec.display_name();
    run.series.model = spec.display_name();
    try {
        const TrainedModel model = fit(spec, data.train);
        run.diagnostics = diagnostics(model);
        const auto actual = data.test.powers();
        run.series.clean = {actual, predict_all(model, data.test, cfg.clamp_predictions)};
        run.clean.metrics = evaluate(run.series.clean);
        if (noisy != nullptr) {
            for (std::size_t f = 0; f < cfg.fractions.size(); ++f) {
                if (cfg.fractions[f] == 0.0) {
                    // An empty injection leaves the test set untouched.
                    run.noise_rmse.push_back(run.clean.metrics->rmse);
                    continue;
                }
                double sum = 0.0;
                for (std::size_t r = 0; r < cfg.repeats; ++r) {
                    const Dataset& d = (*noisy)[f][r];
                    EvaluationSeries s{d.powers(), predict_all(model, d, cfg.clamp_predictions)};
                    sum += rmse(s);
                    if (r == 0 && f + 1 == cfg.fractions.size()) {
                        run.series.noisy = std::move(s);
                    }
                }
                run.noise_rmse.push_back(cfg.repeats == 1 ? sum : sum / static_cast<double>(cfg.repeats));
            }
        }
    } catch (const std::exception& e) {
        run.clean.metrics.reset();
        run.clean.error = e.what();
        run.noise_rmse.assign(cfg.fractions.size(), kNaN);
    }
    return run;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                fn(i);
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
}

ExperimentReport run(const ExperimentConfig& cfg, const PreparedData& data, bool sweep) {
    cfg.validate();
    NoisyTestSets noisy;
    if (sweep) {
        noisy = build_noisy_sets(cfg, data);
    }
    std::vector<ModelRun> runs(cfg.models.size());
    parallel_for(cfg.models.size(), cfg.jobs,
                 [&](std::size_t i) { runs[i] = run_model(cfg, cfg.models[i], data, sweep ? &noisy : nullptr); });

    ExperimentReport report;
    nlohmann::ordered_json model_diag = nlohmann::ordered_json::object();
    for (auto& r : runs) {
        model_diag[r.clean.model] = r.clean.error.empty() ? r.diagnostics : nlohmann::ordered_json{{"error", r.clean.error}};
        report.clean_table.push_back(r.clean);
        if (r.clean.metrics) {
            report.prediction_series.push_back(std::move(r.series));
        }
    }
    if (sweep) {
        NoiseTable table;
        table.fractions = cfg.fractions;
        for (auto& r : runs) {
            table.models.push_back(r.clean.model);
            table.rmse.push_back(r.noise_rmse);
        }
        report.sensitivity_table = compute_sensitivity(table);
        report.noise_table = std::move(table);
    }

    auto& prov = report.provenance;
    prov["tool"] = "pvfdi";
    prov["version"] = PVFDI_VERSION;
    prov["mode"] = sweep ? "sweep" : "bench";
    prov["config"] = config_to_json(cfg);
    prov["dataset"] = {{"source", data.source},
                       {"checksum_fnv1a64", data.checksum},
                       {"samples", data.raw_size},
                       {"train_samples", data.train.size()},
                       {"test_samples", data.test.size()}};
    nlohmann::ordered_json norm = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        norm[std::string(kFeatureNames[j])] = {data.stats.features[j].min, data.stats.features[j].max};
    }
    norm[std::string(kPowerColumn)] = {data.stats.power.min, data.stats.power.max};
    prov["normalization"] = std::move(norm);
    if (sweep) {
        nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
        for (const double f : cfg.fractions) {
            nlohmann::ordered_json per = nlohmann::ordered_json::array();
            for (std::size_t r = 0; r < cfg.repeats; ++r) {
                per.push_back(fraction_seed(cfg.noise.seed, f, r));
            }
            seeds.push_back({{"fraction", f}, {"seeds", per}});
        }
        prov["noise_seeds"] = std::move(seeds);
    }
    prov["models"] = std::move(model_diag);
    return report;
}

} // namespace

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    if (cfg.data.path) {
        j["data"] = {{"path", cfg.data.path->string()}};
    } else {
        j["data"] = {{"synth_n", cfg.data.synth_n},
                     {"synth_seed", cfg.data.synth_seed},
                     {"synth_residual_std", cfg.data.synth_residual_std}};
    }
    j["split"] = {{"train_ratio", cfg.split.train_ratio}, {"seed", cfg.split.seed}};
    j["noise"] = {{"mean", cfg.noise.mean},
                  {"std", cfg.noise.std},
                  {"target", std::string(to_string(cfg.noise.target))},
                  {"columns", cfg.noise.columns},
                  {"seed", cfg.noise.seed},
                  {"space", std::string(to_string(cfg.noise_space))},
                  {"fractions", cfg.fractions},
                  {"repeats", cfg.repeats}};
    j["clamp_predictions"] = cfg.clamp_predictions;
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    for (const auto& m : cfg.models) {
        models.push_back(spec_to_json(m));
    }
    j["models"] = std::move(models);
    return j;
}

ExperimentReport run_clean_benchmark(const ExperimentConfig& cfg, const PreparedData& data) {
    return run(cfg, data, false);
}

ExperimentReport run_clean_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();
    return run(cfg, prepare_data(cfg), false);
}

ExperimentReport run_noise_sweep(const ExperimentConfig& cfg, const PreparedData& data) {
    return run(cfg, data, true);
}

ExperimentReport run_noise_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    return run(cfg, prepare_data(cfg), true);
}

} // namespace pvfdi
