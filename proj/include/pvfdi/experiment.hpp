#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvfdi/data.hpp"
#include "pvfdi/metrics.hpp"
#include "pvfdi/noise.hpp"
#include "pvfdi/regressors.hpp"

namespace pvfdi {

/// Where the raw dataset comes from: a CSV file, or the synthetic generator.
struct DataSource {
    std::optional<std::filesystem::path> path;
    std::size_t synth_n = 10000;
    std::uint64_t synth_seed = 42;
    double synth_residual_std = SynthOptions{}.residual_std;
};

/// Whether noise is added to normalized test features or to raw values
/// before the training normalization is applied.
enum class NoiseSpace { Normalized, Raw };

std::string_view to_string(NoiseSpace space);
std::optional<NoiseSpace> parse_noise_space(std::string_view text);

struct ExperimentConfig {
    std::uint64_t seed = 42;
    DataSource data;
    SplitConfig split;
    std::vector<ModelSpec> models;
    /// Template; fraction and seed are set per sweep point.
    NoiseConfig noise;
    NoiseSpace noise_space = NoiseSpace::Normalized;
    std::vector<double> fractions = sweep_fractions();
    std::size_t repeats = 1;
    bool clamp_predictions = false;
    std::size_t jobs = 1;
    std::filesystem::path output_dir = "out";

    /// All eight model kinds with default hyperparameters; every per-purpose
    /// seed derived from `root_seed`, synth_seed equal to it.
    static ExperimentConfig defaults(std::uint64_t root_seed = 42);

    /// Re-derives the split, noise and model seeds from `root_seed`.
    void reseed(std::uint64_t root_seed);

    /// Throws ConfigError: no models, duplicate model names, fractions outside
    /// [0,1] or not starting with 0, repeats or jobs of zero.
    void validate() const;
};

/// Seed of the noise draw for one (fraction, repeat) point.
std::uint64_t fraction_seed(std::uint64_t noise_seed, double fraction, std::size_t repeat);

struct PreparedData {
    std::string source;
    std::string checksum; // of the raw dataset
    std::size_t raw_size = 0;
    Dataset train_raw;
    Dataset test_raw;
    NormalizationStats stats;
    Dataset train;
    Dataset test;
};

/// Loads (or synthesizes), splits, then min-max normalizes on the training part.
PreparedData prepare_data(const ExperimentConfig& cfg);
PreparedData prepare_data(const ExperimentConfig& cfg, const Dataset& raw, std::string source);

struct CleanRow {
    std::string model;
    std::optional<MetricTriple> metrics; // empty when the model failed
    std::string error;
};

struct NoiseTable {
    std::vector<double> fractions;
    std::vector<std::string> models;
    std::vector<std::vector<double>> rmse; // [model][fraction]; NaN for failed models
};

struct SensitivityTable {
    std::vector<double> fractions; // the non-zero fractions
    std::vector<std::string> models;
    std::vector<std::vector<double>> percent; // [model][fraction]

    /// "0% vs. 10%", ...
    std::vector<std::string> labels() const;
};

struct PredictionSeries {
    std::string model;
    EvaluationSeries clean;
    std::optional<EvaluationSeries> noisy; // at the largest fraction, repeat 0
};

struct ExperimentReport {
    std::vector<CleanRow> clean_table;
    std::optional<NoiseTable> noise_table;
    std::optional<SensitivityTable> sensitivity_table;
    std::vector<PredictionSeries> prediction_series;
    nlohmann::ordered_json provenance;

    bool any_model_failed() const;
};

/// "10%" for 0.1.
std::string percent_label(double fraction);

/**
 * Percent RMSE change of every non-zero fraction against the 0.0 column.
 * Throws DataError if there is no 0.0 column and ZeroBaseline for a zero
 * baseline. Rows of failed models (NaN) stay NaN.
 */
SensitivityTable compute_sensitivity(const NoiseTable& noise);

/// Fits every model on the clean training set and evaluates it on the clean test set.
ExperimentReport run_clean_benchmark(const ExperimentConfig& cfg, const PreparedData& data);
ExperimentReport run_clean_benchmark(const ExperimentConfig& cfg);

/// Clean benchmark plus the noise sweep: models are fitted once and
/// re-evaluated on each injected copy of the test set.
ExperimentReport run_noise_sweep(const ExperimentConfig& cfg, const PreparedData& data);
ExperimentReport run_noise_sweep(const ExperimentConfig& cfg);

/// Effective configuration as written into the provenance block.
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

struct EmitResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> notices;
};

/**
 * Writes clean_metrics.csv, noise_rmse.csv, sensitivity.csv, provenance.json
 * and report.txt into `dir`. Sweep files are skipped with a notice when the
 * report has no noise table. Output bytes depend only on the report.
 */
EmitResult emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// series/<model>_clean.csv and series/<model>_noisy.csv with columns index,actual,predicted.
EmitResult emit_plot_series(const ExperimentReport& report, const std::filesystem::path& dir);

/// Aligned human-readable rendering of the three tables.
std::string render_text_report(const ExperimentReport& report);

std::vector<CleanRow> read_clean_csv(const std::filesystem::path& path);
NoiseTable read_noise_csv(const std::filesystem::path& path);
SensitivityTable read_sensitivity_csv(const std::filesystem::path& path);

} // namespace pvfdi
