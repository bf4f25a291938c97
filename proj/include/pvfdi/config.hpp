#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pvfdi/experiment.hpp"

namespace pvfdi {

/**
 * Experiment configuration file: flat `key = value` lines grouped under
 * `[section]` headers, `#` or `;` comments.
 *
 *   [experiment]  seed, models (comma list, run order), clamp_predictions, jobs, out
 *   [data]        path | synth_n, synth_seed, synth_residual_std
 *   [split]       train_ratio, seed
 *   [noise]       mean, std, target (features|power|both), columns, seed,
 *                 space (normalized|raw), fractions, repeats
 *   [LR] [LASSO] [GPR] [KNN] [DT] [GBRT] [SVR] [MLPR]
 *                 that model's hyperparameters, plus an optional seed
 *
 * Precedence is flags, then file, then defaults. Seeds not given explicitly
 * are derived from the root seed.
 */
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> data;
    std::optional<std::filesystem::path> out;
    std::optional<std::vector<double>> fractions;
    std::optional<std::vector<std::string>> models;
    std::optional<NoiseTarget> noise_target;
    std::optional<double> noise_std;
    std::optional<bool> clamp_predictions;
    std::optional<std::size_t> jobs;
    std::optional<std::size_t> repeats;
};

/// Throws ConfigError naming the source line on syntax errors.
std::vector<ConfigEntry> read_config_entries(std::istream& in, const std::string& source);

/// Throws ConfigError naming the offending line and field.
ExperimentConfig build_config(const std::vector<ConfigEntry>& entries, const std::string& source,
                              const ConfigOverrides& overrides = {});

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, const ConfigOverrides& overrides = {});

std::vector<double> parse_fraction_list(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

} // namespace pvfdi
