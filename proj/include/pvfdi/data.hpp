#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pvfdi {

inline constexpr std::size_t kFeatureCount = 12;

/// ECMWF weather variables, in schema order.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "tclw", // total column liquid water, kg m^-2
    "tciw", // total column ice water, kg m^-2
    "sp",   // surface pressure, Pa
    "rh",   // relative humidity, %
    "tcc",  // total cloud cover, 0-1
    "u10",  // 10 m U wind, m s^-1
    "v10",  // 10 m V wind, m s^-1
    "t2m",  // 2 m temperature, K
    "ssrd", // surface solar radiation down, J m^-2
    "strd", // surface thermal radiation down, J m^-2
    "tsr",  // top net solar radiation, J m^-2
    "tp",   // total precipitation, m
};

inline constexpr std::string_view kPowerColumn = "POWER";
inline constexpr std::string_view kTimestampColumn = "TIMESTAMP";

/// Maps GEFCom2014 ECMWF codes (VAR78, ...) to schema names; other names pass through.
std::string_view canonical_column_name(std::string_view header_name);

/// Index of a feature name in kFeatureNames, if it is one.
std::optional<std::size_t> feature_index(std::string_view name);

using FeatureVector = std::array<double, kFeatureCount>;

struct Sample {
    FeatureVector features{};
    double power = 0.0;
    std::optional<std::string> timestamp;

    bool operator==(const Sample&) const = default;
};

struct ColumnRange {
    double min = 0.0;
    double max = 0.0;

    /// (x - min) / (max - min); a constant column maps every value to 0.
    double scale(double x) const noexcept { return max > min ? (x - min) / (max - min) : 0.0; }

    bool operator==(const ColumnRange&) const = default;
};

struct NormalizationStats {
    std::array<ColumnRange, kFeatureCount> features{};
    ColumnRange power;

    bool operator==(const NormalizationStats&) const = default;
};

/// Non-empty, immutable collection of samples.
class Dataset {
public:
    /// Throws DataError when `samples` is empty or holds a non-finite value.
    explicit Dataset(std::vector<Sample> samples, std::optional<NormalizationStats> stats = std::nullopt);

    const std::vector<Sample>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    const std::optional<NormalizationStats>& normalization_stats() const noexcept { return stats_; }

    Eigen::MatrixXd feature_matrix() const;
    Eigen::VectorXd targets() const;
    std::vector<double> powers() const;

    bool operator==(const Dataset&) const = default;

private:
    std::vector<Sample> samples_;
    std::optional<NormalizationStats> stats_;
};

struct SplitConfig {
    double train_ratio = 0.8;
    std::uint64_t seed = 0;
};

/**
 * Reads the comma-separated schema: mandatory header naming the twelve feature
 * columns and POWER, optional TIMESTAMP. Column order is free, unknown columns
 * are ignored, lines starting with '#' are comments. GEFCom2014 ECMWF codes
 * (VAR78, VAR79, ...) are accepted as aliases of the feature names.
 */
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in, const std::string& source_name = "<stream>");

/// Writes in schema order with shortest round-trip decimal formatting.
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

NormalizationStats fit_normalization(const Dataset& train);
Dataset apply_normalization(const Dataset& d, const NormalizationStats& stats);

struct Normalized {
    Dataset train;
    std::vector<Dataset> others;
};

/// Min-max scaling of all thirteen numeric columns with statistics from `train` only.
/// Values outside the training range are not clipped.
Normalized normalize(const Dataset& train, std::span<const Dataset> others = {});

struct Split {
    Dataset train;
    Dataset test;
};

/// Seeded shuffle; the first floor(n * train_ratio) shuffled samples become train.
Split split(const Dataset& d, const SplitConfig& cfg);

struct SynthOptions {
    double residual_std = 0.03;
};

/// Fixed coefficients of the synthetic power response.
inline constexpr double kSynthSsrdWeight = 0.7;
inline constexpr double kSynthTsrWeight = 0.35;
inline constexpr double kSynthCloudWeight = 0.1;

/// Physical range [lo, hi] each synthetic feature is drawn in.
inline constexpr std::array<ColumnRange, kFeatureCount> kSynthRanges{{
    {0.0, 2.0},           // tclw
    {0.0, 0.5},           // tciw
    {95000.0, 103000.0},  // sp
    {10.0, 100.0},        // rh
    {0.0, 1.0},           // tcc
    {-12.0, 12.0},        // u10
    {-12.0, 12.0},        // v10
    {260.0, 310.0},       // t2m
    {0.0, 3.6e6},         // ssrd
    {0.8e6, 1.6e6},       // strd
    {0.0, 4.0e6},         // tsr
    {0.0, 0.005},         // tp
}};

/**
 * Deterministic desk-scale dataset. Two latent drivers (sun, cloud) generate
 * correlated weather features in [0,1], which are then mapped onto
 * kSynthRanges. Power is
 *   clamp01(0.7 ssrd' + 0.35 tsr' - 0.1 tcc' + residual_std * N(0,1))
 * where primes are the [0,1]-scaled values. Throws InvalidCount if n < 10.
 */
Dataset synth_generate(std::size_t n, std::uint64_t seed, const SynthOptions& options = {});

/// FNV-1a 64 over the canonical CSV serialization, as 16 hex digits.
std::string dataset_checksum(const Dataset& d);

/// RMSE of predicting mean(train_targets) for every test target.
double mean_predictor_rmse(std::span<const double> train_targets, std::span<const double> test_targets);

} // namespace pvfdi
