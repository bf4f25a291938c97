#include "pvfdi/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pvfdi/error.hpp"
#include "pvfdi/rng.hpp"

namespace pvfdi {

namespace {

// GEFCom2014 solar files name the ECMWF parameters by code.
constexpr std::array<std::pair<std::string_view, std::string_view>, kFeatureCount> kEcmwfAliases{{
    {"VAR78", "tclw"},
    {"VAR79", "tciw"},
    {"VAR134", "sp"},
    {"VAR157", "rh"},
    {"VAR164", "tcc"},
    {"VAR165", "u10"},
    {"VAR166", "v10"},
    {"VAR167", "t2m"},
    {"VAR169", "ssrd"},
    {"VAR175", "strd"},
    {"VAR178", "tsr"},
    {"VAR228", "tp"},
}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_finite(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

bool is_blank_or_comment(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

ColumnRange range_of(const std::vector<double>& values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi};
}

} // namespace

std::string_view canonical_column_name(std::string_view header_name) {
    for (const auto& [code, canonical] : kEcmwfAliases) {
        if (header_name == code) {
            return canonical;
        }
    }
    return header_name;
}

std::optional<std::size_t> feature_index(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

Dataset::Dataset(std::vector<Sample> samples, std::optional<NormalizationStats> stats)
    : samples_(std::move(samples)), stats_(std::move(stats)) {
    if (samples_.empty()) {
        throw DataError("dataset must not be empty");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        const bool finite = std::isfinite(s.power) &&
                            std::all_of(s.features.begin(), s.features.end(),
                                        [](double v) { return std::isfinite(v); });
        if (!finite) {
            throw DataError("sample " + std::to_string(i) + " holds a non-finite value");
        }
    }
}

Eigen::MatrixXd Dataset::feature_matrix() const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(samples_.size()), static_cast<Eigen::Index>(kFeatureCount));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = samples_[i].features[j];
        }
    }
    return x;
}

Eigen::VectorXd Dataset::targets() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = samples_[i].power;
    }
    return y;
}

std::vector<double> Dataset::powers() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) {
        out.push_back(s.power);
    }
    return out;
}

Dataset parse_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!is_blank_or_comment(line)) {
            have_header = true;
            break;
        }
    }
    if (!have_header) {
        throw EmptyFile(source_name);
    }

    std::map<std::string, std::size_t, std::less<>> header;
    {
        const auto names = split_fields(line);
        for (std::size_t i = 0; i < names.size(); ++i) {
            header.emplace(std::string(canonical_column_name(names[i])), i);
        }
    }
    auto column_of = [&](std::string_view name) {
        const auto it = header.find(name);
        if (it == header.end()) {
            throw MissingColumn(std::string(name));
        }
        return it->second;
    };
    std::array<std::size_t, kFeatureCount> feature_cols{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        feature_cols[j] = column_of(kFeatureNames[j]);
    }
    const std::size_t power_col = column_of(kPowerColumn);
    const auto ts_it = header.find(kTimestampColumn);
    const std::optional<std::size_t> ts_col =
        ts_it == header.end() ? std::nullopt : std::optional<std::size_t>(ts_it->second);

    std::vector<Sample> samples;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (is_blank_or_comment(line)) {
            continue;
        }
        ++row;
        const auto fields = split_fields(line);
        auto numeric = [&](std::size_t col, std::string_view name) {
            const auto v = col < fields.size() ? parse_finite(fields[col]) : std::nullopt;
            if (!v) {
                throw NonNumericCell(row, std::string(name));
            }
            return *v;
        };
        Sample s;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            s.features[j] = numeric(feature_cols[j], kFeatureNames[j]);
        }
        s.power = numeric(power_col, kPowerColumn);
        if (ts_col && *ts_col < fields.size() && !fields[*ts_col].empty()) {
            s.timestamp = std::string(fields[*ts_col]);
        }
        samples.push_back(std::move(s));
    }
    if (samples.empty()) {
        throw EmptyFile(source_name);
    }
    return Dataset(std::move(samples));
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_csv(in, path.string());
}

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

void write_csv(const Dataset& d, std::ostream& out) {
    const bool with_ts = std::any_of(d.samples().begin(), d.samples().end(),
                                     [](const Sample& s) { return s.timestamp.has_value(); });
    if (with_ts) {
        out << kTimestampColumn << ',';
    }
    for (const auto name : kFeatureNames) {
        out << name << ',';
    }
    out << kPowerColumn << '\n';
    for (const auto& s : d.samples()) {
        if (with_ts) {
            out << s.timestamp.value_or("") << ',';
        }
        for (const double v : s.features) {
            out << format_double(v) << ',';
        }
        out << format_double(s.power) << '\n';
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_csv(d, out);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

NormalizationStats fit_normalization(const Dataset& train) {
    NormalizationStats stats;
    std::vector<double> column(train.size());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        for (std::size_t i = 0; i < train.size(); ++i) {
            column[i] = train[i].features[j];
        }
        stats.features[j] = range_of(column);
    }
    stats.power = range_of(train.powers());
    return stats;
}

Dataset apply_normalization(const Dataset& d, const NormalizationStats& stats) {
    std::vector<Sample> out = d.samples();
    for (auto& s : out) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            s.features[j] = stats.features[j].scale(s.features[j]);
        }
        s.power = stats.power.scale(s.power);
    }
    return Dataset(std::move(out), stats);
}

Normalized normalize(const Dataset& train, std::span<const Dataset> others) {
    const auto stats = fit_normalization(train);
    Normalized result{apply_normalization(train, stats), {}};
    result.others.reserve(others.size());
    for (const auto& d : others) {
        result.others.push_back(apply_normalization(d, stats));
    }
    return result;
}

Split split(const Dataset& d, const SplitConfig& cfg) {
    if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0)) {
        throw ConfigError("train_ratio must lie in (0,1), got " + format_double(cfg.train_ratio));
    }
    const std::size_t n = d.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.train_ratio));
    if (n_train == 0 || n_train == n) {
        throw DatasetTooSmall("split of " + std::to_string(n) + " samples at ratio " +
                              format_double(cfg.train_ratio) + " leaves one side empty");
    }
    Rng rng(cfg.seed);
    const auto perm = rng.permutation(n);
    std::vector<Sample> train;
    std::vector<Sample> test;
    train.reserve(n_train);
    test.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? train : test).push_back(d[perm[i]]);
    }
    return {Dataset(std::move(train), d.normalization_stats()), Dataset(std::move(test), d.normalization_stats())};
}

Dataset synth_generate(std::size_t n, std::uint64_t seed, const SynthOptions& options) {
    if (n < 10) {
        throw InvalidCount("synthetic dataset needs n >= 10, got " + std::to_string(n));
    }
    Rng rng(seed);
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    std::vector<Sample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Roughly 40% of hours are night.
        const double phase = rng.uniform01();
        const double sun = phase < 0.4 ? 0.0 : std::sin(3.14159265358979323846 * (phase - 0.4) / 0.6);
        const double cloud = rng.uniform01();

        FeatureVector unit{};
        unit[4] = cloud;                                                     // tcc
        unit[0] = cloud * rng.uniform(0.2, 1.0);                             // tclw
        unit[1] = cloud * rng.uniform(0.0, 0.6);                             // tciw
        unit[2] = rng.uniform01();                                           // sp
        unit[3] = clamp01(0.35 + 0.45 * cloud - 0.2 * sun + 0.1 * rng.normal()); // rh
        unit[5] = rng.uniform01();                                           // u10
        unit[6] = rng.uniform01();                                           // v10
        unit[7] = clamp01(0.3 + 0.4 * sun + 0.25 * rng.uniform01());         // t2m
        unit[8] = sun * (1.0 - 0.6 * cloud) * rng.uniform(0.9, 1.0);         // ssrd
        unit[9] = clamp01(0.2 + 0.5 * cloud + 0.3 * unit[7] * rng.uniform01()); // strd
        unit[10] = sun * (1.0 - 0.4 * cloud);                                // tsr
        unit[11] = cloud * cloud * rng.uniform01();                          // tp

        const double residual = rng.normal();
        Sample s;
        s.power = clamp01(kSynthSsrdWeight * unit[8] + kSynthTsrWeight * unit[10] -
                          kSynthCloudWeight * unit[4] + options.residual_std * residual);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const auto& r = kSynthRanges[j];
            s.features[j] = r.min + unit[j] * (r.max - r.min);
        }
        samples.push_back(std::move(s));
    }
    return Dataset(std::move(samples));
}

std::string dataset_checksum(const Dataset& d) {
    std::ostringstream os;
    write_csv(d, os);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return buf.data();
}

double mean_predictor_rmse(std::span<const double> train_targets, std::span<const double> test_targets) {
    if (train_targets.empty() || test_targets.empty()) {
        throw EmptySeries();
    }
    double mean = 0.0;
    for (const double y : train_targets) {
        mean += y;
    }
    mean /= static_cast<double>(train_targets.size());
    double sse = 0.0;
    for (const double y : test_targets) {
        sse += (y - mean) * (y - mean);
    }
    return std::sqrt(sse / static_cast<double>(test_targets.size()));
}

} // namespace pvfdi
