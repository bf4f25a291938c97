#include "pvfdi/noise.hpp"

#include <cmath>

#include "pvfdi/error.hpp"
#include "pvfdi/rng.hpp"

namespace pvfdi {

std::string_view to_string(NoiseTarget target) {
    switch (target) {
    case NoiseTarget::Features: return "features";
    case NoiseTarget::Power: return "power";
    case NoiseTarget::Both: return "both";
    }
    return "features";
}

std::optional<NoiseTarget> parse_noise_target(std::string_view text) {
    if (text == "features") {
        return NoiseTarget::Features;
    }
    if (text == "power") {
        return NoiseTarget::Power;
    }
    if (text == "both") {
        return NoiseTarget::Both;
    }
    return std::nullopt;
}

void NoiseConfig::validate() const {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw ConfigError("noise fraction must lie in [0,1], got " + format_double(fraction));
    }
    if (!(std >= 0.0) || !std::isfinite(std) || !std::isfinite(mean)) {
        throw ConfigError("noise std must be finite and >= 0");
    }
    for (const auto& c : columns) {
        if (!feature_index(c)) {
            throw ConfigError("unknown noise column '" + c + "'");
        }
    }
}

std::size_t affected_row_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

Injection inject(const Dataset& test, const NoiseConfig& cfg) {
    cfg.validate();
    std::array<bool, kFeatureCount> feature_mask{};
    const bool features = cfg.target != NoiseTarget::Power;
    const bool power = cfg.target != NoiseTarget::Features;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        feature_mask[j] = features && cfg.columns.empty();
    }
    if (features) {
        for (const auto& c : cfg.columns) {
            feature_mask[*feature_index(c)] = true;
        }
    }

    const std::size_t n = test.size();
    Rng row_rng(derive_seed(cfg.seed, "noise-rows"));
    Rng value_rng(derive_seed(cfg.seed, "noise-values"));
    auto rows = row_rng.sample_indices(n, affected_row_count(cfg.fraction, n));

    std::vector<Sample> samples = test.samples();
    for (const auto r : rows) {
        auto& s = samples[r];
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            if (feature_mask[j]) {
                s.features[j] += value_rng.normal(cfg.mean, cfg.std);
            }
        }
        if (power) {
            s.power += value_rng.normal(cfg.mean, cfg.std);
        }
    }
    return {Dataset(std::move(samples), test.normalization_stats()), std::move(rows)};
}

std::vector<double> sweep_fractions() {
    return {0.0, 0.1, 0.5, 1.0};
}

} // namespace pvfdi
