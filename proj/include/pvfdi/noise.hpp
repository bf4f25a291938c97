#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvfdi/data.hpp"

namespace pvfdi {

enum class NoiseTarget { Features, Power, Both };

std::string_view to_string(NoiseTarget target);
std::optional<NoiseTarget> parse_noise_target(std::string_view text);

/// Gaussian false-data-injection parameters.
struct NoiseConfig {
    double mean = 0.0;
    double std = 1.0;
    double fraction = 0.0;
    NoiseTarget target = NoiseTarget::Features;
    /// Feature names to perturb; empty means all twelve.
    std::vector<std::string> columns;
    std::uint64_t seed = 0;

    /// Throws ConfigError on fraction outside [0,1], negative std or unknown columns.
    void validate() const;
};

struct Injection {
    Dataset noisy;
    std::vector<std::size_t> affected_rows; // ascending
};

/// round(fraction * n) with halves rounded up.
std::size_t affected_row_count(double fraction, std::size_t n);

/**
 * Adds N(mean, std^2) to the targeted cells of a seeded uniform subset of
 * rows. Row selection and noise values come from independent streams derived
 * from cfg.seed; values are drawn row by row, features in schema order, then
 * power. Unselected rows are copied unchanged.
 */
Injection inject(const Dataset& test, const NoiseConfig& cfg);

/// The injected fractions of the robustness study: 0%, 10%, 50%, 100%.
std::vector<double> sweep_fractions();

} // namespace pvfdi
