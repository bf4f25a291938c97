#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pvfdi {

/// SplitMix64 finalizer. Used to decorrelate seeds before they reach a stream.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Hash-combines a root seed with a purpose tag ("split", "noise", ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt) noexcept;

/**
 * Portable random stream.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. The distribution layer is implemented here rather than taken from
 * <random> because the standard distributions are implementation-defined:
 *  - uniform01: top 53 bits of one draw, scaled by 2^-53;
 *  - below(n): rejection sampling on the largest multiple of n;
 *  - normal: Box-Muller on two uniform01 draws, both outputs used in order.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::uint64_t below(std::uint64_t n);
    double normal();
    double normal(double mean, double std) { return mean + std * normal(); }

    /// Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

    /// k distinct indices from 0..n-1, sorted ascending.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace pvfdi
