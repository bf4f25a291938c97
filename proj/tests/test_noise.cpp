#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "pvfdi/data.hpp"
#include "pvfdi/error.hpp"
#include "pvfdi/noise.hpp"

using namespace pvfdi;

namespace {

Dataset plain(std::size_t n) {
    return normalize(synth_generate(n, 3)).train;
}

NoiseConfig noise(double fraction, std::uint64_t seed = 1) {
    NoiseConfig c;
    c.fraction = fraction;
    c.seed = seed;
    return c;
}

bool features_equal(const Sample& a, const Sample& b) {
    return a.features == b.features;
}

} // namespace

TEST_CASE("fraction 0 is the identity") {
    const auto d = plain(200);
    const auto r = inject(d, noise(0.0));
    CHECK(r.noisy == d);
    CHECK(r.affected_rows.empty());
}

TEST_CASE("row count follows round-half-up") {
    CHECK(inject(plain(1000), noise(0.1)).affected_rows.size() == 100);
    CHECK(affected_row_count(0.5, 3) == 2);
    CHECK(affected_row_count(0.25, 2) == 1);
    CHECK(affected_row_count(0.1, 14) == 1);
    CHECK(affected_row_count(0.1, 15) == 2);
    CHECK(affected_row_count(1.0, 7) == 7);
    CHECK(affected_row_count(0.0, 7) == 0);
}

TEST_CASE("row count and untouched rows for many fractions") {
    const auto d = plain(333);
    for (double f : {0.0, 0.01, 0.1, 0.333, 0.5, 0.77, 1.0}) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto r = inject(d, noise(f, seed));
            REQUIRE(r.affected_rows.size() == affected_row_count(f, d.size()));
            CHECK(std::is_sorted(r.affected_rows.begin(), r.affected_rows.end()));
            CHECK(std::adjacent_find(r.affected_rows.begin(), r.affected_rows.end()) == r.affected_rows.end());
            std::vector<bool> hit(d.size(), false);
            for (auto i : r.affected_rows) {
                hit[i] = true;
            }
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (!hit[i]) {
                    REQUIRE(r.noisy[i] == d[i]);
                } else {
                    REQUIRE(r.noisy[i].power == d[i].power);
                    REQUIRE_FALSE(features_equal(r.noisy[i], d[i]));
                }
            }
        }
    }
}

TEST_CASE("injection is deterministic; the seed changes values, not counts") {
    const auto d = plain(500);
    const auto a = inject(d, noise(0.5, 10));
    const auto b = inject(d, noise(0.5, 10));
    const auto c = inject(d, noise(0.5, 11));
    CHECK(a.noisy == b.noisy);
    CHECK(a.affected_rows == b.affected_rows);
    CHECK(c.affected_rows.size() == a.affected_rows.size());
    CHECK_FALSE(c.noisy == a.noisy);
}

TEST_CASE("pooled perturbations are standard normal") {
    const auto d = plain(8334); // 100008 feature cells
    const auto r = inject(d, noise(1.0, 77));
    double s = 0.0;
    double s2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const double delta = r.noisy[i].features[j] - d[i].features[j];
            s += delta;
            s2 += delta * delta;
            ++n;
        }
    }
    const double mean = s / static_cast<double>(n);
    const double sd = std::sqrt(s2 / static_cast<double>(n) - mean * mean);
    CHECK(n >= 100000);
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(sd - 1.0) < 0.02);
}

TEST_CASE("mean and std are honoured") {
    const auto d = plain(2000);
    auto cfg = noise(1.0, 5);
    cfg.mean = 3.0;
    cfg.std = 0.5;
    const auto r = inject(d, cfg);
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        s += r.noisy[i].features[0] - d[i].features[0];
    }
    CHECK(std::fabs(s / 2000.0 - 3.0) < 0.05);
    cfg.std = 0.0;
    cfg.mean = 0.0;
    CHECK(inject(d, cfg).noisy == d);
}

TEST_CASE("targets: power, features, both; column subsets") {
    const auto d = plain(100);
    auto cfg = noise(1.0, 2);
    cfg.target = NoiseTarget::Power;
    auto r = inject(d, cfg);
    for (std::size_t i = 0; i < d.size(); ++i) {
        REQUIRE(r.noisy[i].features == d[i].features);
        REQUIRE(r.noisy[i].power != d[i].power);
    }
    cfg.target = NoiseTarget::Features;
    r = inject(d, cfg);
    for (std::size_t i = 0; i < d.size(); ++i) {
        REQUIRE(r.noisy[i].power == d[i].power);
    }
    cfg.target = NoiseTarget::Both;
    r = inject(d, cfg);
    for (std::size_t i = 0; i < d.size(); ++i) {
        REQUIRE(r.noisy[i].power != d[i].power);
        REQUIRE(r.noisy[i].features[5] != d[i].features[5]);
    }
    cfg.target = NoiseTarget::Features;
    cfg.columns = {"ssrd", "tcc"};
    r = inject(d, cfg);
    const auto ssrd = *feature_index("ssrd");
    const auto tcc = *feature_index("tcc");
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            if (j == ssrd || j == tcc) {
                REQUIRE(r.noisy[i].features[j] != d[i].features[j]);
            } else {
                REQUIRE(r.noisy[i].features[j] == d[i].features[j]);
            }
        }
    }
}

TEST_CASE("config validation") {
    auto cfg = noise(1.5);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = noise(-0.1);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = noise(0.5);
    cfg.std = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = noise(0.5);
    cfg.columns = {"irradiance"};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(inject(plain(20), cfg), ConfigError);
}

TEST_CASE("sweep fractions") {
    const auto f = sweep_fractions();
    CHECK(f == std::vector<double>{0.0, 0.1, 0.5, 1.0});
    CHECK(std::adjacent_find(f.begin(), f.end(), std::greater_equal<>()) == f.end());
}

TEST_CASE("target names") {
    CHECK(parse_noise_target("power") == NoiseTarget::Power);
    CHECK(parse_noise_target("both") == NoiseTarget::Both);
    CHECK(to_string(NoiseTarget::Features) == "features");
    CHECK_FALSE(parse_noise_target("labels").has_value());
}
