#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "pvfdi/rng.hpp"

using namespace pvfdi;

TEST_CASE("mix64 matches the SplitMix64 reference sequence") {
    // First two outputs of SplitMix64 seeded with 0.
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(mix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("Rng wraps std::mt19937_64 seeded through mix64") {
    Rng r(123);
    std::mt19937_64 ref(mix64(123));
    for (int i = 0; i < 100; ++i) {
        CHECK(r.next_u64() == ref());
    }
}

TEST_CASE("derive_seed separates purposes and roots") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t root : {0ULL, 1ULL, 42ULL}) {
        for (const char* tag : {"split", "noise", "synth", "model:LR", "model:GPR"}) {
            seen.insert(derive_seed(root, tag));
        }
    }
    CHECK(seen.size() == 15);
    CHECK(derive_seed(7, "split") == derive_seed(7, "split"));
}

TEST_CASE("uniform01 stays in [0,1) with mean near one half") {
    Rng r(5);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::fabs(sum / 100000.0 - 0.5) < 0.005);
}

TEST_CASE("below is bounded and hits every residue") {
    Rng r(9);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = r.below(7);
        REQUIRE(v < 7);
        ++hits[v];
    }
    for (int h : hits) {
        CHECK(h > 800);
    }
    CHECK(r.below(1) == 0);
}

TEST_CASE("normal has unit moments") {
    Rng r(11);
    const int n = 200000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.01);
}

TEST_CASE("permutation and sample_indices") {
    Rng r(3);
    auto p = r.permutation(50);
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(50);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    CHECK(p != iota);

    const auto s = r.sample_indices(100, 30);
    CHECK(s.size() == 30);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    CHECK(s.back() < 100);
    CHECK(r.sample_indices(10, 10).size() == 10);
    CHECK(r.sample_indices(10, 0).empty());
}

TEST_CASE("identical seeds give identical streams") {
    Rng a(77);
    Rng b(77);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.normal() == b.normal());
        REQUIRE(a.uniform01() == b.uniform01());
    }
}
