#include "doctest.h"

#include <set>

#include "cfaudit/rng.hpp"

using namespace cfaudit;

TEST_CASE("rng streams are reproducible and seed-dependent") {
    Rng a(42);
    Rng b(42);
    Rng c(43);
    bool all_equal = true;
    bool any_diff_from_c = false;
    for (int i = 0; i < 1000; ++i) {
        const uint64_t va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff_from_c = any_diff_from_c || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff_from_c);
}

TEST_CASE("splitmix64 reference values") {
    // First outputs for seed 1234567, cross-checked against the published
    // reference implementation of the recurrence.
    Rng rng(1234567);
    CHECK(rng.next_u64() == 6457827717110365317ULL);
    CHECK(rng.next_u64() == 3203168211198807973ULL);
}

TEST_CASE("uniform_index stays in range and covers values") {
    Rng rng(7);
    std::set<size_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const size_t v = rng.uniform_index(10);
        CHECK(v < 10);
        seen.insert(v);
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("uniform_real lies in [0,1)") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform_real();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("sample_distinct draws k distinct indices") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto picks = rng.sample_distinct(8, 3);
        CHECK(picks.size() == 3);
        std::set<size_t> uniq(picks.begin(), picks.end());
        CHECK(uniq.size() == 3);
        for (size_t p : picks) CHECK(p < 8);
    }
}

TEST_CASE("derive_seed separates streams") {
    const uint64_t a = derive_seed(42, 0);
    const uint64_t b = derive_seed(42, 1);
    const uint64_t c = derive_seed(43, 0);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(derive_seed(42, 0) == a);
}
