#include "defect_reasoner/util.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>

using namespace defect_reasoner;

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(254.0) == "254");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");

    std::mt19937_64 rng(1);
    for (int round = 0; round < 2000; ++round) {
        const double x = (uniform_unit(rng) - 0.5) * 1e6;
        REQUIRE(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("format_fixed pins the decimal count") {
    CHECK(format_fixed(100.0, 2) == "100.00");
    CHECK(format_fixed(0.735, 2) == "0.73"); // 0.735 is just below .735 in binary
    CHECK(format_fixed(2.5, 3) == "2.500");
    CHECK(format_fixed(-1.25, 1) == "-1.2");
}

TEST_CASE("derive_seed spreads indices and is stable") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        seen.insert(derive_seed(42, i));
    }
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(42, 7) == derive_seed(42, 7));
    CHECK(derive_seed(42, 7) != derive_seed(43, 7));
}

TEST_CASE("uniform_index stays in range and covers it") {
    std::mt19937_64 rng(9);
    std::set<std::size_t> seen;
    for (int round = 0; round < 2000; ++round) {
        const std::size_t v = uniform_index(rng, 7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS(uniform_index(rng, 0));
}

TEST_CASE("atomic_write_file creates parents and leaves no temp files") {
    const auto dir = testutil::fresh_dir("util_atomic");
    const auto path = dir / "a" / "b" / "file.txt";
    atomic_write_file(path, "hello\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), {});
    CHECK(content == "hello\n");
    std::size_t entries = 0;
    for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
        (void)entry;
        ++entries;
    }
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
    std::vector<std::atomic<int>> hits(500);
    parallel_for(500, 8, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) {
        REQUIRE(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
}
