#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

namespace defect_reasoner {

// Shortest decimal string that round-trips to the same double.
// Used everywhere a number ends up in a file so that artifacts are
// byte-identical across runs.
std::string format_double(double value);

// Fixed-point formatting, e.g. format_fixed(0.5, 2) -> "0.50".
std::string format_fixed(double value, int decimals);

// SplitMix64 finaliser. Stateless, well distributed, stable across platforms.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-subtask seed derived from a run seed and an index.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

// Unbiased integer in [0, n). Rejection sampling on top of mt19937_64 so the
// result does not depend on the standard library's distribution internals.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Uniform double in [0, 1) built from the top 53 bits of the generator.
double uniform_unit(std::mt19937_64& rng);

// Write-temp-then-rename so readers never observe a half-written file.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// Run fn(0..count-1) on up to `jobs` threads. Work items must be independent;
// callers that need deterministic output should write results into
// preallocated slots keyed by index.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

} // namespace defect_reasoner
