#pragma once

#include <cstdint>
#include <random>

namespace tdoamap {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of stream `index` derived from `master`:
//   mix(master, index) = splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15))
// Streams depend only on (master, index), never on scheduling.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Portable random stream.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard.
/// The std distributions are implementation-defined, so uniform and normal
/// variates are derived here from raw engine words to keep runs bit-identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept;

    // Uniform in [lo, hi]. Returns lo when lo == hi.
    double uniform(double lo, double hi) noexcept;

    // Standard normal via Box-Muller (one variate cached).
    double normal() noexcept;

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace tdoamap
