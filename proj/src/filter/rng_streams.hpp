#pragma once

#include <cstdint>
#include <random>

namespace seirdmon {

enum class StreamPurpose : std::uint64_t {
    Init = 1,
    Augment = 2,
    Resample = 3,
    Predictive = 4,
    Simulate = 5,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::int64_t day, StreamPurpose purpose,
                                    std::uint64_t index) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ static_cast<std::uint64_t>(day));
    h = mix64(h ^ static_cast<std::uint64_t>(purpose));
    return mix64(h ^ index);
}

// Every (day, purpose, index) triple gets an independent engine, so drawing
// order across workers never changes results.
inline std::mt19937_64 make_stream(std::uint64_t master, std::int64_t day, StreamPurpose purpose,
                                   std::uint64_t index = 0) {
    return std::mt19937_64(stream_seed(master, day, purpose, index));
}

}  // namespace seirdmon
