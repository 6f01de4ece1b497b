#pragma once

#include <cstdint>
#include <random>

namespace ompath {

/// splitmix64 step. Advances the state and returns the next output word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed-splitting rule used everywhere a substream is needed: substream k of
/// base seed s is splitmix64 iterated twice from s XOR (k+1) * golden ratio.
/// The rule is pure, so any (seed, stream) pair names the same stream on every
/// run, independent of call order or thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t state = base ^ ((stream + 1) * 0x9E3779B97F4A7C15ull);
    splitmix64(state);
    return splitmix64(state);
}

inline std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t stream) {
    return std::mt19937_64(derive_seed(base, stream));
}

}  // namespace ompath
