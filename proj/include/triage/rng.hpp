#pragma once

#include <cstdint>
#include <random>

namespace triage {

/// splitmix64 step; used for deriving per-stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from (seed, stream index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(state);
}

/// Seeded generator with portable output. The engine sequence is fixed by the
/// standard; the double conversion avoids std::uniform_real_distribution,
/// whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, bound); bound must be > 0.
    std::size_t uniform_index(std::size_t bound) {
        // multiply-high mapping of a 64-bit draw onto [0, bound)
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    /// In-place Fisher-Yates shuffle (platform-independent, unlike std::shuffle).
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace triage
