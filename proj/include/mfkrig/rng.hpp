#ifndef MFKRIG_RNG_HPP
#define MFKRIG_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace mfkrig {

/// splitmix64 mixing step; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a substream seed from a root seed, a fixed label and an index.
/// All randomness in the toolkit flows from one explicit root seed;
/// subcomponents use labeled substreams ("fit", "split", "noise", "mc", "ig")
/// so that, e.g., changing the Monte Carlo budget does not perturb a split.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view label,
                                   std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(seed ^ mix64(h) ^ mix64(index * 0x9e3779b97f4a7c15ULL + 1));
}

/// Deterministic random stream. Uniform doubles are produced from raw 64-bit
/// words (not std::uniform_real_distribution) so the stream is pinned by this
/// code alone, not by the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n >= 1. Modulo bias is irrelevant at the
    /// sizes used here (n << 2^32).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    /// Fisher-Yates shuffle of indices [0, n); deterministic given the stream.
    template <typename IndexVec>
    void shuffle(IndexVec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace mfkrig

#endif  // MFKRIG_RNG_HPP
