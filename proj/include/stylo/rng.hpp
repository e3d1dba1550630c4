#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace stylo {

/// Deterministic PRNG used everywhere randomness is needed.
///
/// The generator is splitmix64 (Steele, Lea & Flood; the stream is fully
/// defined by the three constants below), so shuffles, weight inits and
/// evolutionary runs reproduce bit-identically across platforms and
/// standard-library implementations. std::shuffle and the std distributions
/// are deliberately avoided: their draw sequences are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(next_below(n));
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool next_bool() { return (next_u64() >> 63) != 0; }

private:
    std::uint64_t state_;
};

/// Mixes two seeds into one; used to derive independent streams
/// (per run, per subpopulation) from a single base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    Rng r(base ^ (0x632be59bd9b4e019ull + salt * 0x9e3779b97f4a7c15ull));
    r.next_u64();
    return r.next_u64();
}

/// Fisher-Yates with the fixed generator above.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.index(i)]);
    }
}

} // namespace stylo
