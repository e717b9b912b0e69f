#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace gelulab {

// SplitMix64 (Steele, Lea & Flood). A 64-bit counter generator:
//
//   state  <- state + 0x9E3779B97F4A7C15          (Weyl increment)
//   z      <- state
//   z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output <- z ^ (z >> 31)
//
// Chosen over std::mt19937_64 because the whole update fits in five lines,
// seeding is trivial, and the stream is bit-reproducible from the seed with
// no library-dependent distribution code in between. Independent streams are
// derived by split(): the child is seeded with the parent's next output.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Uses two uniforms per draw; the
    // second transform output is deliberately not cached so the mapping
    // from stream position to value stays stateless.
    double next_normal() {
        const double u1 = next_double_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, bound). Modulo bias is < bound / 2^64.
    std::uint64_t next_below(std::uint64_t bound) {
        return next_u64() % bound;
    }

    SplitMix64 split() { return SplitMix64(next_u64()); }

private:
    std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by the given stream.
template <typename T>
void fisher_yates_shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace gelulab
