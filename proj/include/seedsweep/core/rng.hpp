#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace seedsweep {

/// One step of the splitmix64 generator; advances `state` and returns the
/// mixed output.
std::uint64_t splitmix64_next(std::uint64_t& state) noexcept;

/// Box-Muller transform. `u1` is a draw from [0,1) and is remapped to (0,1]
/// as 1 - u1 before taking the logarithm. Returns (cosine, sine) partners.
std::pair<double, double> box_muller(double u1, double u2) noexcept;

/// Maps a raw 64-bit output to [0,1) using its top 53 bits.
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/**
 * Seed-determined pseudo-random stream (xoshiro256++).
 *
 * The 256-bit state is filled with four consecutive splitmix64 outputs of the
 * seed, so the whole output sequence is a pure function of the seed and is
 * reproducible across platforms and implementations. A stream has a single
 * owner; it may be moved between threads but must not be shared.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0,1): (next >> 11) * 2^-53.
    double uniform01() noexcept { return to_unit_interval(next_u64()); }

    /// Standard normal by Box-Muller. Draws come in pairs; the sine partner
    /// is cached and returned by the following call.
    double normal() noexcept;

    /// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the power boost.
    double gamma(double shape);

    /// Uniform index in [0, n): floor(uniform01() * n).
    std::size_t below(std::size_t n) noexcept;

    /// Fisher-Yates from the last position down; j = floor(u * (i + 1)).
    template <class T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i-- > 1;) {
            const std::size_t j = below(i + 1);
            using std::swap;
            swap(items[i], items[j]);
        }
    }

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace seedsweep
