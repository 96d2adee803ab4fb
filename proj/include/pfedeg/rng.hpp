#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <vector>

namespace pfedeg {

/// Named random streams. Every random draw in the system comes from an Rng
/// seeded by derive_seed(master, stream, a, b), so changing how one subsystem
/// consumes randomness never perturbs another.
enum class Stream : std::uint64_t {
    Init = 1,       // per-client embedding initialization   (a = client)
    Select = 2,     // client selection                      (b = round)
    LocalTrain = 3, // batch shuffling + negative sampling   (a = client, b = round)
    Synth = 4,      // synthetic dataset generation
    Test = 5,       // unit/property test fixtures
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace detail

/// Counter-based seed expansion: mixes (stream, a, b) into the master seed.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
    std::uint64_t s = master;
    s ^= detail::splitmix64(s) + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(stream);
    s ^= detail::splitmix64(s) + 0x9e3779b97f4a7c15ULL * (a + 1);
    s ^= detail::splitmix64(s) + 0xc2b2ae3d27d4eb4fULL * (b + 1);
    return detail::splitmix64(s);
}

/// xoshiro256++ with hand-rolled distributions. std::<distribution>s are
/// implementation-defined, which would tie dataset bytes to the standard
/// library version; these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Unbiased integer in [0, bound) via rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal (Box-Muller, pair cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_[4] = {};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace pfedeg
