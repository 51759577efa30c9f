#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace simwt {

// Counter-based pseudorandom stream built on the splitmix64 update: every
// output is a mix of an incrementing 64-bit counter, so a stream is a pure
// function of its key and results never depend on thread scheduling.
//
// derive() folds a path of identifiers (cell index, replicate, subgroup, ...)
// into the key, giving each work item an independent reproducible stream.
//
// Normal deviates use the Box-Muller transform on 53-bit uniforms; the second
// deviate of each pair is cached.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : state_(key) {}

    static std::uint64_t derive_key(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) {
        std::uint64_t h = root;
        for (std::uint64_t id : path) {
            h = mix((h ^ mix(id + 0x9E3779B97F4A7C15ull)) + 0x9E3779B97F4A7C15ull);
        }
        return h;
    }

    static RandomStream derive(std::uint64_t root,
                               std::initializer_list<std::uint64_t> path) {
        return RandomStream(derive_key(root, path));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal deviate.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // avoid log(0)
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased uniform integer in [0, n), n >= 1 (Lemire rejection).
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace simwt
