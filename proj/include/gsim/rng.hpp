#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace gsim::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele/Lea/Flood via Vigna).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent stream key from a parent key and a tag.
// Pure function: the same (key, tag) always yields the same child key.
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t tag) {
    return mix64(key + kGolden * (tag + 1));
}

inline double to_unit_double(std::uint64_t x) {
    // [0, 1) with 53 random bits
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Counter-based generator: output i of a stream is a pure function of
// (key, i), so streams may be evaluated out of order or in parallel.
class Counter {
  public:
    explicit Counter(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() { return mix64(state_ += kGolden); }

    // uniform in [0, 1)
    double next_double() { return to_unit_double(next_u64()); }

    // uniform in (0, 1]
    double next_open() { return 1.0 - next_double(); }

    double next_exponential(double mean) { return -mean * std::log(next_open()); }

    // standard normal, Box-Muller
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(next_open()));
        const double phi = 6.283185307179586476925286766559 * next_double();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    // complex circular Gaussian with <|z|^2> = 1
    std::complex<double> next_circular_gaussian() {
        const double s = 0.70710678118654752440;  // 1/sqrt(2)
        return {s * next_normal(), s * next_normal()};
    }

    // Exact Poisson draw. Knuth's product method underflows for large
    // means, so large means are split into exact chunks (Poisson additivity).
    int next_poisson(double mean) {
        int total = 0;
        while (mean > 30.0) {
            total += poisson_knuth(30.0);
            mean -= 30.0;
        }
        return total + poisson_knuth(mean);
    }

  private:
    int poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stateless per-sample draw: complex circular Gaussian keyed by
// (master_seed, frame_index, sample_index). Order-independent.
inline std::complex<double> circular_gaussian_at(std::uint64_t master_seed,
                                                 std::uint64_t frame_index,
                                                 std::uint64_t sample_index) {
    const std::uint64_t key = derive_key(derive_key(master_seed, frame_index), sample_index);
    const double u1 = 1.0 - to_unit_double(mix64(key + kGolden));
    const double u2 = to_unit_double(mix64(key + 2 * kGolden));
    const double r = std::sqrt(-std::log(u1));  // <|z|^2> = 1
    const double phi = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace gsim::rng
