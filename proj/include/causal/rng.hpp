#pragma once

#include <cmath>
#include <cstdint>

namespace causal {

// Counter-based generator built on the splitmix64 finalizer. Each sample row
// gets its own stream keyed by (seed, row): draw j of row i is
// mix(mix(seed ^ GOLDEN*(i+1)) + GOLDEN*(j+1)), so row i's values never depend
// on how many rows are drawn in total and any row can be generated in isolation.
class RowRng {
public:
    RowRng(std::uint64_t seed, std::uint64_t row)
        : base_(mix(seed ^ (kGolden * (row + 1)))), draw_(0) {}

    std::uint64_t next_u64() { return mix(base_ + kGolden * (++draw_)); }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the pair is cached so draws stay aligned.
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();  // log(0) guard; astronomically rare
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * kPi * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr double kPi = 3.14159265358979323846;

    std::uint64_t base_;
    std::uint64_t draw_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace causal
