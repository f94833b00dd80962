#pragma once

#include <cmath>
#include <cstdint>

namespace latmin {

// Counter-based 64-bit generator (SplitMix64 output function applied to
// seed-mixed counter). Gaussians via Box-Muller. Chosen over std::mt19937 so
// that streams are reproducible across platforms and cheap to split: a
// (seed, stream) pair fully determines the sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform on (0,1), endpoints excluded
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double c = std::cos(6.283185307179586476925286766559 * u2);
        const double s = std::sin(6.283185307179586476925286766559 * u2);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

    static constexpr const char* gaussian_method() { return "box-muller/splitmix64"; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace latmin
