#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace infogeo {

/// Deterministic standard-normal stream.
///
/// The generator is pinned so that a seed reproduces the same values on every
/// platform: uniforms come from std::mt19937_64 (bit-exact by the standard)
/// mapped to (0,1) with 53-bit resolution, and normals from the Box-Muller
/// transform. std::normal_distribution is implementation-defined and is
/// deliberately not used.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    // (0,1): top 53 bits of the draw, with 0 nudged to the smallest step.
    double uniform01() {
        const std::uint64_t bits = engine_() >> 11;
        const double u = static_cast<double>(bits) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace infogeo
