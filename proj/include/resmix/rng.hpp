#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace resmix {

/// Deterministic Gaussian sampler.
///
/// std::normal_distribution is implementation-defined, so regression tests
/// frozen against its output would not survive a standard-library change.
/// This sampler fixes the algorithm: mt19937 32-bit draws mapped to (0,1)
/// uniforms, combined by the Box-Muller transform.  Given a seed, the output
/// sequence is identical on every platform.
class GaussianRng {
public:
    explicit GaussianRng(std::uint32_t seed) : engine_(seed) {}

    /// One open-interval uniform in (0,1).
    double uniform() {
        return (static_cast<double>(engine_()) + 0.5) / 4294967296.0;
    }

    /// One standard normal draw.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace resmix
