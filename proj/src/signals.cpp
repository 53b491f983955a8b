#include "resmix/signals.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>

#include "resmix/errors.hpp"

namespace resmix::signals {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wrapped cycle fraction in [0,1) for phase theta (radians).
double cycle_fraction(double theta) {
    double u = theta / kTwoPi;
    u -= std::floor(u);
    return u;
}

/// Converts a positive decimal value to an integer scaled by 10^9.
/// Rejects values that are not decimal rationals at that resolution.
std::uint64_t scaled_decimal(double value, const char* which) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ArgumentError(std::string("ratio_repetend_length: ") + which + " must be a positive finite frequency");
    }
    if (value > 1e9) {
        throw ArgumentError(std::string("ratio_repetend_length: ") + which + " is too large to reduce exactly");
    }
    const double scaled = value * 1e9;
    const double rounded = std::nearbyint(scaled);
    if (std::abs(scaled - rounded) > 1e-3) {
        throw ArgumentError(std::string("ratio_repetend_length: ") + which +
                            " is not representable as a decimal rational (max 9 fractional digits)");
    }
    return static_cast<std::uint64_t>(rounded);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

}  // namespace

const char* waveform_name(Waveform w) {
    switch (w) {
        case Waveform::Sine: return "sine";
        case Waveform::Triangle: return "triangle";
        case Waveform::Square: return "square";
    }
    return "unknown";
}

Waveform waveform_from_name(const std::string& name) {
    if (name == "sine") return Waveform::Sine;
    if (name == "triangle") return Waveform::Triangle;
    if (name == "square") return Waveform::Square;
    throw ArgumentError("unknown waveform shape: '" + name + "' (expected sine, triangle or square)");
}

TimeSeries synthesize(const WaveformSpec& spec, double dt, std::size_t count) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ArgumentError("synthesize: dt must be positive and finite");
    }
    if (count < 2) {
        throw ArgumentError("synthesize: at least two samples required");
    }
    if (!(spec.frequency_hz > 0.0) || !std::isfinite(spec.frequency_hz)) {
        throw ArgumentError("synthesize: frequency must be positive and finite");
    }
    if (spec.amplitude_pp < 0.0 || !std::isfinite(spec.amplitude_pp)) {
        throw ArgumentError("synthesize: peak-to-peak amplitude must be non-negative and finite");
    }
    if (!std::isfinite(spec.phase_rad) || !std::isfinite(spec.dc_offset)) {
        throw ArgumentError("synthesize: phase and offset must be finite");
    }

    const double amp = spec.amplitude_pp / 2.0;
    TimeSeries out;
    out.dt = dt;
    out.samples.resize(count);
    out.meta.stimulus = std::string(waveform_name(spec.shape));

    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double theta = kTwoPi * spec.frequency_hz * t + spec.phase_rad;
        double v = 0.0;
        switch (spec.shape) {
            case Waveform::Sine:
                v = std::sin(theta);
                break;
            case Waveform::Triangle:
                // asin(sin) is the triangle with the sine's phase alignment:
                // 0 at theta=0, +1 at pi/2, -1 at 3pi/2.
                v = std::asin(std::sin(theta)) * (2.0 / 3.141592653589793238462643383279);
                break;
            case Waveform::Square:
                v = (cycle_fraction(theta) < 0.5) ? 1.0 : -1.0;
                break;
        }
        out.samples[i] = amp * v + spec.dc_offset;
    }
    return out;
}

std::size_t ratio_repetend_length(double f1_hz, double f2_hz) {
    std::uint64_t p = scaled_decimal(f1_hz, "f1");
    std::uint64_t q = scaled_decimal(f2_hz, "f2");
    const std::uint64_t g = std::gcd(p, q);
    p /= g;
    q /= g;

    // Only the reduced denominator matters for the repetend.
    while (q % 2 == 0) q /= 2;
    while (q % 5 == 0) q /= 5;
    if (q == 1) return 0;

    // Multiplicative order of 10 modulo q.  q is coprime to 10 here, so the
    // order divides phi(q) and the loop below terminates within q steps.
    std::uint64_t value = 10 % q;
    std::size_t order = 1;
    while (value != 1) {
        value = mulmod(value, 10, q);
        ++order;
        if (order > q) {
            throw NumericalError("ratio_repetend_length: order search failed to terminate");
        }
    }
    return order;
}

TimeSeries mix_reference(const TimeSeries& a, const TimeSeries& b) {
    validate(a, "mix_reference");
    validate(b, "mix_reference");
    if (a.samples.size() != b.samples.size()) {
        throw ArgumentError("mix_reference: series lengths differ");
    }
    const double scale = std::max(a.dt, b.dt);
    if (std::abs(a.dt - b.dt) > 1e-9 * scale) {
        throw ArgumentError("mix_reference: sample spacings differ");
    }
    TimeSeries out;
    out.dt = a.dt;
    out.samples.resize(a.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        out.samples[i] = a.samples[i] + b.samples[i];
    }
    out.meta.stimulus = a.meta.stimulus.empty() || b.meta.stimulus.empty()
                            ? a.meta.stimulus + b.meta.stimulus
                            : a.meta.stimulus + "+" + b.meta.stimulus;
    return out;
}

}  // namespace resmix::signals
