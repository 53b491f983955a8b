#pragma once

#include <cstddef>

#include "resmix/types.hpp"

namespace resmix::signals {

enum class Waveform { Sine, Triangle, Square };

const char* waveform_name(Waveform w);
Waveform waveform_from_name(const std::string& name);

/// Generator settings for one channel.  amplitude_pp is peak-to-peak volts.
struct WaveformSpec {
    Waveform shape = Waveform::Sine;
    double frequency_hz = 0.0;
    double amplitude_pp = 0.0;
    double phase_rad = 0.0;
    double dc_offset = 0.0;
};

/// Samples `count` points of the waveform at spacing dt, t = i*dt.
///
/// All three shapes share the phase convention of the sine: with zero phase
/// the cycle starts at the midline moving upward, so the triangle peaks a
/// quarter period in and the square holds +A over the first half period
/// (50% duty; the high level covers wrapped phase [0, 0.5)).
TimeSeries synthesize(const WaveformSpec& spec, double dt, std::size_t count);

/// Decimal repetend length of the frequency ratio f1/f2.
///
/// The ratio is reduced to lowest terms p/q, factors of 2 and 5 are removed
/// from q, and the result is the multiplicative order of 10 modulo the
/// stripped denominator; 0 means the decimal expansion terminates.
/// Frequencies must be positive and representable as decimal rationals
/// (at most 9 fractional digits).
std::size_t ratio_repetend_length(double f1_hz, double f2_hz);

/// Pointwise sum of two equally sampled series (the linear null model a
/// nonlinear substrate is compared against).  Requires equal length and
/// equal dt (relative tolerance 1e-9).
TimeSeries mix_reference(const TimeSeries& a, const TimeSeries& b);

}  // namespace resmix::signals
