#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace resmix {

/// Labels describing where a series came from; informational only.
struct SeriesMeta {
    std::string terminal;   ///< e.g. "out1", "out2", "" for synthetic
    std::string stimulus;   ///< e.g. "sine300+triangle280"
    std::string substrate;  ///< "doped", "undoped", "" for synthetic
};

/// Uniformly sampled real-valued series.
struct TimeSeries {
    std::vector<double> samples;
    double dt = 0.0;  ///< sample spacing, seconds
    SeriesMeta meta;

    std::size_t size() const { return samples.size(); }
    double duration() const { return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1); }
};

/// Throws ArgumentError unless samples are finite, len >= 2 and dt > 0.
void validate(const TimeSeries& ts, const char* who);

}  // namespace resmix
