#include "resmix/types.hpp"

#include <cmath>
#include <string>

#include "resmix/errors.hpp"

namespace resmix {

void validate(const TimeSeries& ts, const char* who) {
    if (ts.samples.size() < 2) {
        throw ArgumentError(std::string(who) + ": series needs at least two samples");
    }
    if (!(ts.dt > 0.0) || !std::isfinite(ts.dt)) {
        throw ArgumentError(std::string(who) + ": sample spacing must be positive and finite");
    }
    for (double v : ts.samples) {
        if (!std::isfinite(v)) {
            throw DataError(std::string(who) + ": series contains a non-finite sample");
        }
    }
}

}  // namespace resmix
