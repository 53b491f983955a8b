#pragma once

#include <cstddef>

#include "resmix/types.hpp"

namespace resmix::prep {

/// Result of an augmented Dickey-Fuller unit-root test
/// (regression with constant, no trend).
struct StationarityReport {
    double adf_statistic = 0.0;
    double p_value = 1.0;
    int lags_used = 0;
    bool reject_unit_root = false;  ///< p < 0.05
};

/// Returns the series shifted and scaled to zero mean and unit sample
/// standard deviation (N-1 divisor).  Constant input is degenerate.
TimeSeries normalize(const TimeSeries& ts);

/// Augmented Dickey-Fuller test with AIC lag selection.
///
/// max_lag < 0 selects the conventional ceiling floor(12*(N/100)^0.25).
/// Lag order is chosen by AIC on a common sample aligned at max_lag, then
/// the reported regression is refit at that order on the longest available
/// sample.  The p-value interpolates MacKinnon's (1994) response surface
/// for the constant-only regression.
StationarityReport adf_test(const TimeSeries& ts, int max_lag = -1);

}  // namespace resmix::prep
