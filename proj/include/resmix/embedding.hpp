#pragma once

#include <cstddef>
#include <vector>

#include "resmix/types.hpp"

namespace resmix::embedding {

/// Delayed mutual information I(x_t; x_{t+tau}) in nats for tau = 1..max_tau,
/// estimated from an equal-width joint histogram over the series range.
struct DmiPoint {
    int tau = 0;
    double mi_nats = 0.0;
};
std::vector<DmiPoint> delayed_mutual_information(const TimeSeries& ts, int max_tau, int bins = 64);

/// First local minimum of a DMI curve.  When the curve has no interior local
/// minimum the argmin is returned with local_minimum = false.
struct DmiMinimum {
    int tau = 0;
    bool local_minimum = false;
};
DmiMinimum first_dmi_minimum(const std::vector<DmiPoint>& curve);

/// Smallest positive lag where the biased sample autocorrelation crosses
/// zero.  The crossing is located by linear interpolation between lags and
/// the integer lag containing the crossing is returned (floor of the
/// interpolated crossing, exact zeros counting as the crossing itself, with
/// a floor of lag 1).  Returns -1 when the autocorrelation stays positive
/// over the scanned range.  max_lag < 0 scans up to half the series.
int autocorrelation_first_zero(const TimeSeries& ts, int max_lag = -1);

/// Delay embedding: point k has components x(k + j*tau), j = 0..dim-1.
struct EmbeddedTrajectory {
    std::vector<double> data;  ///< row-major, count() x dim
    std::size_t dim = 0;
    int tau = 1;

    std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
    const double* point(std::size_t i) const { return data.data() + i * dim; }
};
EmbeddedTrajectory embed(const TimeSeries& ts, std::size_t dim, int tau);

/// False-nearest-neighbour fractions when passing from dim to dim+1
/// (Euclidean nearest neighbours, temporal exclusion |i-j| <= theiler).
/// ratio: distance-growth test against r_tol; size: new-coordinate distance
/// against a_tol times the series spread; joint: both tests at once.
struct FnnResult {
    double ratio = 0.0;
    double size = 0.0;
    double joint = 0.0;
};
FnnResult false_nearest_neighbors(const TimeSeries& ts, std::size_t dim, int tau,
                                  double r_tol = 15.0, double a_tol = 2.0, int theiler = -1);

/// Cao's averaged false-neighbour statistics E1(dim) = E(dim+1)/E(dim) and
/// the delayed-scalar variant E2(dim).
struct CaoResult {
    double e1 = 0.0;
    double e2 = 0.0;
};
CaoResult cao_statistics(const TimeSeries& ts, std::size_t dim, int tau, int theiler = -1);

/// Combined delay/dimension selection.
enum class TauSource { DmiMinimum, AutocorrZero, Floor };

struct EmbeddingChoice {
    int tau = 1;
    std::size_t dim = 1;
    TauSource tau_source = TauSource::Floor;
    bool dim_converged = false;       ///< FNN criterion met within max_dim
    bool dim_saturated = false;       ///< E1 saturation test also satisfied
    std::vector<DmiPoint> dmi_curve;
    std::vector<FnnResult> fnn_curve; ///< index d-1 holds the d -> d+1 test
    std::vector<CaoResult> cao_curve;
};

struct SelectConfig {
    int max_tau = 40;
    int bins = 64;
    std::size_t max_dim = 8;
    double r_tol = 15.0;
    double a_tol = 2.0;
    double fnn_threshold = 0.01;   ///< accept dim when joint fraction < 1%
    double e1_saturation = 0.05;   ///< |E1(d+1) - E1(d)| below this saturates
};

/// Delay from the first DMI minimum (autocorrelation zero as fallback,
/// then tau = 1), dimension from the joint FNN criterion with Cao's E1
/// saturation check.
EmbeddingChoice select_embedding(const TimeSeries& ts, const SelectConfig& cfg = {});

}  // namespace resmix::embedding
