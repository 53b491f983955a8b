#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "resmix/embedding.hpp"
#include "resmix/types.hpp"

namespace resmix::metrics {

/// Largest Lyapunov exponent by the nearest-neighbour divergence method.
/// lambda is per sample; multiply by 1/dt for per-second units.
struct MleResult {
    double lambda_per_sample = 0.0;
    double fit_r2 = 0.0;
    int pairs = 0;
    int fit_points = 0;
};
MleResult max_lyapunov(const TimeSeries& ts, std::size_t dim, int tau, int k_max = 100);

/// Detrended fluctuation analysis, order-1 detrending, n_windows log-spaced
/// window sizes in [min_window, max_window]; alpha is the log-log slope.
/// max_window = 0 means N/4.
struct DfaResult {
    double alpha = 0.0;
    double fit_r2 = 0.0;
};
DfaResult dfa(const TimeSeries& ts, int min_window = 4, int max_window = 0, int n_windows = 16);

/// Correlation dimension from the pair-counting correlation sum.  The
/// scaling region is the longest log-radius run whose local slopes stay
/// within 15% of their mean; when no run qualifies the full grid is fit and
/// scaling_found is false.  An empty r_grid selects one automatically from
/// the pairwise-distance distribution (radii are in data units).
struct CorrDimResult {
    double nu = 0.0;
    double fit_r2 = 0.0;
    bool scaling_found = false;
    double r_lo = 0.0, r_hi = 0.0;  ///< fitted radius range
};
CorrDimResult correlation_dimension(const TimeSeries& ts, std::size_t dim, int tau,
                                    std::vector<double> r_grid = {}, int theiler = -1);

/// Sample entropy (Chebyshev distance, template length m, tolerance
/// r_frac * sample std).  Returns +infinity when no template pair matches at
/// m+1; throws NumericalError when none match at m.
double sample_entropy(const TimeSeries& ts, int m = 2, double r_frac = 0.2);

/// Approximate entropy (self-matches included, same tolerance convention).
double approximate_entropy(const TimeSeries& ts, int m = 2, double r_frac = 0.2);

/// Permutation entropy of order m at delay tau, natural log, normalized by
/// log(m!) to [0, 1].  Ties rank by temporal order.
double permutation_entropy(const TimeSeries& ts, int m = 3, int tau = 1);

/// Katz fractal dimension of the (index, value) polyline with unit index
/// spacing.  Constant series are degenerate.
double katz_fd(const TimeSeries& ts);

/// Petrosian fractal dimension; sign changes of the first difference with
/// zero differences carrying the previous sign.
double petrosian_fd(const TimeSeries& ts);

/// Settings for the combined extraction.
struct FeatureConfig {
    embedding::SelectConfig select;
    int tau_override = 0;       ///< > 0 skips delay selection
    std::size_t dim_override = 0;  ///< > 0 skips dimension selection
    int mle_k_max = 100;
    int entropy_m = 2;
    double entropy_r = 0.2;
    int perm_m = 3;
    int perm_tau = 1;
    int dfa_min_window = 4;
    int dfa_max_window = 0;  ///< 0 means N/4
    int dfa_n_windows = 16;
};

/// One row of the analysis table.  Failed estimators leave their field empty
/// and append a flag naming the failure.
struct FeatureVector {
    int tau = 1;
    std::size_t dim = 1;
    std::optional<double> mle;          ///< per sample
    std::optional<double> dfa_alpha;
    std::optional<double> corr_dim;
    std::optional<double> sampen;
    std::optional<double> apen;
    std::optional<double> perm_entropy;
    std::optional<double> katz_fd;
    std::optional<double> petrosian_fd;
    std::vector<std::string> flags;
    // auxiliary values carried alongside the vector
    std::optional<double> sampen_at_dim;  ///< SampEn with m = selected dim
    std::optional<double> mle_per_second;
    double dt = 0.0;
};

/// Runs the full extraction on a normalized window (len >= 500).
FeatureVector feature_vector(const TimeSeries& ts, const FeatureConfig& cfg = {});

}  // namespace resmix::metrics
