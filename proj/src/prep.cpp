#include "resmix/prep.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "resmix/errors.hpp"

namespace resmix::prep {

namespace {

/// MacKinnon (1994) response-surface constants for the ADF distribution,
/// constant-only regression, one integrated series.  The p-value is
/// Phi(c0 + c1*t + c2*t^2 [+ c3*t^3]) with the small-p polynomial used at or
/// below tau_star and the large-p polynomial above it.
constexpr double kTauStar = -1.61;
constexpr double kTauMin = -18.83;
constexpr double kTauMax = 2.74;
constexpr double kSmallP[3] = {2.1659, 1.4412, 0.038269};
constexpr double kLargeP[4] = {1.7339, 0.93202, -0.12745, -0.010368};

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

double mackinnon_p(double stat) {
    if (stat > kTauMax) return 1.0;
    if (stat < kTauMin) return 0.0;
    double z;
    if (stat <= kTauStar) {
        z = kSmallP[0] + stat * (kSmallP[1] + stat * kSmallP[2]);
    } else {
        z = kLargeP[0] + stat * (kLargeP[1] + stat * (kLargeP[2] + stat * kLargeP[3]));
    }
    return norm_cdf(z);
}

struct OlsFit {
    double ssr = 0.0;
    double coef0 = 0.0;   ///< coefficient of the first regressor
    double se0 = 0.0;     ///< its standard error
    int nobs = 0;
    int nparams = 0;
};

/// Least squares of y on X (first column is the level term, last is the
/// constant).  Returns SSR plus the first coefficient and its standard error.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    OlsFit fit;
    fit.nobs = static_cast<int>(X.rows());
    fit.nparams = static_cast<int>(X.cols());
    if (fit.nobs <= fit.nparams) {
        throw DegenerateInputError("adf_test: not enough observations for the regression");
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) {
        throw DegenerateInputError("adf_test: collinear regressors (degenerate series?)");
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    fit.ssr = resid.squaredNorm();
    const double sigma2 = fit.ssr / static_cast<double>(fit.nobs - fit.nparams);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    fit.coef0 = beta(0);
    fit.se0 = std::sqrt(sigma2 * xtx_inv(0, 0));
    return fit;
}

/// Builds the ADF regression for a given lag order over observations
/// t = start..N-1 of the differenced series: dy_t on [y_{t-1},
/// dy_{t-1}..dy_{t-lag}, 1].
void build_design(const std::vector<double>& y, const std::vector<double>& dy,
                  int lag, int start, Eigen::MatrixXd& X, Eigen::VectorXd& b) {
    const int n = static_cast<int>(dy.size()) - start;
    X.resize(n, lag + 2);
    b.resize(n);
    for (int i = 0; i < n; ++i) {
        const int t = start + i;      // index into dy; dy[t] = y[t+1]-y[t]
        b(i) = dy[t];
        X(i, 0) = y[t];               // level lagged one step
        for (int j = 1; j <= lag; ++j) {
            X(i, j) = dy[t - j];
        }
        X(i, lag + 1) = 1.0;
    }
}

}  // namespace

TimeSeries normalize(const TimeSeries& ts) {
    validate(ts, "normalize");
    const std::size_t n = ts.samples.size();
    double mean = 0.0;
    for (double v : ts.samples) mean += v;
    mean /= static_cast<double>(n);

    double ssq = 0.0;
    double lo = ts.samples[0], hi = ts.samples[0];
    for (double v : ts.samples) {
        ssq += (v - mean) * (v - mean);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) {
        throw DegenerateInputError("normalize: constant series has no scale");
    }
    const double sd = std::sqrt(ssq / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw DegenerateInputError("normalize: zero or non-finite variance");
    }

    TimeSeries out = ts;
    for (double& v : out.samples) v = (v - mean) / sd;
    return out;
}

StationarityReport adf_test(const TimeSeries& ts, int max_lag) {
    validate(ts, "adf_test");
    const std::vector<double>& y = ts.samples;
    const int n = static_cast<int>(y.size());
    if (n < 20) {
        throw ArgumentError("adf_test: need at least 20 samples");
    }

    if (max_lag < 0) {
        max_lag = static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
    }
    // Keep enough observations to fit the largest candidate model.
    const int max_feasible = (n - 2) / 2 - 2;
    if (max_lag > max_feasible) max_lag = std::max(0, max_feasible);

    std::vector<double> dy(y.size() - 1);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) dy[i] = y[i + 1] - y[i];

    // Lag selection: all candidates scored on the sample aligned at max_lag
    // so their AIC values are comparable.
    int best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd X;
    Eigen::VectorXd b;
    for (int lag = 0; lag <= max_lag; ++lag) {
        build_design(y, dy, lag, max_lag, X, b);
        const OlsFit fit = ols(X, b);
        const double nobs = static_cast<double>(fit.nobs);
        const double aic = nobs * std::log(fit.ssr / nobs) + 2.0 * static_cast<double>(fit.nparams);
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = lag;
        }
    }

    // Final regression at the chosen order over the longest usable sample.
    build_design(y, dy, best_lag, best_lag, X, b);
    const OlsFit fit = ols(X, b);
    if (!(fit.se0 > 0.0) || !std::isfinite(fit.se0)) {
        throw NumericalError("adf_test: level coefficient has no usable standard error");
    }

    StationarityReport report;
    report.adf_statistic = fit.coef0 / fit.se0;
    report.p_value = mackinnon_p(report.adf_statistic);
    report.lags_used = best_lag;
    report.reject_unit_root = report.p_value < 0.05;
    return report;
}

}  // namespace resmix::prep
