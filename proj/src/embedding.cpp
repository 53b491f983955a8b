#include "resmix/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "resmix/errors.hpp"

namespace resmix::embedding {

namespace {

double series_min(const std::vector<double>& x) { return *std::min_element(x.begin(), x.end()); }
double series_max(const std::vector<double>& x) { return *std::max_element(x.begin(), x.end()); }

double sample_std(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    return std::sqrt(ssq / (n - 1.0));
}

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double cheb_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        s = std::max(s, std::abs(a[k] - b[k]));
    }
    return s;
}

/// Nearest neighbour of point i under the temporal exclusion; squared
/// Euclidean metric.  Ties resolve to the lowest index.  Returns npos when
/// no candidate exists.
std::size_t nearest_euclid(const EmbeddedTrajectory& traj, std::size_t i, std::size_t limit,
                           int theiler, double* best_sq) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double bd = std::numeric_limits<double>::infinity();
    const double* pi = traj.point(i);
    for (std::size_t j = 0; j < limit; ++j) {
        const long sep = std::labs(static_cast<long>(i) - static_cast<long>(j));
        if (sep <= theiler) continue;
        const double d = sq_dist(pi, traj.point(j), traj.dim);
        if (d < bd) {
            bd = d;
            best = j;
        }
    }
    *best_sq = bd;
    return best;
}

/// Nearest neighbour under the Chebyshev metric with a positive-distance
/// requirement (Cao's ratios are undefined for coincident points).
std::size_t nearest_cheb_positive(const EmbeddedTrajectory& traj, std::size_t i, std::size_t limit,
                                  int theiler, double* best_d) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double bd = std::numeric_limits<double>::infinity();
    const double* pi = traj.point(i);
    for (std::size_t j = 0; j < limit; ++j) {
        const long sep = std::labs(static_cast<long>(i) - static_cast<long>(j));
        if (sep <= theiler) continue;
        const double d = cheb_dist(pi, traj.point(j), traj.dim);
        if (d > 0.0 && d < bd) {
            bd = d;
            best = j;
        }
    }
    *best_d = bd;
    return best;
}

}  // namespace

std::vector<DmiPoint> delayed_mutual_information(const TimeSeries& ts, int max_tau, int bins) {
    validate(ts, "delayed_mutual_information");
    if (max_tau < 1) throw ArgumentError("delayed_mutual_information: max_tau must be >= 1");
    if (bins < 2) throw ArgumentError("delayed_mutual_information: need at least 2 bins");
    const std::vector<double>& x = ts.samples;
    const int n = static_cast<int>(x.size());
    if (n < 10 * max_tau) {
        throw ArgumentError("delayed_mutual_information: series shorter than 10 * max_tau");
    }
    const double lo = series_min(x);
    const double hi = series_max(x);
    if (lo == hi) throw DegenerateInputError("delayed_mutual_information: constant series");
    const double scale = static_cast<double>(bins) / (hi - lo);

    std::vector<int> bin_of(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        int b = static_cast<int>((x[i] - lo) * scale);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        bin_of[i] = b;
    }

    std::vector<DmiPoint> curve;
    curve.reserve(static_cast<std::size_t>(max_tau));
    std::vector<double> joint(static_cast<std::size_t>(bins) * bins);
    std::vector<double> px(bins), py(bins);

    for (int tau = 1; tau <= max_tau; ++tau) {
        std::fill(joint.begin(), joint.end(), 0.0);
        std::fill(px.begin(), px.end(), 0.0);
        std::fill(py.begin(), py.end(), 0.0);
        const int pairs = n - tau;
        for (int t = 0; t < pairs; ++t) {
            const int a = bin_of[t];
            const int b = bin_of[t + tau];
            joint[static_cast<std::size_t>(a) * bins + b] += 1.0;
            px[a] += 1.0;
            py[b] += 1.0;
        }
        const double inv = 1.0 / static_cast<double>(pairs);
        double mi = 0.0;
        for (int a = 0; a < bins; ++a) {
            if (px[a] == 0.0) continue;
            for (int b = 0; b < bins; ++b) {
                const double c = joint[static_cast<std::size_t>(a) * bins + b];
                if (c == 0.0) continue;
                mi += c * inv * std::log(c / (px[a] * py[b] * inv));
            }
        }
        curve.push_back({tau, std::max(mi, 0.0)});
    }
    return curve;
}

DmiMinimum first_dmi_minimum(const std::vector<DmiPoint>& curve) {
    if (curve.empty()) throw ArgumentError("first_dmi_minimum: empty curve");
    DmiMinimum result;
    for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
        if (curve[k].mi_nats < curve[k - 1].mi_nats && curve[k].mi_nats <= curve[k + 1].mi_nats) {
            result.tau = curve[k].tau;
            result.local_minimum = true;
            return result;
        }
    }
    std::size_t argmin = 0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (curve[k].mi_nats < curve[argmin].mi_nats) argmin = k;
    }
    result.tau = curve[argmin].tau;
    result.local_minimum = false;
    return result;
}

int autocorrelation_first_zero(const TimeSeries& ts, int max_lag) {
    validate(ts, "autocorrelation_first_zero");
    const std::vector<double>& x = ts.samples;
    const int n = static_cast<int>(x.size());
    if (max_lag < 0) max_lag = n / 2;
    max_lag = std::min(max_lag, n - 2);
    if (max_lag < 1) throw ArgumentError("autocorrelation_first_zero: series too short");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw DegenerateInputError("autocorrelation_first_zero: constant series");

    double prev = 1.0;  // lag 0
    for (int tau = 1; tau <= max_lag; ++tau) {
        double acc = 0.0;
        for (int t = 0; t + tau < n; ++t) {
            acc += (x[t] - mean) * (x[t + tau] - mean);
        }
        const double rho = acc / denom;
        if (rho <= 0.0) {
            // Crossing between tau-1 and tau; exact zeros sit on tau itself.
            if (rho == 0.0 || std::abs(rho) < 1e-12) return tau;
            const double frac = prev / (prev - rho);
            const double crossing = static_cast<double>(tau - 1) + frac;
            const int floored = static_cast<int>(std::floor(crossing));
            if (crossing - std::floor(crossing) == 0.0 || std::abs(crossing - std::nearbyint(crossing)) < 1e-9) {
                return static_cast<int>(std::nearbyint(crossing));
            }
            return std::max(1, floored);
        }
        prev = rho;
    }
    return -1;
}

EmbeddedTrajectory embed(const TimeSeries& ts, std::size_t dim, int tau) {
    validate(ts, "embed");
    if (dim < 1) throw ArgumentError("embed: dimension must be >= 1");
    if (tau < 1) throw ArgumentError("embed: delay must be >= 1");
    const std::size_t span = (dim - 1) * static_cast<std::size_t>(tau);
    if (ts.samples.size() < span + 2) {
        throw ArgumentError("embed: series too short for this dimension and delay");
    }
    const std::size_t count = ts.samples.size() - span;
    EmbeddedTrajectory traj;
    traj.dim = dim;
    traj.tau = tau;
    traj.data.resize(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            traj.data[i * dim + j] = ts.samples[i + j * static_cast<std::size_t>(tau)];
        }
    }
    return traj;
}

FnnResult false_nearest_neighbors(const TimeSeries& ts, std::size_t dim, int tau,
                                  double r_tol, double a_tol, int theiler) {
    if (theiler < 0) theiler = tau;
    const EmbeddedTrajectory traj = embed(ts, dim, tau);
    // Templates and neighbours are limited to points whose (dim+1)-th
    // coordinate exists.
    const std::size_t span_next = dim * static_cast<std::size_t>(tau);
    if (ts.samples.size() < span_next + 2) {
        throw ArgumentError("false_nearest_neighbors: series too short for the dim+1 test");
    }
    const std::size_t limit = ts.samples.size() - span_next;
    const double spread = sample_std(ts.samples);
    if (spread == 0.0) throw DegenerateInputError("false_nearest_neighbors: constant series");

    std::size_t counted = 0, ratio_false = 0, size_false = 0, joint_false = 0;
    for (std::size_t i = 0; i < limit; ++i) {
        double d_sq = 0.0;
        const std::size_t j = nearest_euclid(traj, i, limit, theiler, &d_sq);
        if (j == std::numeric_limits<std::size_t>::max()) continue;
        const double extra = std::abs(ts.samples[i + span_next] - ts.samples[j + span_next]);
        const double d_next = std::sqrt(d_sq + extra * extra);
        bool ratio_bad = false;
        if (d_sq > 0.0) {
            ratio_bad = extra / std::sqrt(d_sq) > r_tol;
        } else {
            // Coincident in dim dimensions: any separation at the new
            // coordinate is unbounded growth.
            ratio_bad = extra > 0.0;
        }
        const bool size_bad = d_next / spread > a_tol;
        ++counted;
        if (ratio_bad) ++ratio_false;
        if (size_bad) ++size_false;
        if (ratio_bad && size_bad) ++joint_false;
    }
    if (counted == 0) throw NumericalError("false_nearest_neighbors: no usable neighbour pairs");

    FnnResult result;
    const double denom = static_cast<double>(counted);
    result.ratio = static_cast<double>(ratio_false) / denom;
    result.size = static_cast<double>(size_false) / denom;
    result.joint = static_cast<double>(joint_false) / denom;
    return result;
}

CaoResult cao_statistics(const TimeSeries& ts, std::size_t dim, int tau, int theiler) {
    if (theiler < 0) theiler = tau;

    // E(d) needs neighbours in d dimensions extended to d+1; the ratio
    // E1(d) = E(d+1)/E(d) therefore touches embeddings up to d+2.
    auto mean_ratios = [&](std::size_t d, double* e, double* e_star) {
        const EmbeddedTrajectory traj = embed(ts, d, tau);
        const std::size_t span_next = d * static_cast<std::size_t>(tau);
        if (ts.samples.size() < span_next + 2) {
            throw ArgumentError("cao_statistics: series too short");
        }
        const std::size_t limit = ts.samples.size() - span_next;
        double acc = 0.0, acc_star = 0.0;
        std::size_t counted = 0;
        for (std::size_t i = 0; i < limit; ++i) {
            double d_curr = 0.0;
            const std::size_t j = nearest_cheb_positive(traj, i, limit, theiler, &d_curr);
            if (j == std::numeric_limits<std::size_t>::max()) continue;
            const double extra = std::abs(ts.samples[i + span_next] - ts.samples[j + span_next]);
            const double d_next = std::max(d_curr, extra);  // Chebyshev in d+1
            acc += d_next / d_curr;
            acc_star += extra;
            ++counted;
        }
        if (counted == 0) throw NumericalError("cao_statistics: no usable neighbour pairs");
        *e = acc / static_cast<double>(counted);
        *e_star = acc_star / static_cast<double>(counted);
    };

    double e_d = 0.0, estar_d = 0.0, e_d1 = 0.0, estar_d1 = 0.0;
    mean_ratios(dim, &e_d, &estar_d);
    mean_ratios(dim + 1, &e_d1, &estar_d1);

    CaoResult result;
    result.e1 = e_d1 / e_d;
    result.e2 = estar_d == 0.0 ? 1.0 : estar_d1 / estar_d;
    return result;
}

EmbeddingChoice select_embedding(const TimeSeries& ts, const SelectConfig& cfg) {
    validate(ts, "select_embedding");
    EmbeddingChoice choice;

    const int n = static_cast<int>(ts.samples.size());
    const int max_tau = std::max(2, std::min(cfg.max_tau, n / 10));
    choice.dmi_curve = delayed_mutual_information(ts, max_tau, cfg.bins);
    const DmiMinimum dmi_min = first_dmi_minimum(choice.dmi_curve);
    if (dmi_min.local_minimum) {
        choice.tau = dmi_min.tau;
        choice.tau_source = TauSource::DmiMinimum;
    } else {
        const int acf = autocorrelation_first_zero(ts, std::min(n / 2, 4 * max_tau));
        if (acf > 0) {
            choice.tau = acf;
            choice.tau_source = TauSource::AutocorrZero;
        } else {
            choice.tau = 1;
            choice.tau_source = TauSource::Floor;
        }
    }

    // Dimension sweep.  The FNN curve runs to max_dim and the Cao curve one
    // element further so the saturation difference |E1(d+1) - E1(d)| is
    // available at every candidate d.
    const int tau = choice.tau;
    for (std::size_t d = 1; d <= cfg.max_dim + 1; ++d) {
        // cao_statistics(d) embeds up to d+2; require a sane point count.
        const std::size_t deepest = (d + 2) * static_cast<std::size_t>(tau);
        if (ts.samples.size() < deepest + 30) break;
        try {
            if (d <= cfg.max_dim) {
                choice.fnn_curve.push_back(
                    false_nearest_neighbors(ts, d, tau, cfg.r_tol, cfg.a_tol, tau));
            }
            choice.cao_curve.push_back(cao_statistics(ts, d, tau, tau));
        } catch (const Error&) {
            break;
        }
    }
    if (choice.fnn_curve.empty()) {
        throw NumericalError("select_embedding: series too short for any dimension test");
    }

    // Preferred: smallest d passing both the joint FNN criterion and the E1
    // saturation check.  Fallbacks: FNN alone, then the FNN argmin.
    std::size_t fnn_only = 0;
    for (std::size_t d = 1; d <= choice.fnn_curve.size(); ++d) {
        if (choice.fnn_curve[d - 1].joint >= cfg.fnn_threshold) continue;
        if (fnn_only == 0) fnn_only = d;
        if (d < choice.cao_curve.size() &&
            std::abs(choice.cao_curve[d].e1 - choice.cao_curve[d - 1].e1) < cfg.e1_saturation) {
            choice.dim = d;
            choice.dim_converged = true;
            choice.dim_saturated = true;
            return choice;
        }
    }
    if (fnn_only > 0) {
        choice.dim = fnn_only;
        choice.dim_converged = true;
        choice.dim_saturated = false;
        return choice;
    }
    std::size_t argmin = 1;
    for (std::size_t d = 2; d <= choice.fnn_curve.size(); ++d) {
        if (choice.fnn_curve[d - 1].joint < choice.fnn_curve[argmin - 1].joint) argmin = d;
    }
    choice.dim = argmin;
    choice.dim_converged = false;
    choice.dim_saturated = false;
    return choice;
}

}  // namespace resmix::embedding
