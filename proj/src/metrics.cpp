#include "resmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "resmix/errors.hpp"

namespace resmix::metrics {

namespace {

double sample_std(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    return std::sqrt(ssq / (n - 1.0));
}

/// Least-squares line through (x, y); returns slope and R^2.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LineFit fit;
    if (n < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

/// Estimated dominant period in samples from positive-going mean crossings.
int mean_period_estimate(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    int crossings = 0;
    for (std::size_t t = 0; t + 1 < x.size(); ++t) {
        if (x[t] < mean && x[t + 1] >= mean) ++crossings;
    }
    if (crossings == 0) return static_cast<int>(x.size());
    return static_cast<int>(std::ceil(static_cast<double>(x.size()) / crossings));
}

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

/// Chebyshev template match at length m with early exit.
bool cheb_match(const double* a, const double* b, int m, double r) {
    for (int k = 0; k < m; ++k) {
        if (std::abs(a[k] - b[k]) > r) return false;
    }
    return true;
}

double tolerance_radius(const TimeSeries& ts, double r_frac, const char* who) {
    if (r_frac < 0.0 || !std::isfinite(r_frac)) {
        throw ArgumentError(std::string(who) + ": tolerance fraction must be non-negative");
    }
    return r_frac * sample_std(ts.samples);
}

}  // namespace

MleResult max_lyapunov(const TimeSeries& ts, std::size_t dim, int tau, int k_max) {
    validate(ts, "max_lyapunov");
    if (k_max < 5) throw ArgumentError("max_lyapunov: k_max must be >= 5");
    const embedding::EmbeddedTrajectory traj = embedding::embed(ts, dim, tau);
    const std::size_t m = traj.count();
    if (m < 50) throw ArgumentError("max_lyapunov: too few embedded points");

    const int theiler = mean_period_estimate(ts.samples);

    // Nearest neighbour of every point outside the temporal exclusion.
    std::vector<std::size_t> partner(m, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < m; ++i) {
        double bd = std::numeric_limits<double>::infinity();
        std::size_t best = std::numeric_limits<std::size_t>::max();
        const double* pi = traj.point(i);
        for (std::size_t j = 0; j < m; ++j) {
            const long sep = std::labs(static_cast<long>(i) - static_cast<long>(j));
            if (sep <= theiler) continue;
            const double d = sq_dist(pi, traj.point(j), traj.dim);
            if (d > 0.0 && d < bd) {
                bd = d;
                best = j;
            }
        }
        partner[i] = best;
    }

    // Mean log separation k steps downstream.
    const int usable_k = std::min<int>(k_max, static_cast<int>(m) - 1);
    std::vector<double> curve;
    std::vector<double> ks;
    int pairs = 0;
    for (int k = 0; k <= usable_k; ++k) {
        double acc = 0.0;
        int cnt = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = partner[i];
            if (j == std::numeric_limits<std::size_t>::max()) continue;
            if (i + k >= m || j + k >= m) continue;
            const double d = sq_dist(traj.point(i + k), traj.point(j + k), traj.dim);
            if (d <= 0.0) continue;
            acc += 0.5 * std::log(d);
            ++cnt;
        }
        if (cnt < 10) break;
        if (k == 0) pairs = cnt;
        curve.push_back(acc / static_cast<double>(cnt));
        ks.push_back(static_cast<double>(k));
    }
    if (curve.size() < 6) throw NumericalError("max_lyapunov: divergence curve too short");

    // Fit the initial growth region: up to the point where the curve has
    // covered 80% of its rise toward saturation.
    const double d0 = curve.front();
    const double dmax = *std::max_element(curve.begin(), curve.end());
    std::size_t fit_end = curve.size() - 1;
    if (dmax > d0) {
        const double cut = d0 + 0.8 * (dmax - d0);
        for (std::size_t k = 0; k < curve.size(); ++k) {
            if (curve[k] >= cut) {
                fit_end = k;
                break;
            }
        }
    }
    fit_end = std::max<std::size_t>(fit_end, 5);
    fit_end = std::min(fit_end, curve.size() - 1);

    const std::vector<double> fx(ks.begin(), ks.begin() + fit_end + 1);
    const std::vector<double> fy(curve.begin(), curve.begin() + fit_end + 1);
    const LineFit fit = fit_line(fx, fy);

    MleResult result;
    result.lambda_per_sample = fit.slope;
    result.fit_r2 = fit.r2;
    result.pairs = pairs;
    result.fit_points = static_cast<int>(fx.size());
    return result;
}

DfaResult dfa(const TimeSeries& ts, int min_window, int max_window, int n_windows) {
    validate(ts, "dfa");
    const std::vector<double>& x = ts.samples;
    const int n = static_cast<int>(x.size());
    if (n < 16) throw ArgumentError("dfa: need at least 16 samples");
    if (max_window <= 0) max_window = n / 4;
    if (min_window < 3) throw ArgumentError("dfa: windows must hold at least 3 samples");
    if (max_window <= min_window || max_window > n) {
        throw ArgumentError("dfa: window range must satisfy min < max <= N");
    }
    if (n_windows < 4) throw ArgumentError("dfa: need at least 4 window sizes");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> profile(x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] - mean;
        profile[i] = acc;
    }

    const double lo = std::log(static_cast<double>(min_window));
    const double hi = std::log(static_cast<double>(max_window));
    std::vector<int> sizes;
    for (int k = 0; k < n_windows; ++k) {
        const double w = std::exp(lo + (hi - lo) * static_cast<double>(k) / (n_windows - 1));
        const int s = static_cast<int>(std::lround(w));
        if (sizes.empty() || s != sizes.back()) sizes.push_back(s);
    }
    if (sizes.size() < 4) throw ArgumentError("dfa: series too short for a window sweep");

    std::vector<double> log_n, log_f;
    for (int s : sizes) {
        const int windows = n / s;
        if (windows < 1) continue;
        double ssq = 0.0;
        for (int w = 0; w < windows; ++w) {
            const double* seg = profile.data() + static_cast<std::size_t>(w) * s;
            // Closed-form order-1 detrend over t = 0..s-1.
            double sy = 0.0, sty = 0.0;
            for (int t = 0; t < s; ++t) {
                sy += seg[t];
                sty += static_cast<double>(t) * seg[t];
            }
            const double sn = static_cast<double>(s);
            const double st = sn * (sn - 1.0) / 2.0;
            const double stt = (sn - 1.0) * sn * (2.0 * sn - 1.0) / 6.0;
            const double det = sn * stt - st * st;
            const double slope = (sn * sty - st * sy) / det;
            const double icept = (sy - slope * st) / sn;
            for (int t = 0; t < s; ++t) {
                const double r = seg[t] - (icept + slope * static_cast<double>(t));
                ssq += r * r;
            }
        }
        const double f = std::sqrt(ssq / (static_cast<double>(windows) * static_cast<double>(s)));
        if (f > 0.0) {
            log_n.push_back(std::log(static_cast<double>(s)));
            log_f.push_back(std::log(f));
        }
    }
    if (log_n.size() < 4) {
        throw DegenerateInputError("dfa: fluctuation function vanished (linear profile?)");
    }

    const LineFit fit = fit_line(log_n, log_f);
    DfaResult result;
    result.alpha = fit.slope;
    result.fit_r2 = fit.r2;
    return result;
}

CorrDimResult correlation_dimension(const TimeSeries& ts, std::size_t dim, int tau,
                                    std::vector<double> r_grid, int theiler) {
    validate(ts, "correlation_dimension");
    if (theiler < 0) theiler = tau;
    const embedding::EmbeddedTrajectory traj = embedding::embed(ts, dim, tau);
    const std::size_t m = traj.count();
    if (m < 100) throw ArgumentError("correlation_dimension: too few embedded points");

    if (r_grid.empty()) {
        // Percentiles of the pairwise distances on a deterministic pair
        // subsample pick the radius decade.
        std::vector<double> sample;
        const std::size_t target = 100000;
        const std::size_t total = m * (m - 1) / 2;
        const std::size_t stride = std::max<std::size_t>(1, total / target);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1 + theiler; j < m; ++j, ++idx) {
                if (idx % stride != 0) continue;
                const double d = std::sqrt(sq_dist(traj.point(i), traj.point(j), traj.dim));
                if (d > 0.0) sample.push_back(d);
            }
        }
        if (sample.size() < 32) {
            // Degenerate cloud (all points coincide): report dimension zero.
            CorrDimResult r;
            r.nu = 0.0;
            r.fit_r2 = 1.0;
            r.scaling_found = false;
            return r;
        }
        std::sort(sample.begin(), sample.end());
        const double r_lo = sample[sample.size() / 200];       // ~0.5th percentile
        const double r_hi = sample[(sample.size() * 4) / 5];   // 80th percentile
        const int points = 18;
        for (int k = 0; k < points; ++k) {
            const double f = static_cast<double>(k) / (points - 1);
            r_grid.push_back(std::exp(std::log(r_lo) + f * (std::log(r_hi) - std::log(r_lo))));
        }
    }
    if (r_grid.size() < 8) throw ArgumentError("correlation_dimension: need at least 8 radii");
    std::sort(r_grid.begin(), r_grid.end());
    for (double r : r_grid) {
        if (!(r > 0.0)) throw ArgumentError("correlation_dimension: radii must be positive");
    }

    // One pass over pairs, binned by the first radius >= distance.
    std::vector<std::size_t> bucket(r_grid.size() + 1, 0);
    std::size_t pair_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1 + theiler; j < m; ++j) {
            const double d = std::sqrt(sq_dist(traj.point(i), traj.point(j), traj.dim));
            ++pair_count;
            const auto it = std::lower_bound(r_grid.begin(), r_grid.end(), d);
            bucket[static_cast<std::size_t>(it - r_grid.begin())] += 1;
        }
    }
    if (pair_count == 0) throw NumericalError("correlation_dimension: no pairs outside the exclusion");

    std::vector<double> log_r, log_c;
    std::size_t cum = 0;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        cum += bucket[k];
        if (cum == 0) continue;
        log_r.push_back(std::log(r_grid[k]));
        log_c.push_back(std::log(static_cast<double>(cum) / static_cast<double>(pair_count)));
    }
    if (log_r.size() < 4) throw NumericalError("correlation_dimension: correlation sum too sparse");

    // Local slopes between consecutive radii.
    std::vector<double> slopes;
    for (std::size_t k = 0; k + 1 < log_r.size(); ++k) {
        slopes.push_back((log_c[k + 1] - log_c[k]) / (log_r[k + 1] - log_r[k]));
    }

    // Longest contiguous run whose slopes stay within 15% of the run mean.
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t a = 0; a < slopes.size(); ++a) {
        for (std::size_t b = a + 2; b < slopes.size(); ++b) {
            double mean_s = 0.0;
            for (std::size_t k = a; k <= b; ++k) mean_s += slopes[k];
            mean_s /= static_cast<double>(b - a + 1);
            const double limit = 0.15 * std::abs(mean_s);
            bool ok = true;
            for (std::size_t k = a; k <= b; ++k) {
                if (std::abs(slopes[k] - mean_s) > limit) {
                    ok = false;
                    break;
                }
            }
            if (ok && b - a > best_b - best_a) {
                best_a = a;
                best_b = b;
            }
        }
    }

    CorrDimResult result;
    if (best_b > best_a) {
        std::vector<double> fx(log_r.begin() + best_a, log_r.begin() + best_b + 2);
        std::vector<double> fy(log_c.begin() + best_a, log_c.begin() + best_b + 2);
        const LineFit fit = fit_line(fx, fy);
        result.nu = fit.slope;
        result.fit_r2 = fit.r2;
        result.scaling_found = true;
        result.r_lo = std::exp(log_r[best_a]);
        result.r_hi = std::exp(log_r[best_b + 1]);
    } else {
        const LineFit fit = fit_line(log_r, log_c);
        result.nu = fit.slope;
        result.fit_r2 = fit.r2;
        result.scaling_found = false;
        result.r_lo = std::exp(log_r.front());
        result.r_hi = std::exp(log_r.back());
    }
    return result;
}

double sample_entropy(const TimeSeries& ts, int m, double r_frac) {
    validate(ts, "sample_entropy");
    if (m < 1) throw ArgumentError("sample_entropy: m must be >= 1");
    const std::vector<double>& x = ts.samples;
    const int n = static_cast<int>(x.size());
    if (n < m + 2) throw ArgumentError("sample_entropy: series too short for this m");
    const double r = tolerance_radius(ts, r_frac, "sample_entropy");

    // Template pairs over i < j <= N-m-1 so every template extends to m+1.
    const int t = n - m;
    long long b_count = 0, a_count = 0;
    for (int i = 0; i < t; ++i) {
        for (int j = i + 1; j < t; ++j) {
            if (!cheb_match(&x[i], &x[j], m, r)) continue;
            ++b_count;
            if (std::abs(x[i + m] - x[j + m]) <= r) ++a_count;
        }
    }
    if (b_count == 0) {
        throw NumericalError("sample_entropy: no template matches at length m (entropy undefined)");
    }
    if (a_count == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log(static_cast<double>(a_count) / static_cast<double>(b_count));
}

double approximate_entropy(const TimeSeries& ts, int m, double r_frac) {
    validate(ts, "approximate_entropy");
    if (m < 1) throw ArgumentError("approximate_entropy: m must be >= 1");
    const std::vector<double>& x = ts.samples;
    const int n = static_cast<int>(x.size());
    if (n < m + 2) throw ArgumentError("approximate_entropy: series too short for this m");
    const double r = tolerance_radius(ts, r_frac, "approximate_entropy");

    const auto phi = [&](int mm) {
        const int t = n - mm + 1;
        double acc = 0.0;
        for (int i = 0; i < t; ++i) {
            int matches = 0;  // self-match included
            for (int j = 0; j < t; ++j) {
                if (cheb_match(&x[i], &x[j], mm, r)) ++matches;
            }
            acc += std::log(static_cast<double>(matches) / static_cast<double>(t));
        }
        return acc / static_cast<double>(t);
    };

    return phi(m) - phi(m + 1);
}

double permutation_entropy(const TimeSeries& ts, int m, int tau) {
    validate(ts, "permutation_entropy");
    if (m < 2 || m > 7) throw ArgumentError("permutation_entropy: order must be in [2, 7]");
    if (tau < 1) throw ArgumentError("permutation_entropy: delay must be >= 1");
    long long patterns = 1;
    for (int k = 2; k <= m; ++k) patterns *= k;
    const std::vector<double>& x = ts.samples;
    if (static_cast<long long>(x.size()) < 10 * patterns) {
        throw ArgumentError("permutation_entropy: series shorter than 10 * m! windows");
    }
    const std::size_t span = static_cast<std::size_t>(m - 1) * tau;
    const std::size_t windows = x.size() - span;

    std::vector<long long> counts(static_cast<std::size_t>(patterns), 0);
    int order[8];
    for (std::size_t i = 0; i < windows; ++i) {
        for (int k = 0; k < m; ++k) order[k] = k;
        // Insertion sort by (value, temporal index); ties keep time order.
        for (int a = 1; a < m; ++a) {
            const int key = order[a];
            const double kv = x[i + static_cast<std::size_t>(key) * tau];
            int b = a - 1;
            while (b >= 0 && x[i + static_cast<std::size_t>(order[b]) * tau] > kv) {
                order[b + 1] = order[b];
                --b;
            }
            order[b + 1] = key;
        }
        // Lehmer code of the ordering.
        long long code = 0;
        for (int a = 0; a < m; ++a) {
            int smaller = 0;
            for (int b = a + 1; b < m; ++b) {
                if (order[b] < order[a]) ++smaller;
            }
            code = code * (m - a) + smaller;
        }
        counts[static_cast<std::size_t>(code)] += 1;
    }

    double h = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        // divide directly: c == windows must give p == 1 exactly so a
        // single-pattern series reports entropy 0, not rounding residue
        const double p = static_cast<double>(c) / static_cast<double>(windows);
        h -= p * std::log(p);
    }
    const double norm = h / std::log(static_cast<double>(patterns));
    return std::clamp(norm, 0.0, 1.0);
}

double katz_fd(const TimeSeries& ts) {
    validate(ts, "katz_fd");
    const std::vector<double>& x = ts.samples;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) throw DegenerateInputError("katz_fd: constant series has no path length");

    const std::size_t n = x.size() - 1;  // segment count
    double length = 0.0;
    double diameter = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double step = x[i] - x[i - 1];
        length += std::sqrt(1.0 + step * step);
        const double di = static_cast<double>(i);
        const double dy = x[i] - x[0];
        diameter = std::max(diameter, std::sqrt(di * di + dy * dy));
    }
    const double log_n = std::log10(static_cast<double>(n));
    return log_n / (std::log10(diameter / length) + log_n);
}

double petrosian_fd(const TimeSeries& ts) {
    validate(ts, "petrosian_fd");
    const std::vector<double>& x = ts.samples;
    const double n = static_cast<double>(x.size());

    int sign_changes = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double diff = x[i] - x[i - 1];
        int s = 0;
        if (diff > 0.0) s = 1;
        else if (diff < 0.0) s = -1;
        else s = last_sign;  // zero differences carry the previous sign
        if (s != 0 && last_sign != 0 && s != last_sign) ++sign_changes;
        if (s != 0) last_sign = s;
    }

    const double log_n = std::log10(n);
    return log_n / (log_n + std::log10(n / (n + 0.4 * static_cast<double>(sign_changes))));
}

FeatureVector feature_vector(const TimeSeries& ts, const FeatureConfig& cfg) {
    validate(ts, "feature_vector");
    if (ts.samples.size() < 500) {
        throw ArgumentError("feature_vector: analysis window must hold at least 500 samples");
    }
    {
        double mean = 0.0;
        for (double v : ts.samples) mean += v;
        mean /= static_cast<double>(ts.samples.size());
        const double sd = sample_std(ts.samples);
        if (std::abs(mean) > 1e-6 || std::abs(sd - 1.0) > 1e-3) {
            throw ArgumentError("feature_vector: input must be normalized (zero mean, unit std)");
        }
    }

    FeatureVector fv;
    fv.dt = ts.dt;

    if (cfg.tau_override > 0 && cfg.dim_override > 0) {
        fv.tau = cfg.tau_override;
        fv.dim = cfg.dim_override;
    } else {
        const embedding::EmbeddingChoice choice = embedding::select_embedding(ts, cfg.select);
        fv.tau = cfg.tau_override > 0 ? cfg.tau_override : choice.tau;
        fv.dim = cfg.dim_override > 0 ? cfg.dim_override : choice.dim;
        switch (choice.tau_source) {
            case embedding::TauSource::DmiMinimum: break;
            case embedding::TauSource::AutocorrZero: fv.flags.push_back("tau_fallback_autocorr"); break;
            case embedding::TauSource::Floor: fv.flags.push_back("tau_floor"); break;
        }
        if (!choice.dim_converged) fv.flags.push_back("dim_unconverged");
        else if (!choice.dim_saturated) fv.flags.push_back("dim_unsaturated");
    }

    const auto guard = [&fv](const char* flag, auto&& fn) {
        try {
            fn();
        } catch (const Error&) {
            fv.flags.push_back(flag);
        }
    };

    guard("mle_failed", [&] {
        const MleResult r = max_lyapunov(ts, fv.dim, fv.tau, cfg.mle_k_max);
        fv.mle = r.lambda_per_sample;
        fv.mle_per_second = r.lambda_per_sample / ts.dt;
        if (r.fit_r2 < 0.8) fv.flags.push_back("mle_low_fit");
    });
    guard("dfa_failed", [&] {
        const DfaResult r = dfa(ts, cfg.dfa_min_window, cfg.dfa_max_window, cfg.dfa_n_windows);
        fv.dfa_alpha = r.alpha;
    });
    guard("corr_dim_failed", [&] {
        const CorrDimResult r = correlation_dimension(ts, fv.dim, fv.tau);
        fv.corr_dim = r.nu;
        if (!r.scaling_found) fv.flags.push_back("corr_dim_no_scaling");
    });
    guard("sampen_failed", [&] {
        const double v = sample_entropy(ts, cfg.entropy_m, cfg.entropy_r);
        if (std::isinf(v)) {
            fv.flags.push_back("sampen_infinite");
        } else {
            fv.sampen = v;
        }
    });
    guard("sampen_at_dim_failed", [&] {
        const double v = sample_entropy(ts, static_cast<int>(fv.dim), cfg.entropy_r);
        if (!std::isinf(v)) fv.sampen_at_dim = v;
    });
    guard("apen_failed", [&] { fv.apen = approximate_entropy(ts, cfg.entropy_m, cfg.entropy_r); });
    guard("perm_entropy_failed", [&] { fv.perm_entropy = permutation_entropy(ts, cfg.perm_m, cfg.perm_tau); });
    guard("katz_fd_failed", [&] { fv.katz_fd = katz_fd(ts); });
    guard("petrosian_fd_failed", [&] { fv.petrosian_fd = petrosian_fd(ts); });

    return fv;
}

}  // namespace resmix::metrics
