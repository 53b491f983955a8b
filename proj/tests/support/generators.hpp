#pragma once

// Reference dynamical systems and noise sources used across the test suite.

#include <cmath>
#include <cstddef>
#include <vector>

#include "resmix/rng.hpp"
#include "resmix/types.hpp"

namespace testsup {

inline resmix::TimeSeries series_of(std::vector<double> samples, double dt = 1.0) {
    resmix::TimeSeries ts;
    ts.samples = std::move(samples);
    ts.dt = dt;
    return ts;
}

inline resmix::TimeSeries white_noise(std::uint32_t seed, std::size_t n, double dt = 1.0) {
    resmix::GaussianRng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return series_of(std::move(x), dt);
}

inline resmix::TimeSeries uniform_noise(std::uint32_t seed, std::size_t n, double dt = 1.0) {
    resmix::GaussianRng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform();
    return series_of(std::move(x), dt);
}

/// x_{t+1} = r x_t (1 - x_t); transient discarded.
inline resmix::TimeSeries logistic_map(double r, double x0, std::size_t n,
                                       std::size_t transient = 100) {
    double x = x0;
    for (std::size_t i = 0; i < transient; ++i) x = r * x * (1.0 - x);
    std::vector<double> out(n);
    for (auto& v : out) {
        v = x;
        x = r * x * (1.0 - x);
    }
    return series_of(std::move(out));
}

/// Henon map x-series, a = 1.4, b = 0.3.
inline resmix::TimeSeries henon_x(std::size_t n, std::size_t transient = 200) {
    double x = 0.1, y = 0.1;
    for (std::size_t i = 0; i < transient; ++i) {
        const double nx = 1.0 - 1.4 * x * x + y;
        y = 0.3 * x;
        x = nx;
    }
    std::vector<double> out(n);
    for (auto& v : out) {
        v = x;
        const double nx = 1.0 - 1.4 * x * x + y;
        y = 0.3 * x;
        x = nx;
    }
    return series_of(std::move(out));
}

/// Lorenz x-component, sigma = 10, rho = 28, beta = 8/3, RK4 at step h.
inline resmix::TimeSeries lorenz_x(std::size_t n, double h = 0.01, std::size_t transient = 3000) {
    double s[3] = {1.0, 1.0, 1.0};
    const auto deriv = [](const double* y, double* d) {
        d[0] = 10.0 * (y[1] - y[0]);
        d[1] = y[0] * (28.0 - y[2]) - y[1];
        d[2] = y[0] * y[1] - (8.0 / 3.0) * y[2];
    };
    const auto step = [&](double* y) {
        double k1[3], k2[3], k3[3], k4[3], t[3];
        deriv(y, k1);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k1[i];
        deriv(t, k2);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k2[i];
        deriv(t, k3);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + h * k3[i];
        deriv(t, k4);
        for (int i = 0; i < 3; ++i) y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };
    for (std::size_t i = 0; i < transient; ++i) step(s);
    std::vector<double> out(n);
    for (auto& v : out) {
        v = s[0];
        step(s);
    }
    return series_of(std::move(out), h);
}

}  // namespace testsup
