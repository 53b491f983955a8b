#pragma once

#include <map>
#include <string>
#include <vector>

#include "resmix/metrics.hpp"

namespace resmix::classify {

enum class Direction { Increases, Decreases, Mixed, Flat };
enum class Label { Sine, Triangle, Square, Unknown };
enum class Doping { Doped, Undoped, Indeterminate };

const char* direction_name(Direction d);
const char* label_name(Label l);
const char* doping_name(Doping d);

/// One doped-vs-undoped comparison at a single drive frequency.
struct TrendPoint {
    double frequency_hz = 0.0;
    double undoped = 0.0;
    double doped = 0.0;
};

struct TrendSeries {
    std::vector<TrendPoint> points;
    Direction aggregate = Direction::Flat;
};

/// Doped-vs-undoped trend table, one entry per analysis parameter.
struct TrendLedger {
    double epsilon_rel = 0.005;
    std::map<std::string, TrendSeries> parameters;
};

/// Builds the ledger.  A per-frequency delta counts as Flat inside the dead
/// band |doped - undoped| <= epsilon_rel * |undoped|; the aggregate is
/// Increases/Decreases when every non-Flat delta agrees in sign, Flat when
/// all deltas are Flat, and Mixed otherwise.
TrendLedger build_ledger(const std::map<std::string, std::vector<TrendPoint>>& raw,
                         double epsilon_rel = 0.005);

/// Waveform label from trends of permutation entropy, Katz dimension and the
/// first-terminal Petrosian dimension ("perm_entropy", "katz_fd",
/// "petrosian_fd_out1").  Missing entries raise IncompleteInputError.
Label decision_tree_a(const TrendLedger& ledger);

/// Waveform label from the two terminals' Petrosian trends
/// ("petrosian_fd_out1", "petrosian_fd_out2").
Label decision_tree_b(const TrendLedger& ledger);

/// Substrate doping from the scaling exponent alone.
Doping classify_doping(double dfa_alpha, double undoped_min = 0.50, double doped_max = 0.25);
Doping classify_doping(const metrics::FeatureVector& fv, double undoped_min = 0.50,
                       double doped_max = 0.25);

/// Band thresholds for the single-series classifier; fit on the simulated
/// corpus and stored in a versioned calibration file.
struct ParallelThresholds {
    int version = 1;
    double sp_sine_max = 0.0;      ///< permutation entropy, sine band upper edge
    double sp_triangle_max = 0.0;  ///< triangle band upper edge
    double dp_square_min = 0.0;    ///< Petrosian override threshold for square
    double conf_scale_sp = 0.05;   ///< confidence ramp width in S_p
    double conf_scale_dp = 0.005;  ///< confidence ramp width in D_P
};

struct ParallelResult {
    Label label = Label::Unknown;
    double confidence = 0.0;  ///< 0.5 at a band boundary, 1.0 deep inside
};

/// Labels one series from its feature vector: a Petrosian dimension above
/// dp_square_min is Square outright, otherwise the permutation entropy bands
/// map low to Sine, middle to Triangle and high to Square.
ParallelResult classify_parallel(const metrics::FeatureVector& fv,
                                 const ParallelThresholds& thresholds);

}  // namespace resmix::classify
