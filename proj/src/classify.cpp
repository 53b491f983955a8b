#include "resmix/classify.hpp"

#include <cmath>

#include "resmix/errors.hpp"

namespace resmix::classify {

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Increases: return "increases";
        case Direction::Decreases: return "decreases";
        case Direction::Mixed: return "mixed";
        case Direction::Flat: return "flat";
    }
    return "?";
}

const char* label_name(Label l) {
    switch (l) {
        case Label::Sine: return "sine";
        case Label::Triangle: return "triangle";
        case Label::Square: return "square";
        case Label::Unknown: return "unknown";
    }
    return "?";
}

const char* doping_name(Doping d) {
    switch (d) {
        case Doping::Doped: return "doped";
        case Doping::Undoped: return "undoped";
        case Doping::Indeterminate: return "indeterminate";
    }
    return "?";
}

TrendLedger build_ledger(const std::map<std::string, std::vector<TrendPoint>>& raw,
                         double epsilon_rel) {
    if (!(epsilon_rel >= 0.0) || !std::isfinite(epsilon_rel)) {
        throw ArgumentError("build_ledger: dead band must be a non-negative fraction");
    }
    TrendLedger ledger;
    ledger.epsilon_rel = epsilon_rel;
    for (const auto& [name, points] : raw) {
        if (points.empty()) {
            throw ArgumentError("build_ledger: parameter '" + name + "' has no comparisons");
        }
        TrendSeries series;
        series.points = points;
        int ups = 0, downs = 0, flats = 0;
        for (const TrendPoint& p : points) {
            if (!std::isfinite(p.undoped) || !std::isfinite(p.doped)) {
                throw DataError("build_ledger: non-finite comparison for '" + name + "'");
            }
            const double delta = p.doped - p.undoped;
            if (std::abs(delta) <= epsilon_rel * std::abs(p.undoped)) ++flats;
            else if (delta > 0.0) ++ups;
            else ++downs;
        }
        if (ups > 0 && downs == 0) series.aggregate = Direction::Increases;
        else if (downs > 0 && ups == 0) series.aggregate = Direction::Decreases;
        else if (flats == static_cast<int>(points.size())) series.aggregate = Direction::Flat;
        else series.aggregate = Direction::Mixed;
        ledger.parameters.emplace(name, std::move(series));
    }
    return ledger;
}

namespace {

Direction trend_of(const TrendLedger& ledger, const char* name, const char* who) {
    const auto it = ledger.parameters.find(name);
    if (it == ledger.parameters.end()) {
        throw IncompleteInputError(std::string(who) + ": ledger is missing parameter '" + name + "'");
    }
    return it->second.aggregate;
}

}  // namespace

Label decision_tree_a(const TrendLedger& ledger) {
    const Direction sp = trend_of(ledger, "perm_entropy", "decision_tree_a");
    const Direction dk = trend_of(ledger, "katz_fd", "decision_tree_a");
    const Direction dp = trend_of(ledger, "petrosian_fd_out1", "decision_tree_a");
    if (sp == Direction::Decreases && dk == Direction::Mixed) return Label::Triangle;
    if (dp == Direction::Increases) return Label::Sine;
    if (dp == Direction::Decreases) return Label::Square;
    return Label::Unknown;
}

Label decision_tree_b(const TrendLedger& ledger) {
    const Direction dp1 = trend_of(ledger, "petrosian_fd_out1", "decision_tree_b");
    const Direction dp2 = trend_of(ledger, "petrosian_fd_out2", "decision_tree_b");
    if (dp1 == Direction::Increases) return Label::Sine;
    if (dp2 == Direction::Increases) return Label::Triangle;
    if (dp1 == Direction::Decreases && dp2 == Direction::Decreases) return Label::Square;
    return Label::Unknown;
}

Doping classify_doping(double dfa_alpha, double undoped_min, double doped_max) {
    if (!std::isfinite(dfa_alpha)) throw DataError("classify_doping: non-finite scaling exponent");
    if (!(doped_max < undoped_min)) {
        throw ArgumentError("classify_doping: thresholds must leave a gap (doped_max < undoped_min)");
    }
    if (dfa_alpha > undoped_min) return Doping::Undoped;
    if (dfa_alpha < doped_max) return Doping::Doped;
    return Doping::Indeterminate;
}

Doping classify_doping(const metrics::FeatureVector& fv, double undoped_min, double doped_max) {
    if (!fv.dfa_alpha.has_value()) {
        throw IncompleteInputError("classify_doping: feature vector lacks the scaling exponent");
    }
    return classify_doping(*fv.dfa_alpha, undoped_min, doped_max);
}

ParallelResult classify_parallel(const metrics::FeatureVector& fv,
                                 const ParallelThresholds& thresholds) {
    if (!(thresholds.sp_sine_max < thresholds.sp_triangle_max)) {
        throw ConfigError("classify_parallel: band edges out of order");
    }
    if (!(thresholds.conf_scale_sp > 0.0) || !(thresholds.conf_scale_dp > 0.0)) {
        throw ConfigError("classify_parallel: confidence scales must be positive");
    }
    if (!fv.perm_entropy.has_value() || !fv.petrosian_fd.has_value()) {
        throw IncompleteInputError("classify_parallel: need permutation entropy and Petrosian dimension");
    }
    const double sp = *fv.perm_entropy;
    const double dp = *fv.petrosian_fd;

    // Confidence ramps from 0.5 at a boundary to 1.0 one scale-width away.
    const auto ramp = [](double distance, double scale) {
        const double c = 0.5 + 0.5 * (distance / scale);
        return c > 1.0 ? 1.0 : c;
    };

    ParallelResult result;
    if (dp > thresholds.dp_square_min) {
        result.label = Label::Square;
        result.confidence = ramp(dp - thresholds.dp_square_min, thresholds.conf_scale_dp);
        return result;
    }
    if (sp <= thresholds.sp_sine_max) {
        result.label = Label::Sine;
        result.confidence = ramp(thresholds.sp_sine_max - sp, thresholds.conf_scale_sp);
    } else if (sp <= thresholds.sp_triangle_max) {
        result.label = Label::Triangle;
        const double margin = std::min(sp - thresholds.sp_sine_max, thresholds.sp_triangle_max - sp);
        result.confidence = ramp(margin, thresholds.conf_scale_sp);
    } else {
        result.label = Label::Square;
        result.confidence = ramp(sp - thresholds.sp_triangle_max, thresholds.conf_scale_sp);
    }
    return result;
}

}  // namespace resmix::classify
