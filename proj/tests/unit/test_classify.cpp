#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "resmix/classify.hpp"
#include "resmix/errors.hpp"

using namespace resmix;
using classify::Direction;
using classify::Doping;
using classify::Label;
using classify::TrendLedger;
using classify::TrendPoint;
using classify::TrendSeries;

namespace {

/// Ledger with fixed aggregate directions, bypassing point arithmetic.
TrendLedger ledger_of(const std::map<std::string, Direction>& trends) {
    TrendLedger ledger;
    for (const auto& [name, dir] : trends) {
        TrendSeries s;
        s.aggregate = dir;
        s.points.push_back({290.0, 1.0, dir == Direction::Increases ? 2.0 : 0.5});
        ledger.parameters.emplace(name, s);
    }
    return ledger;
}

constexpr Direction kAll[] = {Direction::Increases, Direction::Decreases, Direction::Mixed,
                              Direction::Flat};

}  // namespace

TEST_CASE("per-frequency deltas aggregate by sign") {
    const auto mk = [](std::vector<double> doped) {
        std::map<std::string, std::vector<TrendPoint>> raw;
        std::vector<TrendPoint> pts;
        const double freqs[] = {290.0, 280.0, 275.0};
        for (std::size_t i = 0; i < doped.size(); ++i) {
            pts.push_back({freqs[i], 1.0, doped[i]});
        }
        raw["x"] = pts;
        return classify::build_ledger(raw).parameters.at("x").aggregate;
    };
    CHECK(mk({1.2, 1.3, 1.1}) == Direction::Increases);
    CHECK(mk({0.8, 0.7, 0.9}) == Direction::Decreases);
    CHECK(mk({0.8, 0.7, 1.2}) == Direction::Mixed);  // the square-wave scaling pattern
    CHECK(mk({1.0, 1.001, 0.999}) == Direction::Flat);
    // flats do not block an otherwise unanimous direction
    CHECK(mk({1.0, 1.2, 1.3}) == Direction::Increases);
    CHECK(mk({1.0, 0.8, 0.9}) == Direction::Decreases);
}

TEST_CASE("dead band scales with the undoped magnitude") {
    std::map<std::string, std::vector<TrendPoint>> raw;
    raw["x"] = {{290.0, 100.0, 100.4}};  // 0.4% change: inside the 0.5% band
    CHECK(classify::build_ledger(raw).parameters.at("x").aggregate == Direction::Flat);
    raw["x"] = {{290.0, 100.0, 100.6}};  // 0.6%: outside
    CHECK(classify::build_ledger(raw).parameters.at("x").aggregate == Direction::Increases);
}

TEST_CASE("aggregation ignores frequency order") {
    std::map<std::string, std::vector<TrendPoint>> fwd, rev;
    fwd["x"] = {{290.0, 1.0, 0.8}, {280.0, 1.0, 0.7}, {275.0, 1.0, 1.2}};
    rev["x"] = {{275.0, 1.0, 1.2}, {280.0, 1.0, 0.7}, {290.0, 1.0, 0.8}};
    CHECK(classify::build_ledger(fwd).parameters.at("x").aggregate ==
          classify::build_ledger(rev).parameters.at("x").aggregate);
}

TEST_CASE("ledger construction rejects unusable input") {
    std::map<std::string, std::vector<TrendPoint>> raw;
    raw["x"] = {};
    CHECK_THROWS_AS(classify::build_ledger(raw), ArgumentError);
    raw["x"] = {{290.0, 1.0, 0.5}};
    CHECK_THROWS_AS(classify::build_ledger(raw, -0.1), ArgumentError);
}

TEST_CASE("waveform tree over permutation entropy, Katz and first-terminal trends") {
    const auto label = [](Direction sp, Direction dk, Direction dp) {
        return classify::decision_tree_a(ledger_of(
            {{"perm_entropy", sp}, {"katz_fd", dk}, {"petrosian_fd_out1", dp}}));
    };
    // canonical column signatures
    CHECK(label(Direction::Increases, Direction::Increases, Direction::Increases) == Label::Sine);
    CHECK(label(Direction::Decreases, Direction::Mixed, Direction::Decreases) == Label::Triangle);
    CHECK(label(Direction::Increases, Direction::Increases, Direction::Decreases) == Label::Square);
    // the triangle rule outranks the first-terminal rule
    CHECK(label(Direction::Decreases, Direction::Mixed, Direction::Increases) == Label::Triangle);
    // ambiguous first-terminal trend routes to unknown
    CHECK(label(Direction::Increases, Direction::Increases, Direction::Flat) == Label::Unknown);
    CHECK(label(Direction::Increases, Direction::Increases, Direction::Mixed) == Label::Unknown);
}

TEST_CASE("waveform tree over the two terminal trends") {
    const auto label = [](Direction dp1, Direction dp2) {
        return classify::decision_tree_b(
            ledger_of({{"petrosian_fd_out1", dp1}, {"petrosian_fd_out2", dp2}}));
    };
    CHECK(label(Direction::Increases, Direction::Decreases) == Label::Sine);
    CHECK(label(Direction::Decreases, Direction::Increases) == Label::Triangle);
    CHECK(label(Direction::Decreases, Direction::Decreases) == Label::Square);
    CHECK(label(Direction::Flat, Direction::Flat) == Label::Unknown);
    // first terminal dominates
    CHECK(label(Direction::Increases, Direction::Increases) == Label::Sine);
}

TEST_CASE("both trees are total over their trend spaces") {
    for (Direction sp : kAll) {
        for (Direction dk : kAll) {
            for (Direction dp : kAll) {
                const Label l = classify::decision_tree_a(ledger_of(
                    {{"perm_entropy", sp}, {"katz_fd", dk}, {"petrosian_fd_out1", dp}}));
                CHECK((l == Label::Sine || l == Label::Triangle || l == Label::Square ||
                       l == Label::Unknown));
            }
        }
    }
    for (Direction dp1 : kAll) {
        for (Direction dp2 : kAll) {
            const Label l = classify::decision_tree_b(
                ledger_of({{"petrosian_fd_out1", dp1}, {"petrosian_fd_out2", dp2}}));
            CHECK((l == Label::Sine || l == Label::Triangle || l == Label::Square ||
                   l == Label::Unknown));
        }
    }
}

TEST_CASE("missing trends raise the incomplete-ledger error") {
    CHECK_THROWS_AS(classify::decision_tree_a(ledger_of({{"perm_entropy", Direction::Flat}})),
                    IncompleteInputError);
    CHECK_THROWS_AS(classify::decision_tree_b(ledger_of({{"petrosian_fd_out1", Direction::Flat}})),
                    IncompleteInputError);
}

TEST_CASE("scaling-exponent doping call uses a strict gap band") {
    CHECK(classify::classify_doping(0.62) == Doping::Undoped);
    CHECK(classify::classify_doping(0.18) == Doping::Doped);
    CHECK(classify::classify_doping(0.40) == Doping::Indeterminate);
    // boundary values stay in the gap
    CHECK(classify::classify_doping(0.50) == Doping::Indeterminate);
    CHECK(classify::classify_doping(0.25) == Doping::Indeterminate);
    CHECK_THROWS_AS(classify::classify_doping(0.4, 0.3, 0.5), ArgumentError);
}

TEST_CASE("doping call is monotone in the exponent") {
    Doping prev = classify::classify_doping(0.0);
    int transitions = 0;
    for (double a = 0.0; a <= 1.0; a += 0.01) {
        const Doping d = classify::classify_doping(a);
        if (d != prev) {
            ++transitions;
            prev = d;
        }
    }
    CHECK(transitions == 2);  // doped -> indeterminate -> undoped
}

TEST_CASE("feature-vector doping call requires the exponent") {
    metrics::FeatureVector fv;
    CHECK_THROWS_AS(classify::classify_doping(fv), IncompleteInputError);
    fv.dfa_alpha = 0.7;
    CHECK(classify::classify_doping(fv) == Doping::Undoped);
}

TEST_CASE("single-series bands map entropy low to high onto sine, triangle, square") {
    classify::ParallelThresholds th;
    th.sp_sine_max = 0.4;
    th.sp_triangle_max = 0.7;
    th.dp_square_min = 1.02;
    const auto fv = [](double sp, double dp) {
        metrics::FeatureVector f;
        f.perm_entropy = sp;
        f.petrosian_fd = dp;
        return f;
    };
    CHECK(classify::classify_parallel(fv(0.2, 1.00), th).label == Label::Sine);
    CHECK(classify::classify_parallel(fv(0.55, 1.00), th).label == Label::Triangle);
    CHECK(classify::classify_parallel(fv(0.9, 1.00), th).label == Label::Square);
    // a high sign-change dimension is a square override regardless of entropy
    CHECK(classify::classify_parallel(fv(0.2, 1.05), th).label == Label::Square);
}

TEST_CASE("confidence is half on a band boundary and grows inward") {
    classify::ParallelThresholds th;
    th.sp_sine_max = 0.4;
    th.sp_triangle_max = 0.7;
    th.dp_square_min = 1.02;
    metrics::FeatureVector f;
    f.petrosian_fd = 1.0;
    f.perm_entropy = 0.4;  // exactly on the sine/triangle boundary
    const auto at = classify::classify_parallel(f, th);
    CHECK(at.confidence == doctest::Approx(0.5).epsilon(1e-12));
    f.perm_entropy = 0.2;  // deep inside the sine band
    CHECK(classify::classify_parallel(f, th).confidence > 0.9);
}

TEST_CASE("single-series classifier validates its inputs") {
    classify::ParallelThresholds th;
    th.sp_sine_max = 0.7;
    th.sp_triangle_max = 0.4;  // edges out of order
    metrics::FeatureVector f;
    f.perm_entropy = 0.5;
    f.petrosian_fd = 1.0;
    CHECK_THROWS_AS(classify::classify_parallel(f, th), ConfigError);
    th.sp_sine_max = 0.4;
    th.sp_triangle_max = 0.7;
    metrics::FeatureVector empty;
    CHECK_THROWS_AS(classify::classify_parallel(empty, th), IncompleteInputError);
}

TEST_CASE("direction, label and doping names are stable") {
    CHECK(std::string(classify::direction_name(Direction::Increases)) == "increases");
    CHECK(std::string(classify::direction_name(Direction::Mixed)) == "mixed");
    CHECK(std::string(classify::label_name(Label::Triangle)) == "triangle");
    CHECK(std::string(classify::label_name(Label::Unknown)) == "unknown");
    CHECK(std::string(classify::doping_name(Doping::Indeterminate)) == "indeterminate");
}
