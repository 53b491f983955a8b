#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "resmix/errors.hpp"
#include "resmix/io.hpp"
#include "resmix/signals.hpp"
#include "../support/generators.hpp"

using namespace resmix;

namespace {

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("significant-digit rounding") {
    CHECK(io::round_sig(1.0) == 1.0);
    CHECK(io::round_sig(1.0 / 3.0) == 0.333333333333);
    CHECK(io::round_sig(123456789012345.0) == 123456789012000.0);
    CHECK(io::round_sig(-2.5e-7, 3) == -2.5e-7);
    CHECK_THROWS_AS(io::round_sig(std::nan("")), NumericalError);
}

TEST_CASE("series files round-trip within a nanovolt") {
    signals::WaveformSpec spec;
    spec.shape = signals::Waveform::Triangle;
    spec.frequency_hz = 290.0;
    spec.amplitude_pp = 10.0;
    const auto ts = signals::synthesize(spec, 2e-5, 1000);
    const std::string path = temp_file("resmix_roundtrip.csv");
    io::write_series_csv(ts, path);
    const auto back = io::read_series_csv(path);
    REQUIRE(back.samples.size() == ts.samples.size());
    CHECK(back.dt == doctest::Approx(ts.dt).epsilon(1e-9));
    for (std::size_t i = 0; i < ts.samples.size(); ++i) {
        CHECK(std::abs(back.samples[i] - ts.samples[i]) < 1e-9);
    }
    std::filesystem::remove(path);
}

TEST_CASE("a three-row file loads as three samples") {
    const std::string path = temp_file("resmix_three.csv");
    write_text(path, "t_s,v_volts\n0,1.5\n0.001,2.5\n0.002,-3.5\n");
    const auto ts = io::read_series_csv(path);
    CHECK(ts.samples.size() == 3);
    CHECK(ts.dt == doctest::Approx(1e-3));
    CHECK(ts.samples[2] == -3.5);
    std::filesystem::remove(path);
}

TEST_CASE("ingest rejects malformed files with the offending row named") {
    const std::string path = temp_file("resmix_bad.csv");

    write_text(path, "time,volts\n0,1\n");
    CHECK_THROWS_AS(io::read_series_csv(path), DataError);

    write_text(path, "t_s,v_volts\n0,1\n0.001,abc\n0.002,2\n");
    CHECK_THROWS_WITH_AS(io::read_series_csv(path), doctest::Contains("row 3"), DataError);

    write_text(path, "t_s,v_volts\n0,1\n0.001\n");
    CHECK_THROWS_AS(io::read_series_csv(path), DataError);

    write_text(path, "t_s,v_volts\n0,1\n");
    CHECK_THROWS_AS(io::read_series_csv(path), DataError);  // single sample

    std::filesystem::remove(path);
}

TEST_CASE("ingest rejects non-increasing or jittery timestamps") {
    const std::string path = temp_file("resmix_jitter.csv");

    write_text(path, "t_s,v_volts\n0,1\n0.002,2\n0.001,3\n");
    CHECK_THROWS_AS(io::read_series_csv(path), DataError);

    // one step 0.2% off the median
    write_text(path, "t_s,v_volts\n0,1\n0.001,2\n0.002,3\n0.003002,4\n0.004002,5\n");
    CHECK_THROWS_WITH_AS(io::read_series_csv(path), doctest::Contains("jitter"), DataError);

    // 0.05% wobble is accepted
    write_text(path, "t_s,v_volts\n0,1\n0.001,2\n0.0020005,3\n0.003,4\n");
    CHECK_NOTHROW(io::read_series_csv(path));

    std::filesystem::remove(path);
}

TEST_CASE("feature objects omit failed metrics and keep flags") {
    metrics::FeatureVector fv;
    fv.tau = 4;
    fv.dim = 3;
    fv.dt = 2e-5;
    fv.dfa_alpha = 0.61234567890123;
    fv.perm_entropy = 0.5;
    fv.flags = {"mle_failed"};
    prep::StationarityReport st;
    st.adf_statistic = -5.5;
    st.p_value = 1e-6;
    st.lags_used = 2;
    st.reject_unit_root = true;
    const SeriesMeta meta{"out1", "sine_300hz+sine_290hz", "undoped"};
    const io::json j = io::feature_json(fv, meta, &st);

    CHECK(j.at("terminal") == "out1");
    CHECK(j.at("substrate") == "undoped");
    CHECK(j.at("tau") == 4);
    CHECK(j.at("dim") == 3);
    CHECK(j.at("dfa_alpha").get<double>() == doctest::Approx(0.61234567890123));
    CHECK(j.at("perm_entropy").get<double>() == 0.5);
    CHECK_FALSE(j.contains("mle"));
    CHECK_FALSE(j.contains("sampen"));
    CHECK(j.at("flags").size() == 1);
    CHECK(j.at("stationarity").at("reject_unit_root") == true);
}

TEST_CASE("ledger objects round-trip through their JSON form") {
    std::map<std::string, std::vector<classify::TrendPoint>> raw;
    raw["perm_entropy"] = {{290.0, 0.5, 0.4}, {280.0, 0.52, 0.41}, {275.0, 0.49, 0.42}};
    raw["katz_fd"] = {{290.0, 1.01, 1.05}, {280.0, 1.02, 1.0}, {275.0, 1.0, 1.0}};
    const auto ledger = classify::build_ledger(raw);
    const auto j = io::ledger_json(ledger);
    const auto back = io::ledger_from_json(j);
    CHECK(back.parameters.size() == ledger.parameters.size());
    for (const auto& [name, series] : ledger.parameters) {
        CHECK(back.parameters.at(name).aggregate == series.aggregate);
        CHECK(back.parameters.at(name).points.size() == series.points.size());
    }
}

TEST_CASE("threshold files round-trip") {
    classify::ParallelThresholds t;
    t.sp_sine_max = 0.431;
    t.sp_triangle_max = 0.62;
    t.dp_square_min = 1.0183;
    const std::string path = temp_file("resmix_thresholds.json");
    io::save_thresholds(t, path);
    const auto back = io::load_thresholds(path);
    CHECK(back.sp_sine_max == t.sp_sine_max);
    CHECK(back.sp_triangle_max == t.sp_triangle_max);
    CHECK(back.dp_square_min == t.dp_square_min);
    CHECK(back.conf_scale_sp == t.conf_scale_sp);
    CHECK(back.conf_scale_dp == t.conf_scale_dp);
    std::filesystem::remove(path);
}

TEST_CASE("threshold loading names the broken field") {
    const std::string path = temp_file("resmix_thresholds_bad.json");
    write_text(path, "{\"version\": 1, \"sp_sine_max\": 0.4}\n");
    CHECK_THROWS_AS(io::load_thresholds(path), ConfigError);
    write_text(path, "not json");
    CHECK_THROWS_AS(io::load_thresholds(path), DataError);
    std::filesystem::remove(path);
}
