#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "resmix/errors.hpp"
#include "resmix/reservoir.hpp"
#include "resmix/signals.hpp"
#include "../support/generators.hpp"

using namespace resmix;
using reservoir::SubstrateKind;
using reservoir::SubstrateParams;

namespace {

constexpr double kDt = 2e-5;  // 50 kHz

TimeSeries drive(double freq, signals::Waveform shape, std::size_t n = 2000) {
    signals::WaveformSpec spec;
    spec.shape = shape;
    spec.frequency_hz = freq;
    spec.amplitude_pp = 10.0;
    return signals::synthesize(spec, kDt, n);
}

/// Copy with the recording chain disabled so the network response itself is
/// observable.
SubstrateParams quiet(SubstrateKind kind) {
    SubstrateParams p = reservoir::default_params(kind);
    p.noise_sigma = 0.0;
    p.quantize_step = 0.0;
    p.lowpass_cutoff_hz = 0.0;
    return p;
}

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("zero drive produces zero read-out") {
    const auto zero = testsup::series_of(std::vector<double>(500, 0.0), kDt);
    const auto out = reservoir::simulate(zero, zero, quiet(SubstrateKind::Undoped));
    REQUIRE(out.out1.samples.size() == 500);
    for (double v : out.out1.samples) CHECK(v == 0.0);
    for (double v : out.out2.samples) CHECK(v == 0.0);
}

TEST_CASE("the undoped network is linear: superposition holds") {
    const auto a = drive(300.0, signals::Waveform::Sine, 1500);
    const auto b = drive(290.0, signals::Waveform::Triangle, 1500);
    const auto zero = testsup::series_of(std::vector<double>(1500, 0.0), kDt);
    const auto p = quiet(SubstrateKind::Undoped);

    const auto both = reservoir::simulate(a, b, p);
    const auto only1 = reservoir::simulate(a, zero, p);
    const auto only2 = reservoir::simulate(zero, b, p);

    double worst = 0.0;
    for (std::size_t i = 0; i < both.out1.samples.size(); ++i) {
        worst = std::max(worst, std::abs(both.out1.samples[i] - only1.out1.samples[i] -
                                         only2.out1.samples[i]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("the doped network is nonlinear: superposition fails") {
    const auto a = drive(300.0, signals::Waveform::Sine, 1500);
    const auto b = drive(290.0, signals::Waveform::Triangle, 1500);
    const auto zero = testsup::series_of(std::vector<double>(1500, 0.0), kDt);
    const auto p = quiet(SubstrateKind::Doped);

    const auto both = reservoir::simulate(a, b, p);
    const auto only1 = reservoir::simulate(a, zero, p);
    const auto only2 = reservoir::simulate(zero, b, p);

    double worst = 0.0;
    for (std::size_t i = 0; i < both.out1.samples.size(); ++i) {
        worst = std::max(worst, std::abs(both.out1.samples[i] - only1.out1.samples[i] -
                                         only2.out1.samples[i]));
    }
    CHECK(worst > 1e-3);
}

TEST_CASE("a passive network never exceeds the drive amplitude") {
    const auto a = drive(300.0, signals::Waveform::Square, 2000);
    const auto b = drive(275.0, signals::Waveform::Square, 2000);
    for (const SubstrateKind kind : {SubstrateKind::Undoped, SubstrateKind::Doped}) {
        const auto out = reservoir::simulate(a, b, quiet(kind));
        for (double v : out.out1.samples) CHECK(std::abs(v) <= 10.0);
        for (double v : out.out2.samples) CHECK(std::abs(v) <= 10.0);
    }
}

TEST_CASE("memristor states stay inside the unit interval") {
    const auto a = drive(300.0, signals::Waveform::Sine, 3000);
    const auto b = drive(280.0, signals::Waveform::Square, 3000);
    const auto out = reservoir::simulate(a, b, quiet(SubstrateKind::Doped));
    CHECK(out.w_min >= 0.0);
    CHECK(out.w_max <= 1.0);
    CHECK(out.w_min <= out.w_max);
}

TEST_CASE("undoped runs report the parked state marker") {
    const auto a = drive(300.0, signals::Waveform::Sine, 500);
    const auto out = reservoir::simulate(a, a, quiet(SubstrateKind::Undoped));
    CHECK(out.w_min == 0.5);
    CHECK(out.w_max == 0.5);
}

TEST_CASE("identical settings reproduce identical recordings") {
    const auto a = drive(300.0, signals::Waveform::Sine, 1000);
    const auto b = drive(290.0, signals::Waveform::Sine, 1000);
    const auto p = reservoir::default_params(SubstrateKind::Doped);  // noise on
    const auto r1 = reservoir::simulate(a, b, p);
    const auto r2 = reservoir::simulate(a, b, p);
    CHECK(r1.out1.samples == r2.out1.samples);
    CHECK(r1.out2.samples == r2.out2.samples);
}

TEST_CASE("different seeds decorrelate only the recording noise") {
    const auto a = drive(300.0, signals::Waveform::Sine, 1000);
    const auto b = drive(290.0, signals::Waveform::Sine, 1000);
    auto p = reservoir::default_params(SubstrateKind::Undoped);
    p.noise_sigma = 1e-3;
    auto q = p;
    q.seed = p.seed + 1;
    const auto r1 = reservoir::simulate(a, b, p);
    const auto r2 = reservoir::simulate(a, b, q);
    CHECK(r1.out1.samples != r2.out1.samples);
    double worst = 0.0;
    for (std::size_t i = 0; i < r1.out1.samples.size(); ++i) {
        worst = std::max(worst, std::abs(r1.out1.samples[i] - r2.out1.samples[i]));
    }
    CHECK(worst < 1e-2);  // only the noise differs
}

TEST_CASE("anti-correlated recording noise alternates sign") {
    const auto zero = testsup::series_of(std::vector<double>(4000, 0.0), kDt);
    auto p = quiet(SubstrateKind::Undoped);
    p.noise_sigma = 1e-3;
    p.noise_ar = -0.9;
    const auto out = reservoir::simulate(zero, zero, p);
    // lag-1 autocorrelation of the pure noise recording
    double num = 0.0, den = 0.0;
    const auto& x = out.out1.samples;
    for (std::size_t i = 1; i < x.size(); ++i) num += x[i] * x[i - 1];
    for (double v : x) den += v * v;
    CHECK(num / den < -0.7);
}

TEST_CASE("the quantizer snaps recordings to the step grid") {
    const auto a = drive(300.0, signals::Waveform::Sine, 800);
    auto p = quiet(SubstrateKind::Undoped);
    p.quantize_step = 1e-3;
    const auto out = reservoir::simulate(a, a, p);
    for (double v : out.out1.samples) {
        const double steps = v / 1e-3;
        CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    }
}

TEST_CASE("a step too coarse for the network stiffness is rejected") {
    const auto a = testsup::series_of(std::vector<double>(100, 0.0), 0.5);
    CHECK_THROWS_AS(reservoir::simulate(a, a, quiet(SubstrateKind::Undoped)), ConfigError);
}

TEST_CASE("drive series must agree in shape") {
    const auto a = drive(300.0, signals::Waveform::Sine, 500);
    auto b = drive(290.0, signals::Waveform::Sine, 400);
    CHECK_THROWS_AS(reservoir::simulate(a, b, quiet(SubstrateKind::Undoped)), ArgumentError);
    b = drive(290.0, signals::Waveform::Sine, 500);
    b.dt = kDt * 2.0;
    CHECK_THROWS_AS(reservoir::simulate(a, b, quiet(SubstrateKind::Undoped)), ArgumentError);
}

TEST_CASE("read-out metadata names terminal, stimulus and substrate") {
    auto a = drive(300.0, signals::Waveform::Sine, 500);
    auto b = drive(290.0, signals::Waveform::Triangle, 500);
    a.meta.stimulus = "sine_300hz";
    b.meta.stimulus = "triangle_290hz";
    const auto out = reservoir::simulate(a, b, quiet(SubstrateKind::Doped));
    CHECK(out.out1.meta.terminal == "out1");
    CHECK(out.out2.meta.terminal == "out2");
    CHECK(out.out1.meta.stimulus == "sine_300hz+triangle_290hz");
    CHECK(out.out1.meta.substrate == "doped");
}

TEST_CASE("parameter validation rejects out-of-range fields") {
    auto p = reservoir::default_params(SubstrateKind::Undoped);
    p.branch_resistance = -1.0;
    CHECK_THROWS_AS(reservoir::validate_params(p), ConfigError);
    p = reservoir::default_params(SubstrateKind::Undoped);
    p.gnd_node = 9;
    CHECK_THROWS_AS(reservoir::validate_params(p), ConfigError);
    p = reservoir::default_params(SubstrateKind::Undoped);
    p.out1_node = p.in1_node;
    CHECK_THROWS_AS(reservoir::validate_params(p), ConfigError);
    p = reservoir::default_params(SubstrateKind::Doped);
    p.mem_g_max = p.mem_g_min / 2.0;
    CHECK_THROWS_AS(reservoir::validate_params(p), ConfigError);
    p = reservoir::default_params(SubstrateKind::Undoped);
    p.noise_ar = 1.0;
    CHECK_THROWS_AS(reservoir::validate_params(p), ConfigError);
}

TEST_CASE("parameter files round-trip") {
    const auto p = reservoir::default_params(SubstrateKind::Doped);
    const std::string path = temp_file("resmix_params_roundtrip.conf");
    reservoir::save_params(p, path);
    const auto q = reservoir::load_params(path);
    CHECK(q.kind == p.kind);
    CHECK(q.branch_resistance == p.branch_resistance);
    CHECK(q.branch_capacitance == p.branch_capacitance);
    CHECK(q.source_resistance == p.source_resistance);
    CHECK(q.out1_load == p.out1_load);
    CHECK(q.out2_load == p.out2_load);
    CHECK(q.mem_g_min == p.mem_g_min);
    CHECK(q.mem_g_max == p.mem_g_max);
    CHECK(q.mem_mobility == p.mem_mobility);
    CHECK(q.mem_w_init == p.mem_w_init);
    CHECK(q.lowpass_cutoff_hz == p.lowpass_cutoff_hz);
    CHECK(q.noise_sigma == p.noise_sigma);
    CHECK(q.noise_ar == p.noise_ar);
    CHECK(q.quantize_step == p.quantize_step);
    CHECK(q.seed == p.seed);
    std::filesystem::remove(path);
}

TEST_CASE("parameter files require a seed and reject unknown keys") {
    const std::string path = temp_file("resmix_params_bad.conf");
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("kind = undoped\nbranch_resistance = 1e4\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(reservoir::load_params(path), ConfigError);
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("kind = undoped\nseed = 1\nbogus_key = 2\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(reservoir::load_params(path), ConfigError);
    std::filesystem::remove(path);
}

// The shipped parameter files and the built-in defaults must stay in sync;
// regenerate the files (scripts/recalibrate.py) whenever the defaults move.
TEST_CASE("shipped parameter files equal the built-in defaults") {
    for (const SubstrateKind kind : {SubstrateKind::Undoped, SubstrateKind::Doped}) {
        const auto built_in = reservoir::default_params(kind);
        const std::string path =
            std::string(RESMIX_SHARE_DIR) + "/params/" + reservoir::kind_name(kind) + ".conf";
        const auto shipped = reservoir::load_params(path);
        CHECK(shipped.branch_resistance == built_in.branch_resistance);
        CHECK(shipped.branch_capacitance == built_in.branch_capacitance);
        CHECK(shipped.source_resistance == built_in.source_resistance);
        CHECK(shipped.out1_load == built_in.out1_load);
        CHECK(shipped.out2_load == built_in.out2_load);
        CHECK(shipped.mem_g_min == built_in.mem_g_min);
        CHECK(shipped.mem_g_max == built_in.mem_g_max);
        CHECK(shipped.mem_mobility == built_in.mem_mobility);
        CHECK(shipped.mem_w_init == built_in.mem_w_init);
        CHECK(shipped.lowpass_cutoff_hz == built_in.lowpass_cutoff_hz);
        CHECK(shipped.noise_sigma == built_in.noise_sigma);
        CHECK(shipped.noise_ar == built_in.noise_ar);
        CHECK(shipped.quantize_step == built_in.quantize_step);
        CHECK(shipped.seed == built_in.seed);
    }
}
