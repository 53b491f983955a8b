#pragma once

#include <cstdint>
#include <string>

#include "resmix/types.hpp"

namespace resmix::reservoir {

enum class SubstrateKind { Undoped, Doped };

const char* kind_name(SubstrateKind k);
SubstrateKind kind_from_name(const std::string& name);

/// Lumped-element model of one measurement cell: a 3x3 grid of terminals
/// joined by resistor-capacitor branches along grid edges.  Two terminals
/// are driven through a source resistance, one is grounded, two are read
/// out.  In the doped variant every branch also carries a charge-controlled
/// memristive conductance g(w) = g_min + w*(g_max - g_min) with
/// dw/dt = mobility * i * w * (1 - w), w clamped to [0, 1] after every
/// integration step.  The recording chain adds an optional first-order
/// low-pass stage, seeded additive Gaussian noise with an AR(1) colour
/// coefficient, and an optional quantizer.
struct SubstrateParams {
    SubstrateKind kind = SubstrateKind::Undoped;

    // terminal roles, node ids 0..8 row-major on the grid
    int in1_node = 0;
    int in2_node = 2;
    int out1_node = 6;
    int out2_node = 8;
    int gnd_node = 4;

    double branch_resistance = 0.0;   ///< ohms, every grid branch
    double branch_capacitance = 0.0;  ///< farads, every grid branch
    double source_resistance = 0.0;   ///< ohms, generator feed into IN nodes
    double out1_load = 0.0;           ///< ohms to ground at OUT1 (0 = open)
    double out2_load = 0.0;           ///< ohms to ground at OUT2 (0 = open)

    // memristive layer (doped substrates only)
    double mem_g_min = 0.0;    ///< siemens
    double mem_g_max = 0.0;    ///< siemens
    double mem_mobility = 0.0; ///< state units per coulomb
    double mem_w_init = 0.5;

    // recording chain
    double lowpass_cutoff_hz = 0.0;  ///< > 0 enables the output low-pass stage
    double noise_sigma = 0.0;        ///< volts, additive Gaussian
    double noise_ar = 0.0;           ///< AR(1) coefficient in (-1, 1)
    double quantize_step = 0.0;      ///< volts per level, 0 disables
    std::uint64_t seed = 0;

    bool has_seed = false;  ///< set by the loader; seed is mandatory in files
};

/// Simulated terminal recordings plus state diagnostics.
struct TerminalOutputs {
    TimeSeries out1;
    TimeSeries out2;
    double w_min = 1.0;  ///< smallest memristor state seen during the run
    double w_max = 0.0;  ///< largest; both stay 0.5 for undoped substrates
};

/// Runs the substrate on two equally sampled drive series using fixed-step
/// fourth-order Runge-Kutta at the signal spacing.  The step must satisfy
/// dt <= 0.1 * (smallest network RC time constant) or a ConfigError is
/// raised.
TerminalOutputs simulate(const TimeSeries& in1, const TimeSeries& in2,
                         const SubstrateParams& params);

/// Calibrated defaults matching the shipped parameter files.
SubstrateParams default_params(SubstrateKind kind);

/// Flat key = value parameter files (SI units, '#' comments).  The seed key
/// is mandatory; unknown keys are rejected.
SubstrateParams load_params(const std::string& path);
void save_params(const SubstrateParams& params, const std::string& path);

/// Throws ConfigError/ArgumentError when a field is out of range.
void validate_params(const SubstrateParams& params);

}  // namespace resmix::reservoir
