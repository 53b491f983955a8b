#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resmix/classify.hpp"
#include "resmix/metrics.hpp"
#include "resmix/reservoir.hpp"
#include "resmix/signals.hpp"

namespace resmix::pipeline {

/// Full description of one batch run: the probe tone, the second-channel
/// grid, the two substrate parameter files, analysis overrides and the
/// output location.
struct RunManifest {
    signals::WaveformSpec probe;
    std::vector<signals::WaveformSpec> second_channel;
    double sample_rate_hz = 50000.0;
    double duration_s = 0.05;
    std::string params_undoped;
    std::string params_doped;
    std::optional<std::uint64_t> seed_undoped;  ///< overrides the file seed
    std::optional<std::uint64_t> seed_doped;
    metrics::FeatureConfig analysis;
    int settle_periods = 10;    ///< probe periods discarded before the window
    int window_samples = 500;   ///< analysis window length
    std::string thresholds_path;
    std::string output_dir;
};

/// Reads a manifest JSON file.  Relative parameter/threshold paths resolve
/// against the manifest's directory; output_dir resolves against the
/// working directory.  Referenced files must exist.
RunManifest load_manifest(const std::string& path);

/// Label set and diagnostics for one stimulus pair (both substrates).
struct StimulusOutcome {
    std::string shape;      ///< second-channel waveform name
    double frequency_hz = 0.0;
    std::string stimulus;   ///< merged drive label, e.g. "sine_300hz+square_275hz"
    classify::Label tree_a = classify::Label::Unknown;
    classify::Label tree_b = classify::Label::Unknown;
    std::optional<double> alpha_undoped;  ///< OUT1 scaling exponents
    std::optional<double> alpha_doped;
    std::string report_path;
    std::vector<std::string> errors;
};

struct PipelineResult {
    std::string output_dir;
    std::vector<StimulusOutcome> outcomes;
    std::vector<std::string> series_files;
    std::vector<std::string> feature_files;
    std::vector<std::string> ledger_files;
};

/// Runs synth -> simulate -> window -> normalize -> stationarity check ->
/// feature extraction on both read-out terminals, builds one doped-versus-
/// undoped trend ledger per waveform shape, labels every stimulus with both
/// decision trees and the single-series classifier, and writes every
/// intermediate under output_dir with deterministic names.  Module errors
/// are recorded per stimulus and the run continues.
PipelineResult run_pipeline(const RunManifest& manifest);

}  // namespace resmix::pipeline
