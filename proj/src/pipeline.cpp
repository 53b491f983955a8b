#include "resmix/pipeline.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resmix/errors.hpp"
#include "resmix/io.hpp"
#include "resmix/prep.hpp"

namespace fs = std::filesystem;

namespace resmix::pipeline {

namespace {

std::string freq_tag(double hz) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", hz);
    return std::string(buf) + "hz";
}

std::string spec_label(const signals::WaveformSpec& spec) {
    return std::string(signals::waveform_name(spec.shape)) + "_" + freq_tag(spec.frequency_hz);
}

signals::WaveformSpec spec_from_json(const io::json& j, const char* who) {
    signals::WaveformSpec spec;
    if (!j.contains("shape") || !j.contains("frequency_hz")) {
        throw ConfigError(std::string(who) + ": waveform needs 'shape' and 'frequency_hz'");
    }
    spec.shape = signals::waveform_from_name(j.at("shape").get<std::string>());
    spec.frequency_hz = j.at("frequency_hz").get<double>();
    spec.amplitude_pp = j.value("amplitude_pp", 10.0);
    spec.phase_rad = j.value("phase_rad", 0.0);
    spec.dc_offset = j.value("dc_offset", 0.0);
    if (!(spec.frequency_hz > 0.0) || !std::isfinite(spec.frequency_hz)) {
        throw ConfigError(std::string(who) + ": frequency must be positive");
    }
    if (spec.amplitude_pp < 0.0 || !std::isfinite(spec.amplitude_pp)) {
        throw ConfigError(std::string(who) + ": amplitude must be non-negative");
    }
    return spec;
}

std::string resolve_against(const fs::path& base, const std::string& raw) {
    const fs::path p(raw);
    if (p.is_absolute()) return p.string();
    return (base / p).lexically_normal().string();
}

/// Everything analyzed for one (stimulus, substrate, terminal) slot.
struct SeriesAnalysis {
    metrics::FeatureVector fv;
    prep::StationarityReport stationarity;
    bool ok = false;
};

}  // namespace

RunManifest load_manifest(const std::string& path) {
    const io::json j = io::read_json_file(path);
    const fs::path base = fs::path(path).parent_path();

    RunManifest m;
    try {
        if (j.value("version", 1) != 1) throw ConfigError("manifest: unsupported version");
        m.probe = spec_from_json(j.at("probe"), "manifest probe");
        if (!j.contains("second_channel") || !j.at("second_channel").is_array() ||
            j.at("second_channel").empty()) {
            throw ConfigError("manifest: 'second_channel' must be a non-empty array");
        }
        for (const auto& entry : j.at("second_channel")) {
            m.second_channel.push_back(spec_from_json(entry, "manifest second_channel"));
        }
        m.sample_rate_hz = j.value("sample_rate_hz", 50000.0);
        m.duration_s = j.value("duration_s", 0.05);
        m.params_undoped = resolve_against(base, j.at("params_undoped").get<std::string>());
        m.params_doped = resolve_against(base, j.at("params_doped").get<std::string>());
        if (j.contains("seed_undoped") && !j.at("seed_undoped").is_null()) {
            m.seed_undoped = j.at("seed_undoped").get<std::uint64_t>();
        }
        if (j.contains("seed_doped") && !j.at("seed_doped").is_null()) {
            m.seed_doped = j.at("seed_doped").get<std::uint64_t>();
        }
        if (j.contains("analysis")) {
            const auto& a = j.at("analysis");
            m.analysis.tau_override = a.value("tau", 0);
            m.analysis.dim_override = a.value("dim", std::size_t{0});
            m.analysis.entropy_m = a.value("entropy_m", 2);
            m.analysis.entropy_r = a.value("entropy_r", 0.2);
            m.analysis.perm_m = a.value("perm_m", 3);
            m.analysis.perm_tau = a.value("perm_tau", 1);
            m.analysis.dfa_min_window = a.value("dfa_min_window", 4);
            m.analysis.dfa_max_window = a.value("dfa_max_window", 0);
            m.analysis.dfa_n_windows = a.value("dfa_n_windows", 16);
        }
        m.settle_periods = j.value("settle_periods", 10);
        m.window_samples = j.value("window_samples", 500);
        if (j.contains("thresholds")) {
            m.thresholds_path = resolve_against(base, j.at("thresholds").get<std::string>());
        }
        m.output_dir = j.value("output_dir", std::string("runs/out"));
    } catch (const io::json::exception& e) {
        throw ConfigError("manifest '" + path + "': " + e.what());
    }

    if (!(m.sample_rate_hz > 0.0)) throw ConfigError("manifest: sample_rate_hz must be positive");
    if (!(m.duration_s > 0.0)) throw ConfigError("manifest: duration_s must be positive");
    if (m.settle_periods < 0) throw ConfigError("manifest: settle_periods must be >= 0");
    if (m.window_samples < 500) throw ConfigError("manifest: window_samples must be >= 500");
    for (const std::string& p : {m.params_undoped, m.params_doped}) {
        if (!fs::exists(p)) throw ConfigError("manifest references missing file '" + p + "'");
    }
    if (!m.thresholds_path.empty() && !fs::exists(m.thresholds_path)) {
        throw ConfigError("manifest references missing file '" + m.thresholds_path + "'");
    }
    return m;
}

PipelineResult run_pipeline(const RunManifest& manifest) {
    const double dt = 1.0 / manifest.sample_rate_hz;
    const std::size_t total =
        static_cast<std::size_t>(std::llround(manifest.duration_s * manifest.sample_rate_hz));
    const std::size_t settle = static_cast<std::size_t>(
        std::ceil(manifest.settle_periods * manifest.sample_rate_hz / manifest.probe.frequency_hz));
    const std::size_t window = static_cast<std::size_t>(manifest.window_samples);
    if (total < settle + window) {
        throw ConfigError("pipeline: duration too short for the settling discard plus the window");
    }

    reservoir::SubstrateParams undoped = reservoir::load_params(manifest.params_undoped);
    reservoir::SubstrateParams doped = reservoir::load_params(manifest.params_doped);
    if (undoped.kind != reservoir::SubstrateKind::Undoped ||
        doped.kind != reservoir::SubstrateKind::Doped) {
        throw ConfigError("pipeline: parameter files disagree with their substrate roles");
    }
    if (manifest.seed_undoped) undoped.seed = *manifest.seed_undoped;
    if (manifest.seed_doped) doped.seed = *manifest.seed_doped;

    std::optional<classify::ParallelThresholds> thresholds;
    if (!manifest.thresholds_path.empty()) {
        thresholds = io::load_thresholds(manifest.thresholds_path);
    }

    fs::create_directories(manifest.output_dir);
    const fs::path out_dir(manifest.output_dir);

    PipelineResult result;
    result.output_dir = manifest.output_dir;

    const TimeSeries probe_full = [&] {
        TimeSeries ts = signals::synthesize(manifest.probe, dt, total);
        ts.meta.stimulus = spec_label(manifest.probe);
        return ts;
    }();

    struct Slot {
        SeriesAnalysis out1, out2;
    };
    // outcome index -> substrate -> analyses for both terminals
    std::vector<std::array<Slot, 2>> slots(manifest.second_channel.size());
    const std::array<const reservoir::SubstrateParams*, 2> substrates = {&undoped, &doped};

    for (std::size_t si = 0; si < manifest.second_channel.size(); ++si) {
        const signals::WaveformSpec& second = manifest.second_channel[si];
        StimulusOutcome outcome;
        outcome.shape = signals::waveform_name(second.shape);
        outcome.frequency_hz = second.frequency_hz;

        TimeSeries second_full = signals::synthesize(second, dt, total);
        second_full.meta.stimulus = spec_label(second);
        outcome.stimulus = probe_full.meta.stimulus + "+" + second_full.meta.stimulus;

        for (int sub = 0; sub < 2; ++sub) {
            const reservoir::SubstrateParams& params = *substrates[sub];
            const char* sub_name = reservoir::kind_name(params.kind);
            try {
                const reservoir::TerminalOutputs sim =
                    reservoir::simulate(probe_full, second_full, params);

                const auto window_of = [&](const TimeSeries& full) {
                    TimeSeries w;
                    w.dt = full.dt;
                    w.meta = full.meta;
                    w.samples.assign(full.samples.begin() + settle,
                                     full.samples.begin() + settle + window);
                    return w;
                };
                const TimeSeries w1 = window_of(sim.out1);
                const TimeSeries w2 = window_of(sim.out2);

                const std::string stem = outcome.shape + "_" + freq_tag(second.frequency_hz) +
                                         "_" + sub_name;
                const std::string series_path = (out_dir / (stem + "_out1.csv")).string();
                io::write_series_csv(w1, series_path);
                result.series_files.push_back(series_path);

                const auto analyze = [&](const TimeSeries& w, SeriesAnalysis& sa) {
                    const TimeSeries norm = prep::normalize(w);
                    sa.stationarity = prep::adf_test(norm);
                    sa.fv = metrics::feature_vector(norm, manifest.analysis);
                    sa.ok = true;
                    const std::string fpath =
                        (out_dir / (stem + "_" + w.meta.terminal + "_features.json")).string();
                    io::write_json_file(io::feature_json(sa.fv, w.meta, &sa.stationarity), fpath);
                    result.feature_files.push_back(fpath);
                };
                analyze(w1, slots[si][sub].out1);
                analyze(w2, slots[si][sub].out2);
            } catch (const Error& e) {
                outcome.errors.push_back(std::string(sub_name) + ": " + e.what());
            }
        }

        if (slots[si][0].out1.ok && slots[si][0].out1.fv.dfa_alpha) {
            outcome.alpha_undoped = *slots[si][0].out1.fv.dfa_alpha;
        }
        if (slots[si][1].out1.ok && slots[si][1].out1.fv.dfa_alpha) {
            outcome.alpha_doped = *slots[si][1].out1.fv.dfa_alpha;
        }
        result.outcomes.push_back(std::move(outcome));
    }

    // One trend ledger per waveform shape, across that shape's frequencies.
    std::map<std::string, classify::TrendLedger> ledgers;
    std::map<std::string, std::vector<std::string>> ledger_errors;
    {
        std::map<std::string, std::vector<std::size_t>> by_shape;
        for (std::size_t si = 0; si < result.outcomes.size(); ++si) {
            by_shape[result.outcomes[si].shape].push_back(si);
        }
        for (const auto& [shape, indices] : by_shape) {
            std::map<std::string, std::vector<classify::TrendPoint>> raw;
            const auto add_point = [&](const std::string& key, double freq,
                                       const std::optional<double>& u,
                                       const std::optional<double>& d) {
                if (!u || !d) return;
                raw[key].push_back({freq, *u, *d});
            };
            for (std::size_t si : indices) {
                const Slot& u = slots[si][0];
                const Slot& d = slots[si][1];
                const double freq = result.outcomes[si].frequency_hz;
                if (!u.out1.ok || !d.out1.ok) continue;
                add_point("mle", freq, u.out1.fv.mle, d.out1.fv.mle);
                add_point("dfa_alpha", freq, u.out1.fv.dfa_alpha, d.out1.fv.dfa_alpha);
                add_point("corr_dim", freq, u.out1.fv.corr_dim, d.out1.fv.corr_dim);
                add_point("sampen", freq, u.out1.fv.sampen, d.out1.fv.sampen);
                add_point("apen", freq, u.out1.fv.apen, d.out1.fv.apen);
                add_point("perm_entropy", freq, u.out1.fv.perm_entropy, d.out1.fv.perm_entropy);
                add_point("katz_fd", freq, u.out1.fv.katz_fd, d.out1.fv.katz_fd);
                add_point("petrosian_fd_out1", freq, u.out1.fv.petrosian_fd, d.out1.fv.petrosian_fd);
                if (u.out2.ok && d.out2.ok) {
                    add_point("petrosian_fd_out2", freq, u.out2.fv.petrosian_fd,
                              d.out2.fv.petrosian_fd);
                }
            }
            classify::TrendLedger ledger;
            try {
                ledger = classify::build_ledger(raw);
            } catch (const Error& e) {
                ledger_errors[shape].push_back(e.what());
            }
            const std::string lpath = (out_dir / ("ledger_" + shape + ".json")).string();
            io::write_json_file(io::ledger_json(ledger), lpath);
            result.ledger_files.push_back(lpath);
            ledgers.emplace(shape, std::move(ledger));
        }
    }

    // Reports: one per stimulus pair, carrying its shape-group ledger.
    for (std::size_t si = 0; si < result.outcomes.size(); ++si) {
        StimulusOutcome& outcome = result.outcomes[si];
        const classify::TrendLedger& ledger = ledgers.at(outcome.shape);
        for (const std::string& e : ledger_errors[outcome.shape]) outcome.errors.push_back(e);

        try {
            outcome.tree_a = classify::decision_tree_a(ledger);
        } catch (const Error& e) {
            outcome.errors.push_back(std::string("tree_a: ") + e.what());
        }
        try {
            outcome.tree_b = classify::decision_tree_b(ledger);
        } catch (const Error& e) {
            outcome.errors.push_back(std::string("tree_b: ") + e.what());
        }

        io::json report;
        report["version"] = 1;
        report["stimulus"] = outcome.stimulus;
        report["frequency_hz"] = io::round_sig(outcome.frequency_hz);
        report["tree_a"] = classify::label_name(outcome.tree_a);
        report["tree_b"] = classify::label_name(outcome.tree_b);

        io::json parallel = io::json::object();
        io::json doping = io::json::object();
        for (int sub = 0; sub < 2; ++sub) {
            const char* sub_name = reservoir::kind_name(substrates[sub]->kind);
            const SeriesAnalysis& sa = slots[si][sub].out1;
            if (!sa.ok) continue;
            if (thresholds) {
                try {
                    const classify::ParallelResult pr =
                        classify::classify_parallel(sa.fv, *thresholds);
                    io::json pj;
                    pj["label"] = classify::label_name(pr.label);
                    pj["confidence"] = io::round_sig(pr.confidence);
                    parallel[sub_name] = pj;
                } catch (const Error& e) {
                    outcome.errors.push_back(std::string("parallel/") + sub_name + ": " + e.what());
                }
            }
            if (sa.fv.dfa_alpha) {
                io::json dj;
                dj["dfa_alpha"] = io::round_sig(*sa.fv.dfa_alpha);
                dj["call"] = classify::doping_name(classify::classify_doping(*sa.fv.dfa_alpha));
                doping[sub_name] = dj;
            }
        }
        report["parallel"] = parallel;
        report["doping"] = doping;
        report["ledger"] = io::ledger_json(ledger);
        report["errors"] = outcome.errors;

        const std::string rpath =
            (out_dir / ("report_" + outcome.shape + "_" + freq_tag(outcome.frequency_hz) + ".json"))
                .string();
        io::write_json_file(report, rpath);
        outcome.report_path = rpath;
    }

    // Run summary: manifest echo plus the emitted file set.
    {
        io::json j;
        j["version"] = 1;
        io::json probe;
        probe["shape"] = signals::waveform_name(manifest.probe.shape);
        probe["frequency_hz"] = io::round_sig(manifest.probe.frequency_hz);
        probe["amplitude_pp"] = io::round_sig(manifest.probe.amplitude_pp);
        j["probe"] = probe;
        io::json seconds = io::json::array();
        for (const auto& s : manifest.second_channel) {
            io::json e;
            e["shape"] = signals::waveform_name(s.shape);
            e["frequency_hz"] = io::round_sig(s.frequency_hz);
            e["amplitude_pp"] = io::round_sig(s.amplitude_pp);
            seconds.push_back(e);
        }
        j["second_channel"] = seconds;
        j["sample_rate_hz"] = io::round_sig(manifest.sample_rate_hz);
        j["duration_s"] = io::round_sig(manifest.duration_s);
        j["settle_periods"] = manifest.settle_periods;
        j["window_samples"] = manifest.window_samples;
        j["seed_undoped"] = undoped.seed;
        j["seed_doped"] = doped.seed;
        io::json labels = io::json::array();
        for (const auto& o : result.outcomes) {
            io::json e;
            e["stimulus"] = o.stimulus;
            e["tree_a"] = classify::label_name(o.tree_a);
            e["tree_b"] = classify::label_name(o.tree_b);
            e["errors"] = o.errors;
            labels.push_back(e);
        }
        j["labels"] = labels;
        const auto names_only = [](const std::vector<std::string>& paths) {
            io::json arr = io::json::array();
            for (const auto& p : paths) arr.push_back(fs::path(p).filename().string());
            return arr;
        };
        j["series_files"] = names_only(result.series_files);
        j["feature_files"] = names_only(result.feature_files);
        j["ledger_files"] = names_only(result.ledger_files);
        io::write_json_file(j, (out_dir / "run_summary.json").string());
    }

    return result;
}

}  // namespace resmix::pipeline
