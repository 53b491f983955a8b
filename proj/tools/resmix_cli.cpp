#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resmix/embedding.hpp"
#include "resmix/errors.hpp"
#include "resmix/io.hpp"
#include "resmix/metrics.hpp"
#include "resmix/pipeline.hpp"
#include "resmix/prep.hpp"
#include "resmix/reservoir.hpp"
#include "resmix/signals.hpp"

namespace fs = std::filesystem;
using namespace resmix;

namespace {

struct SynthArgs {
    std::string shape = "sine";
    double freq = 300.0;
    double amp = 10.0;
    double phase = 0.0;
    double offset = 0.0;
    double rate = 50000.0;
    double duration = 0.05;
    std::string out;
};

struct SimArgs {
    std::string in1, in2, params;
    std::optional<std::uint64_t> seed;
    std::string out1, out2;
};

struct AnalyzeArgs {
    std::string in;
    std::size_t skip = 0;
    std::size_t window = 0;  // 0 = rest of the series
    int tau = 0;
    std::size_t dim = 0;
    int entropy_m = 2;
    double entropy_r = 0.2;
    int perm_m = 3;
    int perm_tau = 1;
    int dfa_min = 4, dfa_max = 0, dfa_n = 16;
    std::string terminal, stimulus, substrate;
    std::string out;
};

struct ClassifyArgs {
    std::string features, thresholds, ledger;
    std::string out;
};

struct PipelineArgs {
    std::string manifest;
    std::string out_dir;
    std::optional<double> duration, rate;
    std::optional<int> settle, window;
    std::optional<std::uint64_t> seed_undoped, seed_doped;
};

struct PlotArgs {
    std::string kind;
    std::string in;       // series csv for most kinds
    std::string run_dir;  // pipeline output dir for parallel coordinates
    int tau = 1;
    std::size_t dim = 3;
    int max_tau = 40;
    std::size_t max_dim = 8;
    std::string out;
};

void emit_json(const io::json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        io::write_json_file(j, out);
    }
}

std::string sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void run_synth(const SynthArgs& a) {
    signals::WaveformSpec spec;
    spec.shape = signals::waveform_from_name(a.shape);
    spec.frequency_hz = a.freq;
    spec.amplitude_pp = a.amp;
    spec.phase_rad = a.phase;
    spec.dc_offset = a.offset;
    if (!(a.rate > 0.0)) throw ArgumentError("synth: sample rate must be positive");
    if (!(a.duration > 0.0)) throw ArgumentError("synth: duration must be positive");
    const auto count = static_cast<std::size_t>(std::llround(a.rate * a.duration));
    if (count < 2) throw ArgumentError("synth: duration too short for two samples");
    const TimeSeries ts = signals::synthesize(spec, 1.0 / a.rate, count);
    io::write_series_csv(ts, a.out);
}

void run_simulate(const SimArgs& a) {
    TimeSeries in1 = io::read_series_csv(a.in1);
    TimeSeries in2 = io::read_series_csv(a.in2);
    in1.meta.stimulus = fs::path(a.in1).stem().string();
    in2.meta.stimulus = fs::path(a.in2).stem().string();
    reservoir::SubstrateParams params = reservoir::load_params(a.params);
    if (a.seed) params.seed = *a.seed;
    const reservoir::TerminalOutputs out = reservoir::simulate(in1, in2, params);
    io::write_series_csv(out.out1, a.out1);
    io::write_series_csv(out.out2, a.out2);
}

void run_analyze(const AnalyzeArgs& a) {
    TimeSeries ts = io::read_series_csv(a.in);
    if (a.skip >= ts.samples.size()) throw ArgumentError("analyze: skip exceeds the series");
    const std::size_t avail = ts.samples.size() - a.skip;
    const std::size_t take = a.window == 0 ? avail : std::min(a.window, avail);
    TimeSeries w;
    w.dt = ts.dt;
    w.samples.assign(ts.samples.begin() + a.skip, ts.samples.begin() + a.skip + take);
    w.meta = {a.terminal, a.stimulus, a.substrate};

    const TimeSeries norm = prep::normalize(w);
    const prep::StationarityReport st = prep::adf_test(norm);
    metrics::FeatureConfig cfg;
    cfg.tau_override = a.tau;
    cfg.dim_override = a.dim;
    cfg.entropy_m = a.entropy_m;
    cfg.entropy_r = a.entropy_r;
    cfg.perm_m = a.perm_m;
    cfg.perm_tau = a.perm_tau;
    cfg.dfa_min_window = a.dfa_min;
    cfg.dfa_max_window = a.dfa_max;
    cfg.dfa_n_windows = a.dfa_n;
    const metrics::FeatureVector fv = metrics::feature_vector(norm, cfg);
    emit_json(io::feature_json(fv, w.meta, &st), a.out);
}

void run_classify(const ClassifyArgs& a) {
    if (a.features.empty() && a.ledger.empty()) {
        throw ArgumentError("classify: need --features and/or --ledger");
    }
    io::json out;
    if (!a.ledger.empty()) {
        const classify::TrendLedger ledger = io::ledger_from_json(io::read_json_file(a.ledger));
        out["tree_a"] = classify::label_name(classify::decision_tree_a(ledger));
        out["tree_b"] = classify::label_name(classify::decision_tree_b(ledger));
    }
    if (!a.features.empty()) {
        if (a.thresholds.empty()) {
            throw ArgumentError("classify: --features requires --thresholds");
        }
        const io::json fj = io::read_json_file(a.features);
        metrics::FeatureVector fv;
        if (fj.contains("perm_entropy")) fv.perm_entropy = fj.at("perm_entropy").get<double>();
        if (fj.contains("petrosian_fd")) fv.petrosian_fd = fj.at("petrosian_fd").get<double>();
        if (fj.contains("dfa_alpha")) fv.dfa_alpha = fj.at("dfa_alpha").get<double>();
        const classify::ParallelThresholds th = io::load_thresholds(a.thresholds);
        const classify::ParallelResult pr = classify::classify_parallel(fv, th);
        io::json pj;
        pj["label"] = classify::label_name(pr.label);
        pj["confidence"] = io::round_sig(pr.confidence);
        out["parallel"] = pj;
        if (fv.dfa_alpha) {
            io::json dj;
            dj["dfa_alpha"] = io::round_sig(*fv.dfa_alpha);
            dj["call"] = classify::doping_name(classify::classify_doping(*fv.dfa_alpha));
            out["doping"] = dj;
        }
    }
    emit_json(out, a.out);
}

void run_pipeline_cmd(const PipelineArgs& a, const io::json& raw_manifest) {
    pipeline::RunManifest m = pipeline::load_manifest(a.manifest);

    // Flags fill manifest gaps; on conflict the manifest value stands.
    const auto apply = [&](const char* key, auto& field, const auto& flag) {
        if (!flag) return;
        using T = std::decay_t<decltype(field)>;
        if (raw_manifest.contains(key)) {
            if (static_cast<T>(*flag) != field) {
                std::cerr << "warning: manifest " << key << " overrides the command-line value\n";
            }
        } else {
            field = static_cast<T>(*flag);
        }
    };
    apply("duration_s", m.duration_s, a.duration);
    apply("sample_rate_hz", m.sample_rate_hz, a.rate);
    apply("settle_periods", m.settle_periods, a.settle);
    apply("window_samples", m.window_samples, a.window);
    apply("seed_undoped", m.seed_undoped, a.seed_undoped);
    apply("seed_doped", m.seed_doped, a.seed_doped);

    if (const char* env = std::getenv("RESMIX_OUT_DIR"); env != nullptr && *env != '\0') {
        m.output_dir = env;
    } else if (!a.out_dir.empty()) {
        m.output_dir = a.out_dir;
    }

    const pipeline::PipelineResult result = pipeline::run_pipeline(m);
    for (const auto& o : result.outcomes) {
        std::cout << o.stimulus << ": tree_a=" << classify::label_name(o.tree_a)
                  << " tree_b=" << classify::label_name(o.tree_b);
        if (o.alpha_undoped) std::cout << " alpha_undoped=" << sig12(*o.alpha_undoped);
        if (o.alpha_doped) std::cout << " alpha_doped=" << sig12(*o.alpha_doped);
        if (!o.errors.empty()) std::cout << " errors=" << o.errors.size();
        std::cout << "\n";
    }
    std::cout << "wrote " << result.series_files.size() << " series, "
              << result.feature_files.size() << " feature files, "
              << result.outcomes.size() << " reports under " << result.output_dir << "\n";
}

void run_plotdata(const PlotArgs& a) {
    std::ofstream out(a.out);
    if (!out) throw DataError("cannot open '" + a.out + "' for writing");

    const auto load_series = [&] {
        if (a.in.empty()) throw ArgumentError("plotdata: this kind requires --in");
        return io::read_series_csv(a.in);
    };

    if (a.kind == "trajectory3d") {
        const TimeSeries ts = load_series();
        const embedding::EmbeddedTrajectory traj = embedding::embed(ts, a.dim, a.tau);
        const std::size_t cols = std::min<std::size_t>(traj.dim, 3);
        for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << "x" << c;
        out << "\n";
        for (std::size_t i = 0; i < traj.count(); ++i) {
            const double* p = traj.point(i);
            for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << sig12(p[c]);
            out << "\n";
        }
    } else if (a.kind == "returnplot") {
        const TimeSeries ts = load_series();
        if (a.tau < 1 || static_cast<std::size_t>(a.tau) >= ts.samples.size()) {
            throw ArgumentError("plotdata: delay out of range for the series");
        }
        out << "x_t,x_t_minus_tau\n";
        for (std::size_t i = static_cast<std::size_t>(a.tau); i < ts.samples.size(); ++i) {
            out << sig12(ts.samples[i]) << "," << sig12(ts.samples[i - a.tau]) << "\n";
        }
    } else if (a.kind == "dmi") {
        const TimeSeries ts = load_series();
        const auto curve = embedding::delayed_mutual_information(ts, a.max_tau);
        out << "tau,mi_nats\n";
        for (const auto& p : curve) out << p.tau << "," << sig12(p.mi_nats) << "\n";
    } else if (a.kind == "fnn") {
        const TimeSeries ts = load_series();
        out << "dim,ratio,size,joint\n";
        for (std::size_t d = 1; d <= a.max_dim; ++d) {
            const embedding::FnnResult r = embedding::false_nearest_neighbors(ts, d, a.tau);
            out << d << "," << sig12(r.ratio) << "," << sig12(r.size) << "," << sig12(r.joint)
                << "\n";
        }
    } else if (a.kind == "parallel") {
        if (a.run_dir.empty()) throw ArgumentError("plotdata: parallel requires --run-dir");
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(a.run_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.size() > 19 && name.substr(name.size() - 19) == "_out1_features.json") {
                files.push_back(entry.path());
            }
        }
        if (files.empty()) throw DataError("plotdata: no out1 feature files under --run-dir");
        std::sort(files.begin(), files.end());
        out << "dfa_alpha,sampen,petrosian_fd,perm_entropy,label\n";
        for (const auto& f : files) {
            const io::json j = io::read_json_file(f.string());
            const auto field = [&](const char* key) {
                if (!j.contains(key)) {
                    throw DataError("plotdata: '" + f.filename().string() + "' lacks " + key);
                }
                return j.at(key).get<double>();
            };
            const std::string label = f.filename().string().substr(
                0, f.filename().string().find('_'));
            out << sig12(field("dfa_alpha")) << "," << sig12(field("sampen")) << ","
                << sig12(field("petrosian_fd")) << "," << sig12(field("perm_entropy")) << ","
                << label << "\n";
        }
    } else {
        throw ArgumentError("plotdata: unknown kind '" + a.kind + "'");
    }
    if (!out) throw DataError("failed writing '" + a.out + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-drive substrate simulation and nonlinear time-series readout"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "sample one waveform to CSV");
    synth->add_option("--shape", synth_args.shape, "sine | triangle | square");
    synth->add_option("--freq", synth_args.freq, "frequency in Hz");
    synth->add_option("--amp", synth_args.amp, "peak-to-peak volts");
    synth->add_option("--phase", synth_args.phase, "phase in radians");
    synth->add_option("--offset", synth_args.offset, "DC offset in volts");
    synth->add_option("--rate", synth_args.rate, "sample rate in Hz");
    synth->add_option("--duration", synth_args.duration, "seconds");
    synth->add_option("--out", synth_args.out, "output CSV")->required();

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run two drive series through a substrate");
    sim->add_option("--in1", sim_args.in1, "first drive CSV")->required();
    sim->add_option("--in2", sim_args.in2, "second drive CSV")->required();
    sim->add_option("--params", sim_args.params, "substrate parameter file")->required();
    sim->add_option("--seed", sim_args.seed, "recording-noise seed override");
    sim->add_option("--out1", sim_args.out1, "first read-out CSV")->required();
    sim->add_option("--out2", sim_args.out2, "second read-out CSV")->required();

    AnalyzeArgs an_args;
    auto* an = app.add_subcommand("analyze", "extract the feature vector from a series");
    an->add_option("--in", an_args.in, "input CSV")->required();
    an->add_option("--skip", an_args.skip, "samples to discard first");
    an->add_option("--window", an_args.window, "window length (0 = rest)");
    an->add_option("--tau", an_args.tau, "delay override (0 = auto)");
    an->add_option("--dim", an_args.dim, "dimension override (0 = auto)");
    an->add_option("--entropy-m", an_args.entropy_m, "template length");
    an->add_option("--entropy-r", an_args.entropy_r, "tolerance as a fraction of the std");
    an->add_option("--perm-m", an_args.perm_m, "ordinal pattern order");
    an->add_option("--perm-tau", an_args.perm_tau, "ordinal pattern delay");
    an->add_option("--dfa-min-window", an_args.dfa_min, "smallest detrending window");
    an->add_option("--dfa-max-window", an_args.dfa_max, "largest detrending window (0 = N/4)");
    an->add_option("--dfa-windows", an_args.dfa_n, "number of window sizes");
    an->add_option("--terminal", an_args.terminal, "terminal tag for the output");
    an->add_option("--stimulus", an_args.stimulus, "stimulus tag for the output");
    an->add_option("--substrate", an_args.substrate, "substrate tag for the output");
    an->add_option("--out", an_args.out, "output JSON (default stdout)");

    ClassifyArgs cl_args;
    auto* cl = app.add_subcommand("classify", "label a feature vector and/or a trend ledger");
    cl->add_option("--features", cl_args.features, "feature JSON for the single-series bands");
    cl->add_option("--thresholds", cl_args.thresholds, "band thresholds JSON");
    cl->add_option("--ledger", cl_args.ledger, "trend ledger JSON for the decision trees");
    cl->add_option("--out", cl_args.out, "output JSON (default stdout)");

    PipelineArgs pl_args;
    auto* pl = app.add_subcommand("pipeline", "run the full batch described by a manifest");
    pl->add_option("--manifest", pl_args.manifest, "manifest JSON")->required();
    pl->add_option("--out-dir", pl_args.out_dir, "output directory (RESMIX_OUT_DIR wins)");
    pl->add_option("--duration", pl_args.duration, "seconds per simulation");
    pl->add_option("--rate", pl_args.rate, "sample rate in Hz");
    pl->add_option("--settle", pl_args.settle, "probe periods to discard");
    pl->add_option("--window", pl_args.window, "analysis window length");
    pl->add_option("--seed-undoped", pl_args.seed_undoped, "undoped recording seed");
    pl->add_option("--seed-doped", pl_args.seed_doped, "doped recording seed");

    PlotArgs plot_args;
    auto* plot = app.add_subcommand("plotdata", "emit plot-ready CSV matrices");
    plot->add_option("--kind", plot_args.kind,
                     "trajectory3d | returnplot | dmi | fnn | parallel")
        ->required();
    plot->add_option("--in", plot_args.in, "input series CSV");
    plot->add_option("--run-dir", plot_args.run_dir, "pipeline output dir (parallel)");
    plot->add_option("--tau", plot_args.tau, "delay in samples");
    plot->add_option("--dim", plot_args.dim, "embedding dimension");
    plot->add_option("--max-tau", plot_args.max_tau, "largest delay (dmi)");
    plot->add_option("--max-dim", plot_args.max_dim, "largest dimension (fnn)");
    plot->add_option("--out", plot_args.out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) run_synth(synth_args);
        else if (sim->parsed()) run_simulate(sim_args);
        else if (an->parsed()) run_analyze(an_args);
        else if (cl->parsed()) run_classify(cl_args);
        else if (pl->parsed()) {
            const io::json raw = io::read_json_file(pl_args.manifest);
            run_pipeline_cmd(pl_args, raw);
        } else if (plot->parsed()) {
            run_plotdata(plot_args);
        }
    } catch (const ArgumentError& e) {  // includes ConfigError
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
