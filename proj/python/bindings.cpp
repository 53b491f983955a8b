// Python bindings for the core operations: waveform synthesis, substrate
// simulation, preprocessing, feature extraction and the batch pipeline.
// Vector arguments are plain sequences of floats; composite results come
// back as dicts mirroring the emitted JSON files.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "resmix/classify.hpp"
#include "resmix/embedding.hpp"
#include "resmix/errors.hpp"
#include "resmix/io.hpp"
#include "resmix/metrics.hpp"
#include "resmix/pipeline.hpp"
#include "resmix/prep.hpp"
#include "resmix/reservoir.hpp"
#include "resmix/signals.hpp"
#include "resmix/types.hpp"

namespace py = pybind11;
using namespace resmix;

namespace {

TimeSeries make_series(std::vector<double> samples, double dt) {
    TimeSeries ts;
    ts.samples = std::move(samples);
    ts.dt = dt;
    return ts;
}

/// Route emitted JSON through the interpreter's own parser so callers get
/// plain dicts/lists identical to what they would json.load from disk.
py::object json_to_py(const io::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

const char* tau_source_name(embedding::TauSource s) {
    switch (s) {
        case embedding::TauSource::DmiMinimum: return "dmi_minimum";
        case embedding::TauSource::AutocorrZero: return "autocorr_zero";
        case embedding::TauSource::Floor: return "floor";
    }
    return "?";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dual-drive substrate simulation and nonlinear time-series readout";
    m.attr("__version__") = "1.0.0";

    // Exception hierarchy; later registrations are matched first, so the
    // most-derived types go last.
    static py::exception<Error> exc_base(m, "Error");
    static py::exception<ArgumentError> exc_arg(m, "ArgumentError", exc_base.ptr());
    static py::exception<DataError> exc_data(m, "DataError", exc_base.ptr());
    static py::exception<NumericalError> exc_num(m, "NumericalError", exc_base.ptr());
    static py::exception<ConfigError> exc_cfg(m, "ConfigError", exc_arg.ptr());
    static py::exception<DegenerateInputError> exc_degen(m, "DegenerateInputError", exc_data.ptr());
    static py::exception<IncompleteInputError> exc_incomplete(m, "IncompleteInputError",
                                                              exc_arg.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IncompleteInputError& e) {
            py::set_error(exc_incomplete, e.what());
        } catch (const ConfigError& e) {
            py::set_error(exc_cfg, e.what());
        } catch (const DegenerateInputError& e) {
            py::set_error(exc_degen, e.what());
        } catch (const ArgumentError& e) {
            py::set_error(exc_arg, e.what());
        } catch (const DataError& e) {
            py::set_error(exc_data, e.what());
        } catch (const NumericalError& e) {
            py::set_error(exc_num, e.what());
        } catch (const Error& e) {
            py::set_error(exc_base, e.what());
        }
    });

    py::class_<reservoir::SubstrateParams>(m, "SubstrateParams")
        .def(py::init<>())
        .def_property(
            "kind",
            [](const reservoir::SubstrateParams& p) {
                return std::string(reservoir::kind_name(p.kind));
            },
            [](reservoir::SubstrateParams& p, const std::string& name) {
                p.kind = reservoir::kind_from_name(name);
            })
        .def_readwrite("in1_node", &reservoir::SubstrateParams::in1_node)
        .def_readwrite("in2_node", &reservoir::SubstrateParams::in2_node)
        .def_readwrite("out1_node", &reservoir::SubstrateParams::out1_node)
        .def_readwrite("out2_node", &reservoir::SubstrateParams::out2_node)
        .def_readwrite("gnd_node", &reservoir::SubstrateParams::gnd_node)
        .def_readwrite("branch_resistance", &reservoir::SubstrateParams::branch_resistance)
        .def_readwrite("branch_capacitance", &reservoir::SubstrateParams::branch_capacitance)
        .def_readwrite("source_resistance", &reservoir::SubstrateParams::source_resistance)
        .def_readwrite("out1_load", &reservoir::SubstrateParams::out1_load)
        .def_readwrite("out2_load", &reservoir::SubstrateParams::out2_load)
        .def_readwrite("mem_g_min", &reservoir::SubstrateParams::mem_g_min)
        .def_readwrite("mem_g_max", &reservoir::SubstrateParams::mem_g_max)
        .def_readwrite("mem_mobility", &reservoir::SubstrateParams::mem_mobility)
        .def_readwrite("mem_w_init", &reservoir::SubstrateParams::mem_w_init)
        .def_readwrite("lowpass_cutoff_hz", &reservoir::SubstrateParams::lowpass_cutoff_hz)
        .def_readwrite("noise_sigma", &reservoir::SubstrateParams::noise_sigma)
        .def_readwrite("noise_ar", &reservoir::SubstrateParams::noise_ar)
        .def_readwrite("quantize_step", &reservoir::SubstrateParams::quantize_step)
        .def_readwrite("seed", &reservoir::SubstrateParams::seed)
        .def_readwrite("has_seed", &reservoir::SubstrateParams::has_seed)
        .def("__repr__", [](const reservoir::SubstrateParams& p) {
            return std::string("SubstrateParams(kind='") + reservoir::kind_name(p.kind) +
                   "', seed=" + std::to_string(p.seed) + ")";
        });

    m.def(
        "default_params",
        [](const std::string& kind) {
            return reservoir::default_params(reservoir::kind_from_name(kind));
        },
        py::arg("kind"), "Calibrated defaults for 'undoped' or 'doped'.");
    m.def("load_params", &reservoir::load_params, py::arg("path"));
    m.def("save_params", &reservoir::save_params, py::arg("params"), py::arg("path"));

    m.def(
        "synthesize",
        [](const std::string& shape, double frequency_hz, double amplitude_pp, double dt,
           std::size_t count, double phase_rad, double dc_offset) {
            signals::WaveformSpec spec;
            spec.shape = signals::waveform_from_name(shape);
            spec.frequency_hz = frequency_hz;
            spec.amplitude_pp = amplitude_pp;
            spec.phase_rad = phase_rad;
            spec.dc_offset = dc_offset;
            return signals::synthesize(spec, dt, count).samples;
        },
        py::arg("shape"), py::arg("frequency_hz"), py::arg("amplitude_pp"), py::arg("dt"),
        py::arg("count"), py::arg("phase_rad") = 0.0, py::arg("dc_offset") = 0.0,
        "Samples of a sine/triangle/square tone; amplitude is peak-to-peak.");

    m.def(
        "mix",
        [](std::vector<double> a, std::vector<double> b) {
            return signals::mix_reference(make_series(std::move(a), 1.0),
                                          make_series(std::move(b), 1.0))
                .samples;
        },
        py::arg("a"), py::arg("b"), "Pointwise sum, the linear reference a substrate is not.");

    m.def("repetend_length", &signals::ratio_repetend_length, py::arg("f1_hz"), py::arg("f2_hz"),
          "Decimal repetend length of the reduced frequency ratio.");

    m.def(
        "simulate",
        [](std::vector<double> in1, std::vector<double> in2, double dt,
           const reservoir::SubstrateParams& params) {
            const auto out = reservoir::simulate(make_series(std::move(in1), dt),
                                                 make_series(std::move(in2), dt), params);
            py::dict d;
            d["out1"] = out.out1.samples;
            d["out2"] = out.out2.samples;
            d["dt"] = out.out1.dt;
            d["w_min"] = out.w_min;
            d["w_max"] = out.w_max;
            return d;
        },
        py::arg("in1"), py::arg("in2"), py::arg("dt"), py::arg("params"),
        "Runs the lumped-element substrate on two drive series.");

    m.def(
        "normalize",
        [](std::vector<double> x) {
            return prep::normalize(make_series(std::move(x), 1.0)).samples;
        },
        py::arg("x"), "Zero mean, unit sample standard deviation.");

    m.def(
        "adf_test",
        [](std::vector<double> x, int max_lag) {
            const auto r = prep::adf_test(make_series(std::move(x), 1.0), max_lag);
            py::dict d;
            d["adf_statistic"] = r.adf_statistic;
            d["p_value"] = r.p_value;
            d["lags_used"] = r.lags_used;
            d["reject_unit_root"] = r.reject_unit_root;
            return d;
        },
        py::arg("x"), py::arg("max_lag") = -1,
        "Augmented Dickey-Fuller test (constant, no trend), AIC lag choice.");

    m.def(
        "sample_entropy",
        [](std::vector<double> x, int entropy_m, double r_frac) {
            return metrics::sample_entropy(make_series(std::move(x), 1.0), entropy_m, r_frac);
        },
        py::arg("x"), py::arg("m") = 2, py::arg("r_frac") = 0.2);
    m.def(
        "approximate_entropy",
        [](std::vector<double> x, int entropy_m, double r_frac) {
            return metrics::approximate_entropy(make_series(std::move(x), 1.0), entropy_m, r_frac);
        },
        py::arg("x"), py::arg("m") = 2, py::arg("r_frac") = 0.2);
    m.def(
        "permutation_entropy",
        [](std::vector<double> x, int order, int tau) {
            return metrics::permutation_entropy(make_series(std::move(x), 1.0), order, tau);
        },
        py::arg("x"), py::arg("m") = 3, py::arg("tau") = 1);
    m.def(
        "katz_fd",
        [](std::vector<double> x) { return metrics::katz_fd(make_series(std::move(x), 1.0)); },
        py::arg("x"));
    m.def(
        "petrosian_fd",
        [](std::vector<double> x) { return metrics::petrosian_fd(make_series(std::move(x), 1.0)); },
        py::arg("x"));
    m.def(
        "dfa_alpha",
        [](std::vector<double> x, int min_window, int max_window, int n_windows) {
            return metrics::dfa(make_series(std::move(x), 1.0), min_window, max_window, n_windows)
                .alpha;
        },
        py::arg("x"), py::arg("min_window") = 4, py::arg("max_window") = 0,
        py::arg("n_windows") = 16, "Detrended-fluctuation scaling exponent.");

    m.def(
        "select_embedding",
        [](std::vector<double> x, int max_tau, int bins, std::size_t max_dim) {
            embedding::SelectConfig cfg;
            cfg.max_tau = max_tau;
            cfg.bins = bins;
            cfg.max_dim = max_dim;
            const auto c = embedding::select_embedding(make_series(std::move(x), 1.0), cfg);
            py::dict d;
            d["tau"] = c.tau;
            d["dim"] = c.dim;
            d["tau_source"] = tau_source_name(c.tau_source);
            d["dim_converged"] = c.dim_converged;
            d["dim_saturated"] = c.dim_saturated;
            return d;
        },
        py::arg("x"), py::arg("max_tau") = 40, py::arg("bins") = 64, py::arg("max_dim") = 8,
        "Delay from the information minimum, dimension from the combined "
        "false-neighbour and saturation criteria.");

    m.def(
        "analyze",
        [](std::vector<double> x, double dt, const std::string& terminal,
           const std::string& stimulus, const std::string& substrate) {
            const TimeSeries norm = prep::normalize(make_series(std::move(x), dt));
            const auto st = prep::adf_test(norm);
            const auto fv = metrics::feature_vector(norm);
            SeriesMeta meta;
            meta.terminal = terminal;
            meta.stimulus = stimulus;
            meta.substrate = substrate;
            return json_to_py(io::feature_json(fv, meta, &st));
        },
        py::arg("x"), py::arg("dt") = 1.0, py::arg("terminal") = "out1", py::arg("stimulus") = "",
        py::arg("substrate") = "",
        "Normalizes a window and extracts the full feature dict (same layout "
        "as the emitted feature files).");

    m.def(
        "run_pipeline",
        [](const std::string& manifest_path, const std::string& output_dir) {
            auto manifest = pipeline::load_manifest(manifest_path);
            if (!output_dir.empty()) manifest.output_dir = output_dir;
            const auto result = pipeline::run_pipeline(manifest);
            io::json j;
            j["output_dir"] = result.output_dir;
            io::json outcomes = io::json::array();
            for (const auto& oc : result.outcomes) {
                io::json e;
                e["shape"] = oc.shape;
                e["frequency_hz"] = oc.frequency_hz;
                e["stimulus"] = oc.stimulus;
                e["tree_a"] = classify::label_name(oc.tree_a);
                e["tree_b"] = classify::label_name(oc.tree_b);
                if (oc.alpha_undoped) e["alpha_undoped"] = *oc.alpha_undoped;
                if (oc.alpha_doped) e["alpha_doped"] = *oc.alpha_doped;
                e["report_path"] = oc.report_path;
                e["errors"] = oc.errors;
                outcomes.push_back(e);
            }
            j["outcomes"] = outcomes;
            j["series_files"] = result.series_files;
            j["feature_files"] = result.feature_files;
            j["ledger_files"] = result.ledger_files;
            return json_to_py(j);
        },
        py::arg("manifest_path"), py::arg("output_dir") = std::string(),
        "Executes a manifest end to end; a non-empty output_dir overrides the "
        "manifest's destination.");
}
