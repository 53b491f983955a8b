#include "resmix/reservoir.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "resmix/errors.hpp"
#include "resmix/rng.hpp"

namespace resmix::reservoir {

namespace {

constexpr int kNodes = 9;
constexpr int kEdges = 12;

/// Grid edges (low node, high node), row-major 3x3.
std::array<std::pair<int, int>, kEdges> grid_edges() {
    std::array<std::pair<int, int>, kEdges> edges{};
    int k = 0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const int node = 3 * r + c;
            if (c < 2) edges[k++] = {node, node + 1};
            if (r < 2) edges[k++] = {node, node + 3};
        }
    }
    return edges;
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string join_stimulus(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "+" + b;
}

}  // namespace

const char* kind_name(SubstrateKind k) {
    return k == SubstrateKind::Doped ? "doped" : "undoped";
}

SubstrateKind kind_from_name(const std::string& name) {
    if (name == "doped") return SubstrateKind::Doped;
    if (name == "undoped") return SubstrateKind::Undoped;
    throw ArgumentError("unknown substrate kind '" + name + "'");
}

void validate_params(const SubstrateParams& p) {
    const std::array<int, 5> roles = {p.in1_node, p.in2_node, p.out1_node, p.out2_node, p.gnd_node};
    for (int node : roles) {
        if (node < 0 || node >= kNodes) throw ConfigError("terminal role outside the 3x3 grid");
    }
    for (std::size_t i = 0; i < roles.size(); ++i) {
        for (std::size_t j = i + 1; j < roles.size(); ++j) {
            if (roles[i] == roles[j]) throw ConfigError("terminal roles must be distinct nodes");
        }
    }
    if (!(p.branch_resistance > 0.0) || !std::isfinite(p.branch_resistance)) {
        throw ConfigError("branch_resistance must be positive");
    }
    if (!(p.branch_capacitance > 0.0) || !std::isfinite(p.branch_capacitance)) {
        throw ConfigError("branch_capacitance must be positive");
    }
    if (!(p.source_resistance > 0.0) || !std::isfinite(p.source_resistance)) {
        throw ConfigError("source_resistance must be positive");
    }
    if (p.out1_load < 0.0 || p.out2_load < 0.0 || !std::isfinite(p.out1_load) ||
        !std::isfinite(p.out2_load)) {
        throw ConfigError("output loads must be zero (open) or positive ohms");
    }
    if (p.kind == SubstrateKind::Doped) {
        if (p.mem_g_min < 0.0 || !(p.mem_g_max > 0.0) || p.mem_g_max < p.mem_g_min) {
            throw ConfigError("memristive conductance range must satisfy 0 <= g_min <= g_max, g_max > 0");
        }
        if (!std::isfinite(p.mem_mobility)) throw ConfigError("mem_mobility must be finite");
        if (!(p.mem_w_init >= 0.0 && p.mem_w_init <= 1.0)) {
            throw ConfigError("mem_w_init must lie in [0, 1]");
        }
    }
    if (p.lowpass_cutoff_hz < 0.0 || !std::isfinite(p.lowpass_cutoff_hz)) {
        throw ConfigError("lowpass_cutoff_hz must be zero (off) or positive");
    }
    if (p.noise_sigma < 0.0 || !std::isfinite(p.noise_sigma)) {
        throw ConfigError("noise_sigma must be non-negative");
    }
    if (!(p.noise_ar > -1.0 && p.noise_ar < 1.0)) {
        throw ConfigError("noise_ar must lie strictly inside (-1, 1)");
    }
    if (p.quantize_step < 0.0 || !std::isfinite(p.quantize_step)) {
        throw ConfigError("quantize_step must be zero (off) or positive");
    }
}

TerminalOutputs simulate(const TimeSeries& in1, const TimeSeries& in2,
                         const SubstrateParams& params) {
    validate(in1, "simulate(in1)");
    validate(in2, "simulate(in2)");
    if (in1.samples.size() != in2.samples.size()) {
        throw ArgumentError("simulate: drive series must have equal length");
    }
    if (std::abs(in1.dt - in2.dt) > 1e-9 * in1.dt) {
        throw ArgumentError("simulate: drive series must share one sample spacing");
    }
    validate_params(params);

    const double dt = in1.dt;
    const std::size_t n = in1.samples.size();
    const bool doped = params.kind == SubstrateKind::Doped;

    // Free-node indexing: grid nodes minus the grounded one.
    std::array<int, kNodes> free_index{};
    free_index.fill(-1);
    int nf = 0;
    for (int node = 0; node < kNodes; ++node) {
        if (node != params.gnd_node) free_index[node] = nf++;
    }
    const auto edges = grid_edges();

    const double g_branch = 1.0 / params.branch_resistance;
    const double g_source = 1.0 / params.source_resistance;
    const double g_load1 = params.out1_load > 0.0 ? 1.0 / params.out1_load : 0.0;
    const double g_load2 = params.out2_load > 0.0 ? 1.0 / params.out2_load : 0.0;
    const double g_span = doped ? params.mem_g_max - params.mem_g_min : 0.0;

    // Capacitance Laplacian over the free nodes, factored once.
    Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(nf, nf);
    for (const auto& [a, b] : edges) {
        const int ia = free_index[a];
        const int ib = free_index[b];
        if (ia >= 0) cmat(ia, ia) += params.branch_capacitance;
        if (ib >= 0) cmat(ib, ib) += params.branch_capacitance;
        if (ia >= 0 && ib >= 0) {
            cmat(ia, ib) -= params.branch_capacitance;
            cmat(ib, ia) -= params.branch_capacitance;
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> cap_llt(cmat);
    if (cap_llt.info() != Eigen::Success) {
        throw ConfigError("simulate: capacitance network is singular");
    }

    // Step-size gate: the stiffest mode of the worst-case conductance
    // network must stay well resolved (dt at most a tenth of the fastest
    // time constant).  Power iteration on C^-1 * G_max estimates it.
    {
        Eigen::MatrixXd gmax = Eigen::MatrixXd::Zero(nf, nf);
        const double g_edge_max = g_branch + (doped ? params.mem_g_max : 0.0);
        for (const auto& [a, b] : edges) {
            const int ia = free_index[a];
            const int ib = free_index[b];
            if (ia >= 0) gmax(ia, ia) += g_edge_max;
            if (ib >= 0) gmax(ib, ib) += g_edge_max;
            if (ia >= 0 && ib >= 0) {
                gmax(ia, ib) -= g_edge_max;
                gmax(ib, ia) -= g_edge_max;
            }
        }
        gmax(free_index[params.in1_node], free_index[params.in1_node]) += g_source;
        gmax(free_index[params.in2_node], free_index[params.in2_node]) += g_source;
        gmax(free_index[params.out1_node], free_index[params.out1_node]) += g_load1;
        gmax(free_index[params.out2_node], free_index[params.out2_node]) += g_load2;

        Eigen::VectorXd x = Eigen::VectorXd::Ones(nf).normalized();
        double lambda = 0.0;
        for (int it = 0; it < 80; ++it) {
            Eigen::VectorXd y = cap_llt.solve(gmax * x);
            lambda = y.norm();
            if (lambda <= 0.0) break;
            x = y / lambda;
        }
        if (dt * lambda > 0.1) {
            std::ostringstream msg;
            msg << "simulate: step " << dt << " s too coarse for the fastest network mode; "
                << "need dt <= " << 0.1 / lambda << " s";
            throw ConfigError(msg.str());
        }
    }

    // State: free-node voltages then memristor states.
    const int nw = doped ? kEdges : 0;
    Eigen::VectorXd state = Eigen::VectorXd::Zero(nf + nw);
    for (int k = 0; k < nw; ++k) state[nf + k] = params.mem_w_init;

    const auto derivative = [&](const Eigen::VectorXd& y, double u1, double u2) {
        Eigen::VectorXd inj = Eigen::VectorXd::Zero(nf);
        Eigen::VectorXd dy = Eigen::VectorXd::Zero(nf + nw);
        for (int k = 0; k < kEdges; ++k) {
            const auto& [a, b] = edges[k];
            const int ia = free_index[a];
            const int ib = free_index[b];
            const double va = ia >= 0 ? y[ia] : 0.0;
            const double vb = ib >= 0 ? y[ib] : 0.0;
            double g = g_branch;
            if (doped) {
                const double w = y[nf + k];
                const double gm = params.mem_g_min + w * g_span;
                g += gm;
                // Positive current from the low- to the high-index node
                // drives the state up; the growth window w(1-w) pins the
                // endpoints.
                dy[nf + k] = params.mem_mobility * gm * (va - vb) * w * (1.0 - w);
            }
            const double i_ab = g * (va - vb);
            if (ia >= 0) inj[ia] -= i_ab;
            if (ib >= 0) inj[ib] += i_ab;
        }
        inj[free_index[params.in1_node]] += g_source * (u1 - y[free_index[params.in1_node]]);
        inj[free_index[params.in2_node]] += g_source * (u2 - y[free_index[params.in2_node]]);
        inj[free_index[params.out1_node]] -= g_load1 * y[free_index[params.out1_node]];
        inj[free_index[params.out2_node]] -= g_load2 * y[free_index[params.out2_node]];
        dy.head(nf) = cap_llt.solve(inj);
        return dy;
    };

    // Recording chain state.
    GaussianRng rng1(static_cast<std::uint32_t>(mix64(params.seed ^ 0x01)));
    GaussianRng rng2(static_cast<std::uint32_t>(mix64(params.seed ^ 0x02)));
    const double lp_alpha = params.lowpass_cutoff_hz > 0.0
                                ? 1.0 - std::exp(-2.0 * M_PI * params.lowpass_cutoff_hz * dt)
                                : 1.0;
    const double ar = params.noise_ar;
    const double innovation = params.noise_sigma * std::sqrt(1.0 - ar * ar);
    double lp1 = 0.0, lp2 = 0.0;
    double e1 = 0.0, e2 = 0.0;
    bool first_noise = true;

    TerminalOutputs out;
    out.out1.dt = dt;
    out.out2.dt = dt;
    out.out1.samples.reserve(n);
    out.out2.samples.reserve(n);
    const std::string stim = join_stimulus(in1.meta.stimulus, in2.meta.stimulus);
    out.out1.meta = {"out1", stim, kind_name(params.kind)};
    out.out2.meta = {"out2", stim, kind_name(params.kind)};
    if (doped) {
        out.w_min = params.mem_w_init;
        out.w_max = params.mem_w_init;
    } else {
        out.w_min = 0.5;
        out.w_max = 0.5;
    }

    const auto record = [&](double v1, double v2) {
        lp1 += lp_alpha * (v1 - lp1);
        lp2 += lp_alpha * (v2 - lp2);
        double y1 = lp1, y2 = lp2;
        if (params.noise_sigma > 0.0) {
            if (first_noise) {
                e1 = params.noise_sigma * rng1.normal();
                e2 = params.noise_sigma * rng2.normal();
                first_noise = false;
            } else {
                e1 = ar * e1 + innovation * rng1.normal();
                e2 = ar * e2 + innovation * rng2.normal();
            }
            y1 += e1;
            y2 += e2;
        }
        if (params.quantize_step > 0.0) {
            y1 = std::round(y1 / params.quantize_step) * params.quantize_step;
            y2 = std::round(y2 / params.quantize_step) * params.quantize_step;
        }
        out.out1.samples.push_back(y1);
        out.out2.samples.push_back(y2);
    };

    const int io1 = free_index[params.out1_node];
    const int io2 = free_index[params.out2_node];
    record(state[io1], state[io2]);

    Eigen::VectorXd k1, k2, k3, k4, tmp;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        const double u1a = in1.samples[step], u1b = in1.samples[step + 1];
        const double u2a = in2.samples[step], u2b = in2.samples[step + 1];
        const double u1m = 0.5 * (u1a + u1b);
        const double u2m = 0.5 * (u2a + u2b);

        k1 = derivative(state, u1a, u2a);
        tmp = state + (0.5 * dt) * k1;
        k2 = derivative(tmp, u1m, u2m);
        tmp = state + (0.5 * dt) * k2;
        k3 = derivative(tmp, u1m, u2m);
        tmp = state + dt * k3;
        k4 = derivative(tmp, u1b, u2b);
        state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (doped) {
            for (int k = 0; k < nw; ++k) {
                double& w = state[nf + k];
                if (w < 0.0) w = 0.0;
                if (w > 1.0) w = 1.0;
                if (w < out.w_min) out.w_min = w;
                if (w > out.w_max) out.w_max = w;
            }
        }
        record(state[io1], state[io2]);
    }

    return out;
}

SubstrateParams default_params(SubstrateKind kind) {
    SubstrateParams p;
    p.kind = kind;
    p.branch_resistance = 10e3;
    p.branch_capacitance = 1e-6;
    p.source_resistance = 1e3;
    p.out1_load = 100e3;
    p.out2_load = 100e3;
    if (kind == SubstrateKind::Doped) {
        p.mem_g_min = 1e-6;
        p.mem_g_max = 2e-4;
        p.mem_mobility = 4e6;
        p.mem_w_init = 0.5;
        p.lowpass_cutoff_hz = 10.0;
        p.noise_sigma = 0.6;
        p.noise_ar = -0.95;
        p.quantize_step = 0.0;
        p.seed = 202;
    } else {
        p.lowpass_cutoff_hz = 2000.0;
        p.noise_sigma = 0.05;
        p.noise_ar = 0.0;
        p.quantize_step = 0.0;
        p.seed = 101;
    }
    p.has_seed = true;
    return p;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("parameter file: bad numeric value for '" + key + "'");
    }
    if (used != value.size()) {
        throw ConfigError("parameter file: trailing junk after value for '" + key + "'");
    }
    return v;
}

}  // namespace

SubstrateParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open parameter file '" + path + "'");

    SubstrateParams p;
    bool saw_kind = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("parameter file '" + path + "' line " + std::to_string(lineno) +
                              ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) {
            throw ConfigError("parameter file '" + path + "': empty value for '" + key + "'");
        }

        if (key == "kind") {
            p.kind = kind_from_name(value);
            saw_kind = true;
        } else if (key == "in1_node") p.in1_node = static_cast<int>(parse_double(value, key));
        else if (key == "in2_node") p.in2_node = static_cast<int>(parse_double(value, key));
        else if (key == "out1_node") p.out1_node = static_cast<int>(parse_double(value, key));
        else if (key == "out2_node") p.out2_node = static_cast<int>(parse_double(value, key));
        else if (key == "gnd_node") p.gnd_node = static_cast<int>(parse_double(value, key));
        else if (key == "branch_resistance") p.branch_resistance = parse_double(value, key);
        else if (key == "branch_capacitance") p.branch_capacitance = parse_double(value, key);
        else if (key == "source_resistance") p.source_resistance = parse_double(value, key);
        else if (key == "out1_load") p.out1_load = parse_double(value, key);
        else if (key == "out2_load") p.out2_load = parse_double(value, key);
        else if (key == "mem_g_min") p.mem_g_min = parse_double(value, key);
        else if (key == "mem_g_max") p.mem_g_max = parse_double(value, key);
        else if (key == "mem_mobility") p.mem_mobility = parse_double(value, key);
        else if (key == "mem_w_init") p.mem_w_init = parse_double(value, key);
        else if (key == "lowpass_cutoff_hz") p.lowpass_cutoff_hz = parse_double(value, key);
        else if (key == "noise_sigma") p.noise_sigma = parse_double(value, key);
        else if (key == "noise_ar") p.noise_ar = parse_double(value, key);
        else if (key == "quantize_step") p.quantize_step = parse_double(value, key);
        else if (key == "seed") {
            try {
                p.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw ConfigError("parameter file: bad seed value");
            }
            p.has_seed = true;
        } else {
            throw ConfigError("parameter file '" + path + "': unknown key '" + key + "'");
        }
    }
    if (!saw_kind) throw ConfigError("parameter file '" + path + "': missing 'kind'");
    if (!p.has_seed) throw ConfigError("parameter file '" + path + "': missing 'seed'");
    validate_params(p);
    return p;
}

void save_params(const SubstrateParams& params, const std::string& path) {
    validate_params(params);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write parameter file '" + path + "'");
    out.precision(17);
    out << "# substrate parameters (SI units)\n";
    out << "kind = " << kind_name(params.kind) << "\n";
    out << "in1_node = " << params.in1_node << "\n";
    out << "in2_node = " << params.in2_node << "\n";
    out << "out1_node = " << params.out1_node << "\n";
    out << "out2_node = " << params.out2_node << "\n";
    out << "gnd_node = " << params.gnd_node << "\n";
    out << "branch_resistance = " << params.branch_resistance << "\n";
    out << "branch_capacitance = " << params.branch_capacitance << "\n";
    out << "source_resistance = " << params.source_resistance << "\n";
    out << "out1_load = " << params.out1_load << "\n";
    out << "out2_load = " << params.out2_load << "\n";
    if (params.kind == SubstrateKind::Doped) {
        out << "mem_g_min = " << params.mem_g_min << "\n";
        out << "mem_g_max = " << params.mem_g_max << "\n";
        out << "mem_mobility = " << params.mem_mobility << "\n";
        out << "mem_w_init = " << params.mem_w_init << "\n";
    }
    out << "lowpass_cutoff_hz = " << params.lowpass_cutoff_hz << "\n";
    out << "noise_sigma = " << params.noise_sigma << "\n";
    out << "noise_ar = " << params.noise_ar << "\n";
    out << "quantize_step = " << params.quantize_step << "\n";
    out << "seed = " << params.seed << "\n";
    if (!out) throw ConfigError("failed writing parameter file '" + path + "'");
}

}  // namespace resmix::reservoir
