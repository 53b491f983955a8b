#include "resmix/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "resmix/errors.hpp"

namespace resmix::io {

double round_sig(double v, int digits) {
    if (!std::isfinite(v)) throw NumericalError("round_sig: non-finite value");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

void write_series_csv(const TimeSeries& ts, const std::string& path) {
    validate(ts, "write_series_csv");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "t_s,v_volts\n";
    char buf[96];
    for (std::size_t i = 0; i < ts.samples.size(); ++i) {
        const double t = static_cast<double>(i) * ts.dt;
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", t, ts.samples[i]);
        out << buf;
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

TimeSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_s,v_volts") {
        throw DataError("'" + path + "': header must be exactly 't_s,v_volts'");
    }

    std::vector<double> times, volts;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw DataError("'" + path + "' row " + std::to_string(lineno) +
                            ": expected exactly two columns");
        }
        const auto parse = [&](const std::string& field, const char* what) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(field, &used);
            } catch (const std::exception&) {
                throw DataError("'" + path + "' row " + std::to_string(lineno) + ": bad " + what);
            }
            if (used != field.size() || !std::isfinite(v)) {
                throw DataError("'" + path + "' row " + std::to_string(lineno) + ": bad " + what);
            }
            return v;
        };
        times.push_back(parse(line.substr(0, comma), "timestamp"));
        volts.push_back(parse(line.substr(comma + 1), "voltage"));
    }
    if (times.size() < 2) throw DataError("'" + path + "': need at least two samples");

    std::vector<double> steps(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        steps[i] = times[i + 1] - times[i];
        if (!(steps[i] > 0.0)) {
            throw DataError("'" + path + "' row " + std::to_string(i + 3) +
                            ": timestamps must be strictly increasing");
        }
    }
    std::vector<double> sorted = steps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::string offenders;
    int bad = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (std::abs(steps[i] - median) > 1e-3 * median) {
            ++bad;
            if (bad <= 5) offenders += (offenders.empty() ? "" : ", ") + std::to_string(i + 3);
        }
    }
    if (bad > 0) {
        throw DataError("'" + path + "': sampling jitter above 0.1% at " + std::to_string(bad) +
                        " row(s), first at row(s) " + offenders);
    }

    TimeSeries ts;
    ts.dt = median;
    ts.samples = std::move(volts);
    return ts;
}

json feature_json(const metrics::FeatureVector& fv, const SeriesMeta& meta,
                  const prep::StationarityReport* stationarity) {
    json j;
    j["version"] = 1;
    j["terminal"] = meta.terminal;
    j["stimulus"] = meta.stimulus;
    j["substrate"] = meta.substrate;
    j["dt"] = round_sig(fv.dt);
    if (stationarity != nullptr) {
        json s;
        s["adf_statistic"] = round_sig(stationarity->adf_statistic);
        s["p_value"] = round_sig(stationarity->p_value);
        s["lags_used"] = stationarity->lags_used;
        s["reject_unit_root"] = stationarity->reject_unit_root;
        j["stationarity"] = s;
    }
    j["tau"] = fv.tau;
    j["dim"] = fv.dim;
    const auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v.has_value()) j[key] = round_sig(*v);
    };
    put("mle", fv.mle);
    put("mle_per_second", fv.mle_per_second);
    put("dfa_alpha", fv.dfa_alpha);
    put("corr_dim", fv.corr_dim);
    put("sampen", fv.sampen);
    put("sampen_at_dim", fv.sampen_at_dim);
    put("apen", fv.apen);
    put("perm_entropy", fv.perm_entropy);
    put("katz_fd", fv.katz_fd);
    put("petrosian_fd", fv.petrosian_fd);
    j["flags"] = fv.flags;
    return j;
}

json ledger_json(const classify::TrendLedger& ledger) {
    json j;
    j["version"] = 1;
    j["epsilon_rel"] = round_sig(ledger.epsilon_rel);
    json params = json::object();
    for (const auto& [name, series] : ledger.parameters) {
        json entry;
        entry["trend"] = classify::direction_name(series.aggregate);
        json points = json::array();
        for (const auto& p : series.points) {
            json q;
            q["frequency_hz"] = round_sig(p.frequency_hz);
            q["undoped"] = round_sig(p.undoped);
            q["doped"] = round_sig(p.doped);
            points.push_back(q);
        }
        entry["points"] = points;
        params[name] = entry;
    }
    j["parameters"] = params;
    return j;
}

classify::TrendLedger ledger_from_json(const json& j) {
    try {
        std::map<std::string, std::vector<classify::TrendPoint>> raw;
        for (const auto& [name, entry] : j.at("parameters").items()) {
            std::vector<classify::TrendPoint> points;
            for (const auto& q : entry.at("points")) {
                points.push_back({q.at("frequency_hz").get<double>(),
                                  q.at("undoped").get<double>(), q.at("doped").get<double>()});
            }
            raw.emplace(name, std::move(points));
        }
        return classify::build_ledger(raw, j.at("epsilon_rel").get<double>());
    } catch (const json::exception& e) {
        throw DataError(std::string("ledger json: ") + e.what());
    }
}

classify::ParallelThresholds load_thresholds(const std::string& path) {
    const json j = read_json_file(path);
    classify::ParallelThresholds t;
    try {
        t.version = j.at("version").get<int>();
        t.sp_sine_max = j.at("sp_sine_max").get<double>();
        t.sp_triangle_max = j.at("sp_triangle_max").get<double>();
        t.dp_square_min = j.at("dp_square_min").get<double>();
        t.conf_scale_sp = j.at("conf_scale_sp").get<double>();
        t.conf_scale_dp = j.at("conf_scale_dp").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError("thresholds file '" + path + "': " + e.what());
    }
    if (t.version != 1) {
        throw ConfigError("thresholds file '" + path + "': unsupported version");
    }
    return t;
}

void save_thresholds(const classify::ParallelThresholds& t, const std::string& path) {
    json j;
    j["version"] = t.version;
    j["sp_sine_max"] = round_sig(t.sp_sine_max);
    j["sp_triangle_max"] = round_sig(t.sp_triangle_max);
    j["dp_square_min"] = round_sig(t.dp_square_min);
    j["conf_scale_sp"] = round_sig(t.conf_scale_sp);
    j["conf_scale_dp"] = round_sig(t.conf_scale_dp);
    write_json_file(j, path);
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw DataError("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("'" + path + "': " + e.what());
    }
}

}  // namespace resmix::io
