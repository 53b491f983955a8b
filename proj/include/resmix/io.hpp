#pragma once

#include <string>

#include <json.hpp>

#include "resmix/classify.hpp"
#include "resmix/metrics.hpp"
#include "resmix/prep.hpp"
#include "resmix/types.hpp"

namespace resmix::io {

/// Insertion-ordered JSON keeps emitted files stable across runs.
using json = nlohmann::ordered_json;

/// Rounds to the given number of significant decimal digits (the precision
/// every emitted float carries).
double round_sig(double v, int digits = 12);

/// Two-column CSV, header `t_s,v_volts`, twelve significant digits.
void write_series_csv(const TimeSeries& ts, const std::string& path);

/// Inverse of the writer.  Accepts any strictly increasing time column that
/// is uniform to within 0.1% of the median step; offending rows are named.
TimeSeries read_series_csv(const std::string& path);

/// Flat feature object: sampling step, stationarity verdict, embedding
/// choice, one key per extracted value (failed ones omitted), flags.
json feature_json(const metrics::FeatureVector& fv, const SeriesMeta& meta,
                  const prep::StationarityReport* stationarity);

json ledger_json(const classify::TrendLedger& ledger);
classify::TrendLedger ledger_from_json(const json& j);

classify::ParallelThresholds load_thresholds(const std::string& path);
void save_thresholds(const classify::ParallelThresholds& t, const std::string& path);

void write_json_file(const json& j, const std::string& path);
json read_json_file(const std::string& path);

}  // namespace resmix::io
