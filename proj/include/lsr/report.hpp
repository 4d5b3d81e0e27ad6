#pragma once

#include <json.hpp>

#include "lsr/config.hpp"
#include "lsr/experiments.hpp"
#include "lsr/quadrature.hpp"

namespace lsr {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

Json to_json(const IdentityReport& rep);
Json to_json(const LSSolution& sol);
Json to_json(const ExpansionReport& rep);
Json to_json(const ScanResult& res);
Json to_json(const BEFitResult& res);
Json to_json(const Cor16Report& rep);

// Flattens a report to CSV: tabular sections become header+rows, scalars
// become key,value rows.
std::string to_csv(const Json& report);

// Writes to cfg.out_path (or stdout) in cfg.format; optionally writes a
// gnuplot-ready <out>.dat with the scan columns.
void write_report(const Json& report, const RunConfig& cfg);
void write_plot_dat(const ScanResult& res, const std::string& path);

}  // namespace lsr
