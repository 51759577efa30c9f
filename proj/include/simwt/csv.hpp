#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "simwt/bootstrap.hpp"
#include "simwt/dataset.hpp"
#include "simwt/harness.hpp"
#include "simwt/weights.hpp"

namespace simwt {

// Shortest round-trip decimal representation; NaN prints as "nan".
std::string format_double(double v);

// Strict CSV schema: header row `subgroup,y,<covariate...>`, comma delimiter,
// decimal point, no quoting, no missing values. Violations raise DataError
// with the source name, 1-based line and the offending column.
Dataset read_dataset_csv(std::istream& in, const std::string& source);
Dataset read_dataset_csv_file(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv_file(const std::string& path, const Dataset& data);

// Weighted sample rows: subgroup, weight, y, covariates (target rows first).
void write_weights_csv(std::ostream& out, const WeightedSample& sample);

nlohmann::json weigh_diagnostics_json(const WeightedSample& sample);

// One row per CellResult, in grid enumeration order.
void write_results_csv(std::ostream& out, const std::vector<CellResult>& cells);

nlohmann::json grid_summary_json(const GridSummary& summary);

nlohmann::json bootstrap_report_json(const BootstrapReport& report);

// Long-format per-observation table: method, row, outcome, mean_loss, p5,
// p95, n_oob.
void write_observation_errors_csv(std::ostream& out, const BootstrapReport& report);

// CDF step tables: method, value, cumulative.
void write_cdf_csv(std::ostream& out, const BootstrapReport& report);

}  // namespace simwt
