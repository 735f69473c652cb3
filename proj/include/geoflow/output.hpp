#pragma once

// Scenario artifacts: series.csv and report.json.

#include <filesystem>
#include <string>

#include "geoflow/harness.hpp"

namespace geoflow {

inline constexpr const char* kSeriesHeader =
    "t,I,D,U3,U4,kappa,s_bound,lambda1,slack_hamilton,slack_liyau";

/// CSV text for the frequency rows; absent values are empty cells.
std::string series_csv(const std::vector<SeriesRow>& rows);

/// Writes series.csv (unless `series` is false) and report.json into dir.
/// Throws Error on I/O failure.
void emit_outputs(const ScenarioResult& result, const std::filesystem::path& dir,
                  bool series = true);

/// 0 when nothing failed, 2 when a check failed.
int exit_code(const Report& report);

}  // namespace geoflow
