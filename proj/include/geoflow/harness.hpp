#pragma once

// Scenario orchestration: flow, backward conjugate solve, heat solve,
// frequency series, estimates, verdicts.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoflow/config.hpp"
#include "geoflow/estimates.hpp"
#include "geoflow/frequency.hpp"

namespace geoflow {

enum class Direction { nondecreasing, nonincreasing };
enum class Verdict { pass, fail, not_asserted };
const char* to_string(Verdict v);

struct Hypothesis {
  std::string name;
  std::string status;  // "pass", "fail" or "assumed"
  bool holds() const { return status != "fail"; }
};

struct CheckItem {
  std::string name;
  std::string statement;  // what is being verified, in words
  Verdict verdict = Verdict::not_asserted;
  double worst_slack = 0.0;
  double tolerance = 0.0;
  std::vector<Hypothesis> hypotheses;
  std::string detail;
  int index = -1;  // first failing position for series checks
};

/// pass ⇔ every consecutive difference respects the direction within tol.
CheckItem verify_monotone(const std::vector<std::pair<double, double>>& series, Direction dir,
                          double tol);

struct Report {
  std::string id;
  std::vector<CheckItem> items;
  double runtime_seconds = 0.0;
  nlohmann::ordered_json config;
  nlohmann::ordered_json diagnostics;

  bool all_pass() const;  // no item with verdict fail
  const CheckItem* find(const std::string& name) const;
};

struct SeriesRow {
  double t = 0.0;
  double I = 0.0, D = 0.0;
  double U3 = kAbsent, U4 = kAbsent, kappa = kAbsent, s = kAbsent, lambda1 = kAbsent;
  double slack_hamilton = kAbsent, slack_liyau = kAbsent;
};

struct ScenarioResult {
  Report report;
  std::vector<FrequencyRecord> records;
  std::vector<SeriesRow> rows;
};

/// Runs the full pipeline. Solver errors are rethrown with a stage label.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Default tolerances resolved for a config.
double monotone_tolerance(const ScenarioConfig& c);

struct RefinementLevel {
  int n = 0;
  int steps = 0;
  double curvature_error = 0.0;
  double heat_error = 0.0;        // vs closed form (flat) or the next finer level
  double bochner_defect = 0.0;    // relative integral Bochner defect at t = 0
  double f_residual = 0.0;
  double volume_residual = 0.0;  // max relative volume-form residual
  double U_end = 0.0;
};

struct RefinementResult {
  std::vector<RefinementLevel> levels;
  std::map<std::string, double> orders;  // observed order between the last usable pair
  std::map<std::string, std::vector<double>> all_orders;
  bool exact = false;                    // closed-form backend: errors at round-off
  bool heat_closed_form = false;
};

/// Runs the config at n, 2n, 4n, ... with Δt divided by 4 per level.
RefinementResult refinement_study(const ScenarioConfig& config, int levels);

nlohmann::ordered_json to_json(const Report& r);

}  // namespace geoflow
