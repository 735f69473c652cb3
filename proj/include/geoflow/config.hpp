#pragma once

// Scenario configuration: a single JSON document per scenario.
//
// Grid fields and initial data are trigonometric series
//   {"constant": c, "terms": [{"amp": A, "kx": 1, "ky": 0, "fn": "cos"}]}
// meaning c + Σ A·fn(2π(kx·x + ky·y)). Sphere initial data is a list of
// zonal modes {"modes": [[l, c_l], ...]}.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoflow/flows.hpp"
#include "geoflow/frequency.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/measures.hpp"

namespace geoflow {

struct TrigTerm {
  double amp = 0.0;
  int kx = 0;
  int ky = 0;
  bool cosine = true;
  friend bool operator==(const TrigTerm&, const TrigTerm&) = default;
};

struct TrigSeries {
  double constant = 0.0;
  std::vector<TrigTerm> terms;

  double operator()(double x, double y) const;
  double dx(double x, double y) const;
  double dy(double x, double y) const;
  /// Flat Laplacian Δ₀ of the series.
  double flat_laplacian(double x, double y) const;
  friend bool operator==(const TrigSeries&, const TrigSeries&) = default;
};

struct InitialData {
  TrigSeries series;       // grid backends
  std::vector<Mode> modes;  // sphere
  friend bool operator==(const InitialData&, const InitialData&) = default;
};

struct BackendSpec {
  Backend kind = Backend::sphere;
  int dim = 2;
  double radius_sq = 1.0;
  int band_limit = 32;
  int n = 128;
  TrigSeries phi;      // conformal exponent
  TrigSeries a{1.0, {}};
  TrigSeries b{1.0, {}};
  TrigSeries phi_map;
  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

struct Tolerances {
  std::optional<double> monotone;  // default: 1e-10 sphere, 10(Δx² + Δt) grids
  std::optional<double> constant;  // default: 1e-10 sphere, 1e-8 grids
  std::optional<double> mass;      // default: 1e-10 sphere, 1e-6 grids
  double estimate = 1e-8;
  double ratio = 1e-8;
  double eigen_relative = 1e-3;
  std::optional<double> volume;    // default: 1e-10 sphere, 10(Δx² + Δt) grids
  double reduction = 1e-12;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

enum class Normalization { kappa, harnack };

struct ScenarioConfig {
  std::string id;
  std::string description;
  BackendSpec backend;
  FlowKind flow = FlowKind::ricci;
  Schedule alpha;
  double t_end = 0.01;
  std::optional<int> steps;  // default: smallest count meeting the step bound (≥ 16)
  double tau0 = 1.0;
  TerminalSpec terminal;
  InitialData u0;
  Schedule a;
  bool positive = false;
  HSchedule h;
  double t0 = 0.0;
  std::optional<double> t1;  // default: t_end
  // Which normalized frequency "frequency-constant" tracks: U3 (kappa) or U4 (harnack).
  Normalization normalization = Normalization::kappa;
  std::optional<double> kappa_override;
  std::optional<double> k_bound;
  std::optional<double> lambda_reference;
  int eigen_stride = 0;  // 0: automatic
  std::vector<std::string> checks;
  Tolerances tolerances;
  std::optional<std::string> expect;  // "pass" or "fail"
  std::string output;

  double interval_end() const { return t1.value_or(t_end); }
};

bool operator==(const TerminalSpec& a, const TerminalSpec& b);
bool operator==(const HSchedule& a, const HSchedule& b);
bool operator==(const Schedule& a, const Schedule& b);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// Names accepted in the "checks" list.
const std::vector<std::string>& known_checks();

/// Validates and applies defaults; throws ConfigError naming the field path.
ScenarioConfig parse_config(const nlohmann::ordered_json& doc);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& file);

/// Canonical JSON echo; parse_config(to_json(c)) == c.
nlohmann::ordered_json to_json(const ScenarioConfig& c);

/// Directory holding the bundled scenario files.
std::filesystem::path scenario_dir();
std::vector<std::string> bundled_scenarios();
/// Accepts a path to a JSON file or the name of a bundled scenario.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

ManifoldState initial_state(const ScenarioConfig& c);
ScalarField initial_field(const ScenarioConfig& c, const ManifoldState& state);
/// Steps actually used (explicit value, or the smallest count meeting the step bound).
int resolved_steps(const ScenarioConfig& c);

}  // namespace geoflow
