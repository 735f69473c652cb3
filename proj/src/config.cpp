#include "geoflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "geoflow/errors.hpp"

#ifndef GEOFLOW_SCENARIO_DIR
#define GEOFLOW_SCENARIO_DIR "scenarios"
#endif

namespace geoflow {

using json = nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reads one JSON object, remembering which keys were consumed so the rest
// can be rejected with their full path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(sub(key), "required key missing");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(sub(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(sub(key), "expected a finite number");
    return d;
  }
  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  int integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    return has(key) ? integer(key) : fallback;
  }
  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(sub(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    return has(key) ? string(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(sub(key), "expected true or false");
    return v.get<bool>();
  }

  void mark(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(sub(it.key()), "unknown key");
  }

 private:
  json j_;
  std::string path_;
  std::set<std::string> seen_;
};

TrigSeries parse_series(const json& j, const std::string& path) {
  if (j.is_number()) return TrigSeries{j.get<double>(), {}};
  Reader r(j, path);
  TrigSeries s;
  s.constant = r.number("constant", 0.0);
  if (r.has("terms")) {
    const auto& terms = r.at("terms");
    if (!terms.is_array()) throw ConfigError(r.sub("terms"), "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Reader t(terms[i], r.sub("terms") + "[" + std::to_string(i) + "]");
      TrigTerm term;
      term.amp = t.number("amp");
      term.kx = t.integer("kx", 0);
      term.ky = t.integer("ky", 0);
      const auto fn = t.string("fn", "cos");
      if (fn != "cos" && fn != "sin") throw ConfigError(t.sub("fn"), "expected \"cos\" or \"sin\"");
      term.cosine = fn == "cos";
      t.finish();
      s.terms.push_back(term);
    }
  }
  r.mark("terms");
  r.finish();
  return s;
}

json series_json(const TrigSeries& s) {
  json j;
  j["constant"] = s.constant;
  json terms = json::array();
  for (const auto& t : s.terms)
    terms.push_back(json{{"amp", t.amp}, {"kx", t.kx}, {"ky", t.ky}, {"fn", t.cosine ? "cos" : "sin"}});
  j["terms"] = terms;
  return j;
}

Schedule parse_schedule(const json& j, const std::string& path) {
  if (j.is_number()) return Schedule{j.get<double>(), 0.0};
  Reader r(j, path);
  const auto kind = r.string("kind", "constant");
  Schedule s;
  s.c0 = r.number("value");
  if (kind == "constant") {
    s.rate = 0.0;
  } else if (kind == "exponential") {
    s.rate = r.number("rate");
  } else {
    throw ConfigError(r.sub("kind"), "expected \"constant\" or \"exponential\"");
  }
  r.finish();
  return s;
}

json schedule_json(const Schedule& s) {
  if (s.rate == 0.0) return json{{"kind", "constant"}, {"value", s.c0}};
  return json{{"kind", "exponential"}, {"value", s.c0}, {"rate", s.rate}};
}

Backend parse_backend_kind(const std::string& s, const std::string& path) {
  if (s == "sphere") return Backend::sphere;
  if (s == "conformal-torus") return Backend::conformal_torus;
  if (s == "warped-torus") return Backend::warped_torus;
  throw ConfigError(path, "expected \"sphere\", \"conformal-torus\" or \"warped-torus\"");
}

BackendSpec parse_backend(const json& j) {
  Reader r(j, "backend");
  BackendSpec b;
  b.kind = parse_backend_kind(r.string("kind"), "backend.kind");
  switch (b.kind) {
    case Backend::sphere:
      b.dim = r.integer("dim", 2);
      b.radius_sq = r.number("radius_sq", 1.0);
      b.band_limit = r.integer("band_limit", 32);
      if (b.dim < 2) throw ConfigError("backend.dim", "must be at least 2");
      if (!(b.radius_sq > 0.0)) throw ConfigError("backend.radius_sq", "must be positive");
      if (b.band_limit < 1) throw ConfigError("backend.band_limit", "must be at least 1");
      break;
    case Backend::conformal_torus:
      b.n = r.integer("n", 128);
      if (r.has("phi")) b.phi = parse_series(r.at("phi"), "backend.phi");
      r.mark("phi");
      break;
    case Backend::warped_torus:
      b.n = r.integer("n", 128);
      if (r.has("a")) b.a = parse_series(r.at("a"), "backend.a");
      if (r.has("b")) b.b = parse_series(r.at("b"), "backend.b");
      if (r.has("phi_map")) b.phi_map = parse_series(r.at("phi_map"), "backend.phi_map");
      for (const auto* key : {"a", "b", "phi_map"}) r.mark(key);
      for (const auto& t : b.a.terms)
        if (t.ky != 0) throw ConfigError("backend.a", "warp fields depend on x only");
      for (const auto& t : b.b.terms)
        if (t.ky != 0) throw ConfigError("backend.b", "warp fields depend on x only");
      for (const auto& t : b.phi_map.terms)
        if (t.ky != 0) throw ConfigError("backend.phi_map", "the map field depends on x only");
      break;
  }
  if (b.kind != Backend::sphere && b.n < 8) throw ConfigError("backend.n", "must be at least 8");
  r.finish();
  return b;
}

json backend_json(const BackendSpec& b) {
  json j;
  j["kind"] = to_string(b.kind);
  switch (b.kind) {
    case Backend::sphere:
      j["dim"] = b.dim;
      j["radius_sq"] = b.radius_sq;
      j["band_limit"] = b.band_limit;
      break;
    case Backend::conformal_torus:
      j["n"] = b.n;
      j["phi"] = series_json(b.phi);
      break;
    case Backend::warped_torus:
      j["n"] = b.n;
      j["a"] = series_json(b.a);
      j["b"] = series_json(b.b);
      j["phi_map"] = series_json(b.phi_map);
      break;
  }
  return j;
}

InitialData parse_initial(const json& j, Backend kind) {
  InitialData d;
  if (kind == Backend::sphere) {
    Reader r(j, "heat.u0");
    const auto& modes = r.at("modes");
    if (!modes.is_array() || modes.empty())
      throw ConfigError("heat.u0.modes", "expected a non-empty array of [degree, coefficient]");
    std::set<int> seen;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& m = modes[i];
      const std::string path = "heat.u0.modes[" + std::to_string(i) + "]";
      if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number())
        throw ConfigError(path, "expected [degree, coefficient]");
      const int l = m[0].get<int>();
      if (l < 0) throw ConfigError(path, "degree must be non-negative");
      if (!seen.insert(l).second) throw ConfigError(path, "duplicate degree");
      d.modes.push_back({l, m[1].get<double>()});
    }
    std::sort(d.modes.begin(), d.modes.end(),
              [](const Mode& a, const Mode& b) { return a.degree < b.degree; });
    r.finish();
  } else {
    d.series = parse_series(j, "heat.u0");
  }
  return d;
}

json initial_json(const InitialData& d, Backend kind) {
  if (kind != Backend::sphere) return series_json(d.series);
  json modes = json::array();
  for (const auto& m : d.modes) modes.push_back(json::array({m.degree, m.coeff}));
  return json{{"modes", modes}};
}

HSchedule parse_h(const json& j) {
  if (j.is_number()) return HSchedule{HKind::constant, j.get<double>(), 0.0, 0.0};
  Reader r(j, "frequency.h");
  const auto kind = r.string("kind");
  HSchedule h;
  if (kind == "constant") {
    h.kind = HKind::constant;
    h.c0 = r.number("c");
  } else if (kind == "backwards-time") {
    h.kind = HKind::backwards_time;
  } else if (kind == "linear") {
    h.kind = HKind::linear;
    h.c0 = r.number("c0");
    h.c1 = r.number("c1");
  } else {
    throw ConfigError("frequency.h.kind",
                      "expected \"constant\", \"backwards-time\" or \"linear\"");
  }
  r.finish();
  return h;
}

json h_json(const HSchedule& h) {
  switch (h.kind) {
    case HKind::constant:
      return json{{"kind", "constant"}, {"c", h.c0}};
    case HKind::backwards_time:
      return json{{"kind", "backwards-time"}};
    case HKind::linear:
      return json{{"kind", "linear"}, {"c0", h.c0}, {"c1", h.c1}};
  }
  return {};
}

TerminalSpec parse_terminal(const json& j) {
  Reader r(j, "terminal");
  TerminalSpec t;
  const auto kind = r.string("kind", "uniform");
  if (kind == "uniform") {
    t.kind = TerminalKind::uniform;
  } else if (kind == "bump") {
    t.kind = TerminalKind::bump;
    t.center_x = r.number("center_x", 0.5);
    t.center_y = r.number("center_y", 0.5);
    t.width = r.number("width", 0.25);
    if (!(t.width > 0.0)) throw ConfigError("terminal.width", "must be positive");
  } else {
    throw ConfigError("terminal.kind", "expected \"uniform\" or \"bump\"");
  }
  r.finish();
  return t;
}

json terminal_json(const TerminalSpec& t) {
  if (t.kind == TerminalKind::uniform) return json{{"kind", "uniform"}};
  return json{{"kind", "bump"}, {"center_x", t.center_x}, {"center_y", t.center_y},
              {"width", t.width}};
}

Tolerances parse_tolerances(const json& j) {
  Reader r(j, "tolerances");
  Tolerances t;
  t.monotone = r.optional_number("monotone");
  t.constant = r.optional_number("constant");
  t.mass = r.optional_number("mass");
  t.estimate = r.number("estimate", t.estimate);
  t.ratio = r.number("ratio", t.ratio);
  t.eigen_relative = r.number("eigen_relative", t.eigen_relative);
  t.volume = r.optional_number("volume");
  t.reduction = r.number("reduction", t.reduction);
  r.finish();
  return t;
}

json tolerances_json(const Tolerances& t) {
  json j;
  if (t.monotone) j["monotone"] = *t.monotone;
  if (t.constant) j["constant"] = *t.constant;
  if (t.mass) j["mass"] = *t.mass;
  j["estimate"] = t.estimate;
  j["ratio"] = t.ratio;
  j["eigen_relative"] = t.eigen_relative;
  if (t.volume) j["volume"] = *t.volume;
  j["reduction"] = t.reduction;
  return j;
}

void validate_config(const ScenarioConfig& c) {
  if (!(c.t_end > 0.0)) throw ConfigError("horizon.t_end", "must be positive");
  if (c.steps && *c.steps < 16) throw ConfigError("horizon.steps", "must be at least 16");
  if (!(c.tau0 > 0.0)) throw ConfigError("tau0", "must be positive");
  if (!(c.t0 > 0.0)) throw ConfigError("frequency.t0", "must be positive");
  const double t1 = c.interval_end();
  if (!(t1 > c.t0)) throw ConfigError("frequency.t1", "must exceed frequency.t0");
  if (t1 > c.t_end * (1.0 + 1e-12)) throw ConfigError("frequency.t1", "must not exceed horizon.t_end");
  try {
    c.h.validate(c.t0, t1);
  } catch (const DomainError& e) {
    throw ConfigError("frequency.h", e.what());
  }
  if (c.normalization == Normalization::harnack && !c.positive)
    throw ConfigError("heat.positive", "the Harnack normalization needs a positive solution");
  if (c.flow == FlowKind::ricci_harmonic) {
    if (c.backend.kind != Backend::warped_torus)
      throw ConfigError("flow.kind", "the Ricci-harmonic flow needs the warped-torus backend");
    if (c.alpha.c0 < 0.0) throw ConfigError("flow.alpha.value", "must be non-negative");
    if (c.alpha.rate < 0.0) throw ConfigError("flow.alpha.rate", "must be non-negative");
  }
  if (c.eigen_stride < 0) throw ConfigError("frequency.eigen_stride", "must be non-negative");
  if (c.backend.kind == Backend::sphere) {
    if (c.u0.modes.empty()) throw ConfigError("heat.u0", "sphere data needs zonal modes");
    for (const auto& m : c.u0.modes)
      if (m.degree > c.backend.band_limit)
        throw ConfigError("heat.u0.modes", "degree exceeds the band limit");
    if (c.terminal.kind != TerminalKind::uniform)
      throw ConfigError("terminal.kind", "the sphere supports only uniform terminal data");
  }
  const auto& known = known_checks();
  for (std::size_t i = 0; i < c.checks.size(); ++i)
    if (std::find(known.begin(), known.end(), c.checks[i]) == known.end())
      throw ConfigError("checks[" + std::to_string(i) + "]", "unknown check \"" + c.checks[i] + "\"");
  if (c.expect && *c.expect != "pass" && *c.expect != "fail")
    throw ConfigError("expect", "expected \"pass\" or \"fail\"");
}

double series_term(const TrigTerm& t, double x, double y) {
  const double arg = kTwoPi * (t.kx * x + t.ky * y);
  return t.cosine ? std::cos(arg) : std::sin(arg);
}

double series_term_derivative(const TrigTerm& t, double x, double y) {
  const double arg = kTwoPi * (t.kx * x + t.ky * y);
  return t.cosine ? -std::sin(arg) : std::cos(arg);
}

}  // namespace

double TrigSeries::operator()(double x, double y) const {
  double v = constant;
  for (const auto& t : terms) v += t.amp * series_term(t, x, y);
  return v;
}

double TrigSeries::dx(double x, double y) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.amp * kTwoPi * t.kx * series_term_derivative(t, x, y);
  return v;
}

double TrigSeries::dy(double x, double y) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.amp * kTwoPi * t.ky * series_term_derivative(t, x, y);
  return v;
}

double TrigSeries::flat_laplacian(double x, double y) const {
  double v = 0.0;
  for (const auto& t : terms)
    v -= t.amp * kTwoPi * kTwoPi * (t.kx * t.kx + t.ky * t.ky) * series_term(t, x, y);
  return v;
}

bool operator==(const TerminalSpec& a, const TerminalSpec& b) {
  if (a.kind != b.kind) return false;
  return a.kind == TerminalKind::uniform ||
         (a.center_x == b.center_x && a.center_y == b.center_y && a.width == b.width);
}

bool operator==(const HSchedule& a, const HSchedule& b) {
  return a.kind == b.kind && a.c0 == b.c0 && a.c1 == b.c1 && a.T == b.T;
}

bool operator==(const Schedule& a, const Schedule& b) { return a.c0 == b.c0 && a.rate == b.rate; }

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.id == b.id && a.description == b.description && a.backend == b.backend &&
         a.flow == b.flow && a.alpha == b.alpha && a.t_end == b.t_end && a.steps == b.steps &&
         a.tau0 == b.tau0 && a.terminal == b.terminal && a.u0 == b.u0 && a.a == b.a &&
         a.positive == b.positive && a.h == b.h && a.t0 == b.t0 && a.t1 == b.t1 &&
         a.normalization == b.normalization && a.kappa_override == b.kappa_override &&
         a.k_bound == b.k_bound && a.lambda_reference == b.lambda_reference &&
         a.eigen_stride == b.eigen_stride && a.checks == b.checks &&
         a.tolerances == b.tolerances && a.expect == b.expect && a.output == b.output;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "mass",
      "frequency-monotone",
      "frequency-constant",
      "harnack-frequency-monotone",
      "eigenvalue-monotone",
      "harnack-eigenvalue-monotone",
      "ratio-bound",
      "ratio-equality",
      "hamilton-estimate",
      "li-yau-estimate",
      "volume-evolution",
      "eigenvalue-reference",
      "alpha-zero-reduction",
  };
  return names;
}

ScenarioConfig parse_config(const json& doc) {
  Reader root(doc, "");
  ScenarioConfig c;
  c.id = root.string("id", "scenario");
  c.description = root.string("description", "");
  c.backend = parse_backend(root.at("backend"));

  {
    Reader f(root.has("flow") ? root.at("flow") : json::object(), "flow");
    root.mark("flow");
    const auto kind = f.string("kind", "ricci");
    if (kind == "ricci") {
      c.flow = FlowKind::ricci;
    } else if (kind == "ricci-harmonic") {
      c.flow = FlowKind::ricci_harmonic;
    } else {
      throw ConfigError("flow.kind", "expected \"ricci\" or \"ricci-harmonic\"");
    }
    if (f.has("alpha")) c.alpha = parse_schedule(f.at("alpha"), "flow.alpha");
    f.mark("alpha");
    if (c.flow == FlowKind::ricci && c.alpha.c0 != 0.0)
      throw ConfigError("flow.alpha", "alpha only applies to the Ricci-harmonic flow");
    f.finish();
  }

  if (root.has("horizon")) {
    Reader hz(root.at("horizon"), "horizon");
    c.t_end = hz.number("t_end", c.t_end);
    if (hz.has("steps")) c.steps = hz.integer("steps");
    hz.mark("steps");
    hz.finish();
  } else {
    root.mark("horizon");
  }
  c.tau0 = root.number("tau0", 1.0);
  if (root.has("terminal")) c.terminal = parse_terminal(root.at("terminal"));
  root.mark("terminal");

  if (root.has("heat")) {
    Reader ht(root.at("heat"), "heat");
    c.u0 = parse_initial(ht.at("u0"), c.backend.kind);
    if (ht.has("a")) c.a = parse_schedule(ht.at("a"), "heat.a");
    ht.mark("a");
    c.positive = ht.boolean("positive", false);
    ht.finish();
  } else {
    throw ConfigError("heat", "required key missing");
  }

  {
    Reader fr(root.has("frequency") ? root.at("frequency") : json::object(), "frequency");
    root.mark("frequency");
    if (fr.has("h")) c.h = parse_h(fr.at("h"));
    fr.mark("h");
    c.t0 = fr.number("t0", c.t_end / 4.0);
    if (fr.has("t1")) c.t1 = fr.number("t1");
    fr.mark("t1");
    const auto norm = fr.string("normalization", "kappa");
    if (norm == "kappa") {
      c.normalization = Normalization::kappa;
    } else if (norm == "harnack") {
      c.normalization = Normalization::harnack;
    } else {
      throw ConfigError("frequency.normalization", "expected \"kappa\" or \"harnack\"");
    }
    c.kappa_override = fr.optional_number("kappa_override");
    c.k_bound = fr.optional_number("k_bound");
    c.lambda_reference = fr.optional_number("lambda_reference");
    c.eigen_stride = fr.integer("eigen_stride", 0);
    fr.finish();
  }
  if (c.h.kind == HKind::backwards_time) c.h.T = c.t_end + c.tau0;

  if (root.has("checks")) {
    const auto& checks = root.at("checks");
    if (!checks.is_array()) throw ConfigError("checks", "expected an array of names");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      if (!checks[i].is_string())
        throw ConfigError("checks[" + std::to_string(i) + "]", "expected a string");
      c.checks.push_back(checks[i].get<std::string>());
    }
  }
  root.mark("checks");
  if (root.has("tolerances")) c.tolerances = parse_tolerances(root.at("tolerances"));
  root.mark("tolerances");
  if (root.has("expect")) c.expect = root.string("expect");
  root.mark("expect");
  c.output = root.string("output", "out/" + c.id);
  root.finish();
  validate_config(c);
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read config file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["id"] = c.id;
  if (!c.description.empty()) j["description"] = c.description;
  j["backend"] = backend_json(c.backend);
  json flow{{"kind", to_string(c.flow)}};
  if (c.flow == FlowKind::ricci_harmonic) flow["alpha"] = schedule_json(c.alpha);
  j["flow"] = flow;
  json horizon{{"t_end", c.t_end}};
  if (c.steps) horizon["steps"] = *c.steps;
  j["horizon"] = horizon;
  j["tau0"] = c.tau0;
  j["terminal"] = terminal_json(c.terminal);
  j["heat"] = json{{"u0", initial_json(c.u0, c.backend.kind)},
                   {"a", schedule_json(c.a)},
                   {"positive", c.positive}};
  json fr;
  fr["h"] = h_json(c.h);
  fr["t0"] = c.t0;
  if (c.t1) fr["t1"] = *c.t1;
  fr["normalization"] = c.normalization == Normalization::harnack ? "harnack" : "kappa";
  if (c.kappa_override) fr["kappa_override"] = *c.kappa_override;
  if (c.k_bound) fr["k_bound"] = *c.k_bound;
  if (c.lambda_reference) fr["lambda_reference"] = *c.lambda_reference;
  fr["eigen_stride"] = c.eigen_stride;
  j["frequency"] = fr;
  j["checks"] = c.checks;
  j["tolerances"] = tolerances_json(c.tolerances);
  if (c.expect) j["expect"] = *c.expect;
  j["output"] = c.output;
  return j;
}

std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("GEOFLOW_SCENARIOS")) return env;
  return GEOFLOW_SCENARIO_DIR;
}

std::vector<std::string> bundled_scenarios() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(scenario_dir(), ec))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p) && std::filesystem::is_regular_file(p)) return load_config(p);
  const auto bundled = scenario_dir() / (name_or_path + ".json");
  if (std::filesystem::exists(bundled)) return load_config(bundled);
  throw Error("no config file or bundled scenario named \"" + name_or_path + "\"");
}

ManifoldState initial_state(const ScenarioConfig& c) {
  ManifoldState s;
  const auto& b = c.backend;
  switch (b.kind) {
    case Backend::sphere:
      s.geometry = SphereSpectral{b.dim, b.radius_sq, b.band_limit};
      break;
    case Backend::conformal_torus: {
      ConformalTorus ct;
      ct.n = b.n;
      ManifoldState probe{ConformalTorus{b.n, std::vector<double>(
                                                   static_cast<std::size_t>(b.n) * b.n, 0.0)},
                          0.0};
      ct.phi = sample(probe, [&](double x, double y) { return b.phi(x, y); }).samples;
      s.geometry = std::move(ct);
      break;
    }
    case Backend::warped_torus: {
      const auto n = static_cast<std::size_t>(b.n);
      WarpedTorus w;
      w.n = b.n;
      w.a.resize(n);
      w.b.resize(n);
      w.phi_map.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / b.n;
        w.a[i] = b.a(x, 0.0);
        w.b[i] = b.b(x, 0.0);
        w.phi_map[i] = b.phi_map(x, 0.0);
      }
      s.geometry = std::move(w);
      break;
    }
  }
  try {
    validate(s);
  } catch (const DomainError& e) {
    throw ConfigError("backend", e.what());
  }
  return s;
}

ScalarField initial_field(const ScenarioConfig& c, const ManifoldState& state) {
  if (state.backend() == Backend::sphere) return ScalarField::spectral(c.u0.modes);
  return sample(state, [&](double x, double y) { return c.u0.series(x, y); });
}

int resolved_steps(const ScenarioConfig& c) {
  if (c.steps) return *c.steps;
  const auto s = initial_state(c);
  if (s.backend() == Backend::sphere) return 256;
  // Leave headroom for curvature growth along the flow.
  const double rho = laplacian_spectral_bound(s);
  const int needed = static_cast<int>(std::ceil(c.t_end * rho / (0.8 * kStabilityLimit)));
  return std::max(16, needed);
}

}  // namespace geoflow
