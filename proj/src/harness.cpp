#include "geoflow/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "geoflow/errors.hpp"
#include "geoflow/heat.hpp"

namespace geoflow {

using json = nlohmann::ordered_json;

namespace {

// Rethrows library errors with the pipeline stage prepended.
template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

Hypothesis from_report(const std::string& name, const SlackReport& r) {
  return {name, r.pass ? "pass" : "fail"};
}

Verdict gate(const std::vector<Hypothesis>& hyps, bool ok) {
  for (const auto& h : hyps)
    if (!h.holds()) return Verdict::not_asserted;
  return ok ? Verdict::pass : Verdict::fail;
}

double grid_tolerance(const ScenarioConfig& c, int steps) {
  const double dx = 1.0 / c.backend.n;
  return 10.0 * (dx * dx + c.t_end / steps);
}

// Collects only the checks the config asked for, in catalog order.
struct CheckList {
  const ScenarioConfig& c;
  std::vector<CheckItem> items;
  bool wants(const std::string& name) const {
    return std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
  }
};

std::vector<std::pair<double, double>> series_of(const std::vector<FrequencyRecord>& recs,
                                                 double FrequencyRecord::*field) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : recs)
    if (present(r.*field)) out.emplace_back(r.t, r.*field);
  return out;
}

std::vector<std::pair<double, double>> eigen_series(const std::vector<FrequencyRecord>& recs,
                                                    const HSchedule& h, bool harnack) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : recs) {
    const double e = harnack ? r.exponent4 : r.exponent3;
    if (present(r.lambda1) && present(e)) out.emplace_back(r.t, h(r.t) * r.lambda1 * std::exp(-e));
  }
  return out;
}

CheckItem monotone_item(const std::string& name, const std::string& statement,
                        const std::vector<std::pair<double, double>>& series, Direction dir,
                        double tol, std::vector<Hypothesis> hyps) {
  CheckItem item;
  if (series.size() >= 2) {
    item = verify_monotone(series, dir, tol);
  } else {
    item.detail = "fewer than two samples";
    item.tolerance = tol;
  }
  const bool ok = series.size() >= 2 && item.verdict == Verdict::pass;
  item.name = name;
  item.statement = statement;
  item.hypotheses = std::move(hyps);
  item.verdict = gate(item.hypotheses, ok);
  return item;
}

CheckItem bound_item(const std::string& name, const std::string& statement, double worst,
                     double tol, std::vector<Hypothesis> hyps, std::string detail = {}) {
  CheckItem item;
  item.name = name;
  item.statement = statement;
  item.worst_slack = worst;
  item.tolerance = tol;
  item.hypotheses = std::move(hyps);
  item.detail = std::move(detail);
  item.verdict = gate(item.hypotheses, std::isfinite(worst) && worst >= -tol);
  return item;
}

struct Pipeline {
  ManifoldState state0;
  int steps = 0;
  Trajectory traj;
  WeightSystem ws;
  HeatSolution heat;
};

Pipeline solve_pipeline(const ScenarioConfig& c, int steps) {
  Pipeline p;
  p.steps = steps;
  p.state0 = stage("setup", [&] { return initial_state(c); });
  p.traj = stage("flow", [&] {
    return c.flow == FlowKind::ricci_harmonic
               ? evolve_ricci_harmonic(p.state0, c.alpha, c.t_end, steps)
               : evolve_ricci(p.state0, c.t_end, steps);
  });
  p.ws = stage("conjugate-heat", [&] {
    return solve_conjugate_backward(p.traj, terminal_density(p.traj.states.back(), c.terminal),
                                    c.tau0);
  });
  p.heat = stage("heat", [&] {
    return solve_heat(p.traj, initial_field(c, p.state0), c.a, c.positive);
  });
  return p;
}

// Snapshots inside [t0, t1]; the effective endpoints are snapshot times.
struct Window {
  std::vector<std::size_t> index;
  double t0 = 0.0, t1 = 0.0;
  HSchedule h;
};

Window frequency_window(const ScenarioConfig& c, const Pipeline& p) {
  Window w;
  const double eps = 1e-9 * p.traj.dt;
  for (std::size_t k = 0; k < p.traj.states.size(); ++k) {
    const double t = p.traj.states[k].time;
    if (t >= c.t0 - eps && t <= c.interval_end() + eps) w.index.push_back(k);
  }
  if (w.index.size() < 2) throw Error("frequency: fewer than two snapshots in [t0, t1]");
  w.t0 = p.traj.states[w.index.front()].time;
  w.t1 = p.traj.states[w.index.back()].time;
  w.h = c.h;
  if (w.h.kind == HKind::backwards_time) w.h.T = p.ws.T;
  stage("frequency", [&] {
    w.h.validate(w.t0, w.t1);
    return 0;
  });
  return w;
}

std::size_t auto_eigen_stride(const ManifoldState& s, std::size_t count) {
  if (s.backend() == Backend::sphere) return 1;
  const std::size_t budget = s.samples() <= 1024 ? 128 : 16;
  return std::max<std::size_t>(1, (count + budget - 1) / budget);
}

// Records with I, D, s, κ, optional λ₁ and the κ normalization applied.
std::vector<FrequencyRecord> build_records(const ScenarioConfig& c, const Pipeline& p,
                                           const Window& win, bool want_eigen) {
  const auto& traj = p.traj;
  const bool rhf = c.flow == FlowKind::ricci_harmonic;
  const std::size_t stride = c.eigen_stride > 0 ? static_cast<std::size_t>(c.eigen_stride)
                                                : auto_eigen_stride(p.state0, win.index.size());
  return stage("frequency", [&] {
    std::vector<FrequencyRecord> records;
    records.reserve(win.index.size());
    for (std::size_t i = 0; i < win.index.size(); ++i) {
      const std::size_t k = win.index[i];
      const auto& s = traj.states[k];
      const auto& w = p.ws.snaps[k];
      FrequencyRecord r;
      r.t = s.time;
      const auto id = compute_I_D(s, w, p.heat.u[k], win.h(r.t));
      r.I = id.I;
      r.D = id.D;
      r.s = bakry_emery_bound(s, w.f, traj.alpha_at(r.t), rhf).s;
      r.kappa = c.kappa_override ? *c.kappa_override : choose_kappa(r.s, win.h(r.t));
      if (want_eigen && (i % stride == 0 || i + 1 == win.index.size()))
        r.lambda1 = first_eigenvalue(s, w);
      records.push_back(r);
    }
    std::function<double(double)> exact;
    if (p.state0.backend() == Backend::sphere && !c.kappa_override) {
      // κ/h = 2s = 2(n-1)/r²(t) and r² is affine in t.
      const auto s0 = p.state0.sphere();
      const double r0 = s0.radius_sq - 2.0 * (s0.dim - 1) * win.t0;
      exact = [s0, r0](double t) {
        return -std::log((s0.radius_sq - 2.0 * (s0.dim - 1) * t) / r0);
      };
    }
    normalize_frequency_kappa(records, win.h, win.t0, exact);
    return records;
  });
}

double max_reduction_difference(const ManifoldState& initial, double t_end, int steps) {
  const auto rf = evolve_ricci(initial, t_end, steps);
  const auto rhf = evolve_ricci_harmonic(initial, Schedule{0.0, 0.0}, t_end, steps);
  double worst = 0.0;
  for (std::size_t k = 0; k < rf.states.size(); ++k) {
    const auto& a = rf.states[k].warped();
    const auto& b = rhf.states[k].warped();
    for (std::size_t i = 0; i < a.a.size(); ++i) {
      worst = std::max(worst, std::abs(a.a[i] - b.a[i]));
      worst = std::max(worst, std::abs(a.b[i] - b.b[i]));
      worst = std::max(worst, std::abs(a.phi_map[i] - b.phi_map[i]));
    }
  }
  return worst;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_asserted:
      return "not-asserted";
  }
  return "unknown";
}

CheckItem verify_monotone(const std::vector<std::pair<double, double>>& series, Direction dir,
                          double tol) {
  if (series.empty()) throw DomainError("verify_monotone needs a non-empty series");
  CheckItem item;
  item.tolerance = tol;
  item.worst_slack = series.size() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  const double sign = dir == Direction::nondecreasing ? 1.0 : -1.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double step = sign * (series[k].second - series[k - 1].second);
    item.worst_slack = std::min(item.worst_slack, step);
    if (step < -tol && item.index < 0) item.index = static_cast<int>(k);
  }
  item.verdict = item.index < 0 ? Verdict::pass : Verdict::fail;
  if (item.index >= 0)
    item.detail = "direction violated at index " + std::to_string(item.index) + " (t = " +
                  std::to_string(series[static_cast<std::size_t>(item.index)].first) + ")";
  return item;
}

bool Report::all_pass() const {
  return std::none_of(items.begin(), items.end(),
                      [](const CheckItem& i) { return i.verdict == Verdict::fail; });
}

const CheckItem* Report::find(const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return &i;
  return nullptr;
}

double monotone_tolerance(const ScenarioConfig& c) {
  if (c.tolerances.monotone) return *c.tolerances.monotone;
  if (c.backend.kind == Backend::sphere) return 1e-10;
  return grid_tolerance(c, resolved_steps(c));
}

ScenarioResult run_scenario(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult result;
  auto& report = result.report;
  report.id = c.id;
  report.config = to_json(c);

  const auto p = solve_pipeline(c, resolved_steps(c));
  const auto& state0 = p.state0;
  const auto& traj = p.traj;
  const auto& ws = p.ws;
  const auto& heat = p.heat;
  const int steps = p.steps;
  const bool sphere = state0.backend() == Backend::sphere;
  const bool rhf = c.flow == FlowKind::ricci_harmonic;
  const int dim = traj.dimension();

  const auto win = frequency_window(c, p);
  const auto& window = win.index;
  const double t0 = win.t0;
  const double t1 = win.t1;
  const HSchedule& h = win.h;

  const bool want_eigen =
      c.lambda_reference.has_value() ||
      std::any_of(c.checks.begin(), c.checks.end(), [](const std::string& s) {
        return s == "eigenvalue-monotone" || s == "harnack-eigenvalue-monotone" ||
               s == "eigenvalue-reference";
      });
  auto& records = result.records;
  records = build_records(c, p, win, want_eigen);

  // Harnack normalization and pointwise estimate data.
  double k_bound = kAbsent, c_dphi = 0.0;
  if (c.positive) {
    k_bound = c.k_bound ? *c.k_bound : std::max(measure_ricci_sup(traj, 0.0, t1), 1e-9);
    c_dphi = rhf ? measure_dphi_constant(traj, t1) : 0.0;
    stage("frequency", [&] {
      normalize_frequency_harnack(records, h, k_bound, dim, heat.bounds.A, heat.bounds.eta, t0);
      return 0;
    });
  }
  const double leading = rhf ? 0.5 * dim + 4.0 * dim * c_dphi * traj.alpha_at(0.0) : dim;

  std::vector<double> ham, ly;
  if (c.positive) {
    stage("estimates", [&] {
      ham = hamilton_slack_series(traj, heat, heat.bounds.A);
      ly = li_yau_slack_series(traj, heat, k_bound, dim, leading);
      return 0;
    });
  }
  for (std::size_t i = 0; i < window.size(); ++i) {
    const auto& r = records[i];
    SeriesRow row;
    row.t = r.t;
    row.I = r.I;
    row.D = r.D;
    row.U3 = r.U3;
    row.U4 = r.U4;
    row.kappa = r.kappa;
    row.s = r.s;
    row.lambda1 = r.lambda1;
    if (c.positive) {
      row.slack_hamilton = ham[window[i]];
      row.slack_liyau = ly[window[i]];
    }
    result.rows.push_back(row);
  }

  // Hypotheses.
  const double band_tol = 1e-12 * std::max(1.0, std::abs(present(k_bound) ? k_bound : 1.0));
  BandParams bp;
  bp.t0 = 0.0;
  bp.t1 = t1;
  bp.tol = band_tol;
  bp.records = &records;
  bp.h = h;
  auto ricf = hypothesis_band_check(traj, ws, BandKind::ricf_upper, bp);
  Hypothesis ricf_h = from_report("ricf-upper", ricf);
  if (c.kappa_override) ricf_h.status = "assumed";

  std::vector<Hypothesis> harnack_hyps;
  json band_json = json::object();
  band_json["ricf-upper"] = {{"worst", ricf.worst}, {"pass", ricf.pass}};
  if (c.positive) {
    bp.k_bound = k_bound;
    bp.c_dphi = c_dphi;
    harnack_hyps.push_back({"positive-solution", heat.bounds.eta > 0.0 ? "pass" : "fail"});
    harnack_hyps.push_back({"heat-equation", c.a.is_zero() ? "pass" : "fail"});
    const auto ric = hypothesis_band_check(traj, ws, BandKind::ric_nonneg_upper, bp);
    harnack_hyps.push_back(from_report("ric-nonneg-upper", ric));
    band_json["ric-nonneg-upper"] = {{"worst", ric.worst}, {"pass", ric.pass}, {"note", ric.note}};
    if (rhf) {
      const auto dphi = hypothesis_band_check(traj, ws, BandKind::dphi_band, bp);
      const auto mono = hypothesis_band_check(traj, ws, BandKind::alpha_monotone, bp);
      harnack_hyps.push_back(from_report("dphi-band", dphi));
      harnack_hyps.push_back(from_report("alpha-monotone", mono));
      band_json["dphi-band"] = {{"worst", dphi.worst}, {"pass", dphi.pass}, {"note", dphi.note}};
      band_json["alpha-monotone"] = {{"worst", mono.worst}, {"pass", mono.pass}};
    }
  }

  const int hsign = h.sign(t0);
  const Direction dir = hsign < 0 ? Direction::nondecreasing : Direction::nonincreasing;
  const double mono_tol = monotone_tolerance(c);
  const double const_tol =
      c.tolerances.constant.value_or(sphere ? 1e-10 : 1e-8);
  const double mass_tol = c.tolerances.mass.value_or(sphere ? 1e-10 : 1e-6);
  const double vol_tol = c.tolerances.volume.value_or(sphere ? 1e-10 : grid_tolerance(c, steps));
  const std::string flow_name = rhf ? "Ricci-harmonic flow" : "Ricci flow";
  const std::string dir_name = dir == Direction::nondecreasing ? "nondecreasing" : "nonincreasing";

  CheckList list{c, {}};
  auto& items = list.items;
  for (const auto& name : known_checks()) {
    if (!list.wants(name)) continue;
    stage(name.c_str(), [&] {
      if (name == "mass") {
        items.push_back(bound_item(name, "conjugate heat measure keeps unit mass",
                                   -ws.max_mass_drift, mass_tol, {}));
      } else if (name == "frequency-monotone") {
        items.push_back(monotone_item(
            name, "frequency with kappa normalization is " + dir_name + " along the " + flow_name,
            series_of(records, &FrequencyRecord::U3), dir, mono_tol, {ricf_h}));
      } else if (name == "frequency-constant") {
        const auto ser = series_of(records, c.normalization == Normalization::harnack ? &FrequencyRecord::U4
                                                           : &FrequencyRecord::U3);
        double dev = 0.0;
        for (const auto& [t, u] : ser) dev = std::max(dev, std::abs(u - ser.front().second));
        std::vector<Hypothesis> hyps = c.normalization == Normalization::harnack ? harnack_hyps : std::vector{ricf_h};
        items.push_back(bound_item(name, "frequency is constant (equality case)", -dev, const_tol,
                                   hyps, ser.empty() ? "no samples" : ""));
      } else if (name == "harnack-frequency-monotone") {
        if (!c.positive) throw HypothesisError("needs a positive heat solution");
        items.push_back(monotone_item(
            name, "frequency with Harnack normalization is " + dir_name + " along the " + flow_name,
            series_of(records, &FrequencyRecord::U4), dir, mono_tol, harnack_hyps));
      } else if (name == "eigenvalue-monotone") {
        items.push_back(monotone_item(name,
                                      "normalized h*lambda1 is " + dir_name + " along the " +
                                          flow_name,
                                      eigen_series(records, h, false), dir, mono_tol, {ricf_h}));
      } else if (name == "harnack-eigenvalue-monotone") {
        if (!c.positive) throw HypothesisError("needs a positive heat solution");
        items.push_back(monotone_item(
            name, "Harnack-normalized h*lambda1 is " + dir_name + " along the " + flow_name,
            eigen_series(records, h, true), dir, mono_tol, harnack_hyps));
      } else if (name == "ratio-bound" || name == "ratio-equality") {
        const auto rb = ratio_lower_bound(records, h, c.a, t0, t1);
        std::vector<Hypothesis> hyps{ricf_h, {"h-negative", hsign < 0 ? "pass" : "fail"}};
        const std::string detail = "actual " + std::to_string(rb.actual) + ", bound " +
                                   std::to_string(rb.bound);
        if (name == "ratio-bound")
          items.push_back(bound_item(name, "I(t1)/I(t') stays above the backward uniqueness bound",
                                     rb.actual - rb.bound, c.tolerances.ratio, hyps, detail));
        else
          items.push_back(bound_item(name, "I(t1)/I(t') equals the backward uniqueness bound",
                                     -std::abs(rb.actual - rb.bound), c.tolerances.ratio, hyps,
                                     detail));
      } else if (name == "hamilton-estimate") {
        if (!c.positive) throw HypothesisError("needs a positive heat solution");
        const auto r = hamilton_gradient_check(traj, heat, heat.bounds.A, t1, c.tolerances.estimate);
        std::vector<Hypothesis> hyps{harnack_hyps[0], harnack_hyps[1]};
        if (rhf)
          hyps.push_back({"alpha-positive", traj.alpha_at(t1) > 0.0 ? "pass" : "fail"});
        items.push_back(bound_item(name, "t|grad u|^2 <= u^2 log(A/u)", r.worst,
                                   c.tolerances.estimate, hyps,
                                   "worst at t = " + std::to_string(r.t_worst)));
      } else if (name == "li-yau-estimate") {
        if (!c.positive) throw HypothesisError("needs a positive heat solution");
        const auto r = li_yau_check(traj, heat, k_bound, dim,
                                    rhf ? LiYauVariant::ricci_harmonic : LiYauVariant::ricci,
                                    c_dphi, t1, c.tolerances.estimate);
        items.push_back(bound_item(name, "|grad u|^2/u - u_t <= (c/2t) u + K n u", r.worst,
                                   c.tolerances.estimate, harnack_hyps,
                                   r.note + ", worst at t = " + std::to_string(r.t_worst)));
      } else if (name == "volume-evolution") {
        const auto v = check_volume_evolution(traj);
        items.push_back(bound_item(name, "volume form evolves by (-R + alpha|grad phi|^2)",
                                   -v.max_relative, vol_tol, {}));
      } else if (name == "eigenvalue-reference") {
        if (!c.lambda_reference) throw HypothesisError("needs frequency.lambda_reference");
        double worst = 0.0;
        for (const auto& r : records)
          if (present(r.lambda1))
            worst = std::max(worst, std::abs(r.lambda1 - *c.lambda_reference) /
                                        std::abs(*c.lambda_reference));
        items.push_back(bound_item(name, "first drift eigenvalue matches the reference value",
                                   -worst, c.tolerances.eigen_relative, {}));
      } else if (name == "alpha-zero-reduction") {
        if (state0.backend() != Backend::warped_torus)
          throw HypothesisError("needs the warped-torus backend");
        const double diff = max_reduction_difference(state0, c.t_end, steps);
        items.push_back(bound_item(name, "alpha = 0 Ricci-harmonic flow reproduces Ricci flow",
                                   -diff, c.tolerances.reduction, {}));
      }
      return 0;
    });
  }
  report.items = std::move(items);

  auto& d = report.diagnostics;
  d["backend"] = to_string(state0.backend());
  d["flow"] = to_string(traj.kind);
  d["steps"] = steps;
  d["dt"] = traj.dt;
  d["cfl_ratio"] = traj.cfl_ratio;
  d["T"] = ws.T;
  d["t0"] = t0;
  d["t1"] = t1;
  d["max_mass_drift"] = ws.max_mass_drift;
  if (traj.states.size() >= 3) d["f_residual"] = potential_residual(traj, ws).max_abs;
  if (c.positive) {
    d["A"] = heat.bounds.A;
    d["eta"] = heat.bounds.eta;
    d["N"] = std::log(heat.bounds.A / heat.bounds.eta);
    d["k_bound"] = k_bound;
    if (rhf) d["c_dphi"] = c_dphi;
    d["li_yau_leading"] = leading;
  }
  if (!sphere) {
    const auto gb = gauss_bonnet(traj.states.front());
    d["gauss_bonnet"] = {{"total_curvature", gb.total},
                         {"min_gauss", gb.min_gauss},
                         {"max_gauss", gb.max_gauss}};
  }
  d["hypotheses"] = band_json;
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

double curvature_error(const ScenarioConfig& c, const ManifoldState& s) {
  const auto R = scalar_curvature(s);
  double worst = 0.0;
  if (s.backend() == Backend::sphere) {
    const auto& sp = s.sphere();
    const double exact = sp.dim * (sp.dim - 1) / sp.radius_sq;
    for (const auto& m : R.modes)
      worst = std::max(worst, std::abs(m.coeff - (m.degree == 0 ? exact : 0.0)));
    return worst;
  }
  const int n = s.resolution();
  const double dx = 1.0 / n;
  if (s.backend() == Backend::conformal_torus) {
    const auto& phi = c.backend.phi;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = i * dx, y = j * dx;
        const double exact = -2.0 * std::exp(-2.0 * phi(x, y)) * phi.flat_laplacian(x, y);
        worst = std::max(worst, std::abs(R.samples[j * n + i] - exact));
      }
    return worst;
  }
  // Warped: R = 2K with K = -(b'/a)'/(ab).
  const auto& A = c.backend.a;
  const auto& B = c.backend.b;
  for (int i = 0; i < n; ++i) {
    const double x = i * dx;
    const double a = A(x, 0.0), b = B(x, 0.0);
    const double k = -B.flat_laplacian(x, 0.0) / (a * a * b) + A.dx(x, 0.0) * B.dx(x, 0.0) / (a * a * a * b);
    worst = std::max(worst, std::abs(R.samples[i] - 2.0 * k));
  }
  return worst;
}

// Static flat metric with a closed-form heat solution, if the config has one.
bool heat_closed_form_available(const ScenarioConfig& c) {
  const auto& b = c.backend;
  if (b.kind == Backend::sphere) return true;
  if (b.kind == Backend::conformal_torus) return b.phi.terms.empty();
  const bool static_map = c.flow == FlowKind::ricci || b.phi_map.terms.empty() || c.alpha.is_zero();
  const bool x_only = std::all_of(c.u0.series.terms.begin(), c.u0.series.terms.end(),
                                  [](const TrigTerm& t) { return t.ky == 0; });
  return b.a.terms.empty() && b.b.terms.empty() && static_map && x_only;
}

double flat_heat_error(const ScenarioConfig& c, const Pipeline& p) {
  const auto& s = p.traj.states.back();
  const auto& u = p.heat.u.back();
  const double t = s.time;
  const double growth = std::exp(c.a.integral(0.0, t));
  if (s.backend() == Backend::sphere) {
    const auto& sp = p.state0.sphere();
    const auto exact = closed_form_sphere_solution(sp.dim, sp.radius_sq, c.u0.modes, c.a, t);
    double worst = 0.0;
    for (const auto& m : exact) worst = std::max(worst, std::abs(u.mode(m.degree) - m.coeff));
    return worst;
  }
  double sx = 1.0, sy = 1.0;  // inverse squared metric scale per axis
  if (s.backend() == Backend::conformal_torus) {
    sx = sy = std::exp(-2.0 * c.backend.phi.constant);
  } else {
    sx = 1.0 / (c.backend.a.constant * c.backend.a.constant);
    sy = 1.0 / (c.backend.b.constant * c.backend.b.constant);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  TrigSeries decayed = c.u0.series;
  for (auto& term : decayed.terms)
    term.amp *= std::exp(-two_pi * two_pi * (term.kx * term.kx * sx + term.ky * term.ky * sy) * t);
  const auto exact = sample(s, [&](double x, double y) { return growth * decayed(x, y); });
  double worst = 0.0;
  for (std::size_t i = 0; i < u.samples.size(); ++i)
    worst = std::max(worst, std::abs(u.samples[i] - exact.samples[i]));
  return worst;
}

// max |coarse - fine| at the shared grid points (fine index 2i, 2j).
double coarse_fine_difference(const ManifoldState& coarse, const ScalarField& uc,
                              const ScalarField& uf) {
  const int n = coarse.resolution();
  double worst = 0.0;
  if (coarse.backend() == Backend::warped_torus) {
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(uc.samples[i] - uf.samples[2 * i]));
    return worst;
  }
  const int nf = 2 * n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(uc.samples[j * n + i] - uf.samples[(2 * j) * nf + 2 * i]));
  return worst;
}

std::vector<double> observed_orders(const std::vector<double>& e) {
  std::vector<double> out;
  for (std::size_t l = 0; l + 1 < e.size(); ++l) {
    if (present(e[l]) && present(e[l + 1]) && e[l] > 0.0 && e[l + 1] > 0.0)
      out.push_back(std::log2(e[l] / e[l + 1]));
    else
      out.push_back(kAbsent);
  }
  return out;
}

}  // namespace

RefinementResult refinement_study(const ScenarioConfig& config, int levels) {
  if (levels < 3) throw DomainError("refinement_study needs at least three levels");
  const bool sphere = config.backend.kind == Backend::sphere;
  if (!sphere && config.backend.n * (1 << (levels - 1)) > 1024)
    throw DomainError("refinement_study: finest grid exceeds 1024 points per axis");
  RefinementResult out;
  out.exact = sphere;
  out.heat_closed_form = heat_closed_form_available(config);

  const int steps0 = resolved_steps(config);
  std::vector<Pipeline> runs;
  for (int l = 0; l < levels; ++l) {
    ScenarioConfig c = config;
    const int scale = 1 << l;
    if (!sphere) c.backend.n = config.backend.n * scale;
    c.steps = steps0 * scale * scale;
    auto p = solve_pipeline(c, *c.steps);
    RefinementLevel lvl;
    lvl.n = sphere ? 0 : c.backend.n;
    lvl.steps = *c.steps;
    lvl.curvature_error = curvature_error(c, p.state0);
    lvl.heat_error = out.heat_closed_form ? flat_heat_error(c, p) : kAbsent;
    if (!sphere) lvl.bochner_defect = bochner_defect(p.state0, p.ws.snaps[0].K, p.heat.u[0]).relative;
    lvl.f_residual = potential_residual(p.traj, p.ws).max_abs;
    lvl.volume_residual = check_volume_evolution(p.traj).max_relative;
    const auto win = frequency_window(c, p);
    lvl.U_end = build_records(c, p, win, false).back().U3;
    out.levels.push_back(lvl);
    // Keep only the final fields needed for the coarse/fine comparisons.
    p.traj.states.erase(p.traj.states.begin(), p.traj.states.end() - 1);
    p.heat.u.erase(p.heat.u.begin(), p.heat.u.end() - 1);
    p.ws.snaps.clear();
    p.traj.rates.clear();
    runs.push_back(std::move(p));
  }
  if (!out.heat_closed_form) {
    for (int l = 0; l + 1 < levels; ++l)
      out.levels[l].heat_error = coarse_fine_difference(runs[l].traj.states.back(),
                                                        runs[l].heat.u.back(),
                                                        runs[l + 1].heat.u.back());
  }

  auto collect = [&](double RefinementLevel::*field) {
    std::vector<double> e;
    for (const auto& lvl : out.levels) e.push_back(lvl.*field);
    return e;
  };
  std::vector<double> u_diff;
  for (int l = 0; l + 1 < levels; ++l)
    u_diff.push_back(std::abs(out.levels[l].U_end - out.levels[l + 1].U_end));

  const std::vector<std::pair<std::string, std::vector<double>>> series{
      {"curvature", collect(&RefinementLevel::curvature_error)},
      {"heat", collect(&RefinementLevel::heat_error)},
      {"bochner", collect(&RefinementLevel::bochner_defect)},
      {"f_residual", collect(&RefinementLevel::f_residual)},
      {"volume", collect(&RefinementLevel::volume_residual)},
      {"U", u_diff}};
  for (const auto& [name, e] : series) {
    if (sphere) continue;
    auto orders = observed_orders(e);
    std::erase_if(orders, [](double o) { return !present(o); });
    if (orders.empty()) continue;
    out.orders[name] = orders.back();
    out.all_orders[name] = orders;
  }
  return out;
}

json to_json(const Report& r) {
  json j;
  j["id"] = r.id;
  j["verdict"] = r.all_pass() ? "pass" : "fail";
  json items = json::array();
  for (const auto& i : r.items) {
    json item;
    item["name"] = i.name;
    item["statement"] = i.statement;
    item["verdict"] = to_string(i.verdict);
    item["worst_slack"] = i.worst_slack;
    item["tolerance"] = i.tolerance;
    json hyps = json::array();
    for (const auto& h : i.hypotheses) hyps.push_back({{"name", h.name}, {"status", h.status}});
    item["hypotheses"] = hyps;
    if (!i.detail.empty()) item["detail"] = i.detail;
    items.push_back(item);
  }
  j["checks"] = items;
  j["runtime_seconds"] = r.runtime_seconds;
  j["diagnostics"] = r.diagnostics;
  j["config"] = r.config;
  return j;
}

}  // namespace geoflow
