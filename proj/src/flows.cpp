#include "geoflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geoflow/errors.hpp"

namespace geoflow {

namespace {

constexpr double kMinMetric = 1e-6;
constexpr double kExtinctionFraction = 0.05;

std::vector<double> pack(const ManifoldState& s) {
  if (s.backend() == Backend::conformal_torus) return s.conformal().phi;
  const auto& w = s.warped();
  std::vector<double> out;
  out.reserve(3 * w.a.size());
  out.insert(out.end(), w.a.begin(), w.a.end());
  out.insert(out.end(), w.b.begin(), w.b.end());
  out.insert(out.end(), w.phi_map.begin(), w.phi_map.end());
  return out;
}

ManifoldState unpack(const ManifoldState& like, const std::vector<double>& y, double t) {
  ManifoldState s;
  s.time = t;
  if (like.backend() == Backend::conformal_torus) {
    s.geometry = ConformalTorus{like.conformal().n, y};
    return s;
  }
  const auto n = static_cast<std::size_t>(like.warped().n);
  WarpedTorus w;
  w.n = like.warped().n;
  w.a.assign(y.begin(), y.begin() + static_cast<long>(n));
  w.b.assign(y.begin() + static_cast<long>(n), y.begin() + static_cast<long>(2 * n));
  w.phi_map.assign(y.begin() + static_cast<long>(2 * n), y.end());
  s.geometry = std::move(w);
  return s;
}

std::vector<double> axpy(const std::vector<double>& y, double h, const std::vector<double>& k) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

void check_healthy(const ManifoldState& s, int step) {
  auto fail = [&](const std::string& why) {
    throw DivergenceError("flow diverged at step " + std::to_string(step) + " (t = " +
                          std::to_string(s.time) + "): " + why);
  };
  if (s.backend() == Backend::conformal_torus) {
    for (double v : s.conformal().phi) {
      if (!std::isfinite(v)) fail("non-finite conformal exponent");
      if (std::exp(2.0 * v) < kMinMetric) fail("conformal factor below 1e-6");
    }
    return;
  }
  const auto& w = s.warped();
  for (std::size_t i = 0; i < w.a.size(); ++i) {
    if (!std::isfinite(w.a[i]) || !std::isfinite(w.b[i]) || !std::isfinite(w.phi_map[i]))
      fail("non-finite field value at index " + std::to_string(i));
    if (w.a[i] < kMinMetric || w.b[i] < kMinMetric)
      fail("warp factor below 1e-6 at index " + std::to_string(i));
  }
}

double sphere_radius_sq(const SphereSpectral& s0, double t) {
  return s0.radius_sq - 2.0 * (s0.dim - 1) * t;
}

Trajectory evolve_sphere(const ManifoldState& initial, FlowKind kind, const Schedule& alpha,
                         double t_end, int steps) {
  const auto& s0 = initial.sphere();
  if (sphere_radius_sq(s0, t_end) < kExtinctionFraction * s0.radius_sq)
    throw DomainError("sphere horizon reaches extinction: r²(t_end) < 0.05 r₀²");
  Trajectory traj;
  traj.kind = kind;
  traj.alpha = alpha;
  traj.t_end = t_end;
  traj.steps = steps;
  traj.dt = t_end / steps;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = k == steps ? t_end : k * traj.dt;
    SphereSpectral s = s0;
    s.radius_sq = sphere_radius_sq(s0, t);
    traj.states.push_back(ManifoldState{s, t});
  }
  return traj;
}

Trajectory integrate_grid(const ManifoldState& initial, FlowKind kind, const Schedule& alpha,
                          double t_end, int steps) {
  Trajectory traj;
  traj.kind = kind;
  traj.alpha = alpha;
  traj.t_end = t_end;
  traj.steps = steps;
  traj.dt = t_end / steps;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.rates.reserve(static_cast<std::size_t>(steps) + 1);

  const double dt = traj.dt;
  ManifoldState cur = initial;
  cur.time = 0.0;
  std::vector<double> y = pack(cur);
  for (int k = 0;; ++k) {
    check_healthy(cur, k);
    const double ratio = dt * laplacian_spectral_bound(cur) / kStabilityLimit;
    if (ratio > 1.0)
      throw StepError("time step " + std::to_string(dt) + " violates the stability bound at step " +
                      std::to_string(k) + " (ratio " + std::to_string(ratio) + ")");
    traj.cfl_ratio = std::max(traj.cfl_ratio, ratio);
    const double t = cur.time;
    auto k1 = flow_rate(cur, traj.alpha_at(t));
    traj.states.push_back(cur);
    traj.rates.push_back(k1);
    if (k == steps) break;

    const double th = t + 0.5 * dt;
    const double tn = k + 1 == steps ? t_end : (k + 1) * dt;
    auto s2 = unpack(cur, axpy(y, 0.5 * dt, k1), th);
    check_healthy(s2, k);
    auto k2 = flow_rate(s2, traj.alpha_at(th));
    auto s3 = unpack(cur, axpy(y, 0.5 * dt, k2), th);
    check_healthy(s3, k);
    auto k3 = flow_rate(s3, traj.alpha_at(th));
    auto s4 = unpack(cur, axpy(y, dt, k3), tn);
    check_healthy(s4, k);
    auto k4 = flow_rate(s4, traj.alpha_at(tn));
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    cur = unpack(cur, y, tn);
  }
  return traj;
}

Trajectory evolve(const ManifoldState& initial, FlowKind kind, const Schedule& alpha,
                  double t_end, int steps) {
  validate(initial);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
  if (steps < 1) throw DomainError("steps must be at least 1");
  if (initial.backend() == Backend::sphere)
    return evolve_sphere(initial, kind, alpha, t_end, steps);
  return integrate_grid(initial, kind, alpha, t_end, steps);
}

}  // namespace

double Schedule::operator()(double t) const { return rate == 0.0 ? c0 : c0 * std::exp(-rate * t); }

double Schedule::integral(double t0, double t1) const {
  if (rate == 0.0) return c0 * (t1 - t0);
  return c0 * (std::exp(-rate * t0) - std::exp(-rate * t1)) / rate;
}

const char* to_string(FlowKind k) {
  return k == FlowKind::ricci ? "ricci" : "ricci-harmonic";
}

std::vector<double> flow_rate(const ManifoldState& state, double alpha) {
  if (state.backend() == Backend::sphere)
    throw UnsupportedRepresentation("the sphere flow is advanced in closed form");
  if (state.backend() == Backend::conformal_torus) {
    const auto lap = laplace_beltrami(
        state, ScalarField::grid(Backend::conformal_torus, state.conformal().phi));
    return lap.samples;
  }
  const auto& w = state.warped();
  const auto n = static_cast<std::size_t>(w.n);
  const auto r = scalar_curvature(state);
  const auto lap_phi =
      laplace_beltrami(state, ScalarField::grid(Backend::warped_torus, w.phi_map));
  const double h = state.spacing();
  std::vector<double> out(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gauss = 0.5 * r.samples[i];
    const double dphi = (w.phi_map[(i + 1) % n] - w.phi_map[(i + n - 1) % n]) / (2.0 * h);
    out[i] = -gauss * w.a[i] + alpha * dphi * dphi / w.a[i];
    out[n + i] = -gauss * w.b[i];
    out[2 * n + i] = lap_phi.samples[i];
  }
  return out;
}

ManifoldState state_at_midpoint(const Trajectory& traj, int k) {
  const auto& s0 = traj.states[static_cast<std::size_t>(k)];
  const auto& s1 = traj.states[static_cast<std::size_t>(k) + 1];
  const double th = 0.5 * (s0.time + s1.time);
  if (s0.backend() == Backend::sphere) {
    SphereSpectral s = s0.sphere();
    s.radius_sq = sphere_radius_sq(traj.states.front().sphere(), th);
    return ManifoldState{s, th};
  }
  const auto y0 = pack(s0), y1 = pack(s1);
  const auto& d0 = traj.rates[static_cast<std::size_t>(k)];
  const auto& d1 = traj.rates[static_cast<std::size_t>(k) + 1];
  const double dt = s1.time - s0.time;
  std::vector<double> y(y0.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = 0.5 * (y0[i] + y1[i]) + dt / 8.0 * (d0[i] - d1[i]);
  return unpack(s0, y, th);
}

ManifoldState stage_state(const Trajectory& traj, int k, int half) {
  if (half == 0) return traj.states[static_cast<std::size_t>(k)];
  if (half == 2) return traj.states[static_cast<std::size_t>(k) + 1];
  return state_at_midpoint(traj, k);
}

Trajectory evolve_ricci(const ManifoldState& initial, double t_end, int steps) {
  return evolve(initial, FlowKind::ricci, Schedule{}, t_end, steps);
}

Trajectory evolve_ricci_harmonic(const ManifoldState& initial, const Schedule& alpha,
                                 double t_end, int steps) {
  if (initial.backend() != Backend::warped_torus)
    throw BackendMismatch("the Ricci-harmonic flow needs the warped torus backend");
  if (alpha.c0 < 0.0 || !std::isfinite(alpha.c0) || !std::isfinite(alpha.rate))
    throw DomainError("alpha must be non-negative and finite");
  return evolve(initial, FlowKind::ricci_harmonic, alpha, t_end, steps);
}

ScalarField map_energy_density(const ManifoldState& state) {
  if (state.backend() != Backend::warped_torus) return constant_field(state, 0.0);
  return gradient_norm_sq(state,
                          ScalarField::grid(Backend::warped_torus, state.warped().phi_map));
}

VolumeResidual check_volume_evolution(const Trajectory& traj) {
  if (traj.states.size() < 3) throw DomainError("volume check needs at least 3 snapshots");
  VolumeResidual res;
  const bool sphere = traj.backend() == Backend::sphere;
  auto weights = [&](const ManifoldState& s) {
    auto q = volume_weights(s);
    return sphere ? std::vector<double>{q.mass} : q.w;
  };
  for (int k = 1; k + 1 < static_cast<int>(traj.states.size()); ++k) {
    const auto& s = traj.states[static_cast<std::size_t>(k)];
    const auto prev = weights(traj.states[static_cast<std::size_t>(k) - 1]);
    const auto next = weights(traj.states[static_cast<std::size_t>(k) + 1]);
    const auto cur = weights(s);
    const double span = traj.time(k + 1) - traj.time(k - 1);
    const auto r = scalar_curvature(s);
    std::vector<double> source(cur.size());
    if (sphere) {
      source[0] = -r.mode(0);
    } else {
      const auto e = map_energy_density(s);
      const double a = traj.alpha_at(s.time);
      for (std::size_t p = 0; p < cur.size(); ++p) source[p] = -r.samples[p] + a * e.samples[p];
    }
    const double scale = *std::max_element(cur.begin(), cur.end());
    for (std::size_t p = 0; p < cur.size(); ++p) {
      const double diff = (next[p] - prev[p]) / span - source[p] * cur[p];
      const double rel = std::abs(diff) / scale;
      if (rel > res.max_relative) {
        res.max_relative = rel;
        res.worst_step = k;
      }
    }
  }
  return res;
}

}  // namespace geoflow
