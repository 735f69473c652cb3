#include "geoflow/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geoflow/errors.hpp"
#include "geoflow/kernels.hpp"

namespace geoflow {

namespace {

constexpr double kPi = std::numbers::pi;

double periodic_gaussian(double x, double c, double width) {
  double acc = 0.0;
  for (int image = -2; image <= 2; ++image) {
    const double d = x - c + image;
    acc += std::exp(-0.5 * d * d / (width * width));
  }
  return acc;
}

double total_mass(const std::vector<double>& m) {
  return kernels::weighted_sum(m, std::vector<double>(m.size(), 1.0));
}

// dm/dt = -div(c, m/vol) on one stage geometry.
std::vector<double> density_rate(const ManifoldState& s, const std::vector<double>& m) {
  const auto vol = detail::cell_volume(s);
  const auto c = detail::edge_coefficients(s);
  std::vector<double> k(m.size()), out(m.size());
  for (std::size_t p = 0; p < m.size(); ++p) k[p] = m[p] / vol[p];
  detail::apply_divergence(s, c, k, out);
  for (auto& x : out) x = -x;
  return out;
}

WeightSnapshot make_snapshot(const ManifoldState& s, double T, std::vector<double> m) {
  WeightSnapshot w;
  w.t = s.time;
  w.tau = T - s.time;
  const auto vol = detail::cell_volume(s);
  std::vector<double> K(m.size());
  for (std::size_t p = 0; p < m.size(); ++p) K[p] = m[p] / vol[p];
  w.K = ScalarField::grid(s.backend(), std::move(K));
  w.f = potential_from_density(w.K, w.tau, s.dimension());
  w.dV.backend = s.backend();
  w.dV.mass = total_mass(m);
  w.dV.w = std::move(m);
  return w;
}

void require_positive(const std::vector<double>& m, double t) {
  for (std::size_t p = 0; p < m.size(); ++p)
    if (!(m[p] > 0.0))
      throw PositivityError("conjugate heat density lost positivity at t = " + std::to_string(t) +
                            ", point " + std::to_string(p) + "; refine the grid");
}

}  // namespace

ScalarField terminal_density(const ManifoldState& state, const TerminalSpec& spec) {
  if (state.backend() == Backend::sphere) {
    if (spec.kind != TerminalKind::uniform)
      throw UnsupportedRepresentation("the sphere supports only uniform terminal data");
    return ScalarField::spectral(
        {{0, 1.0 / sphere_volume(state.sphere().dim, state.sphere().radius_sq)}});
  }
  if (!(spec.width > 0.0)) throw DomainError("terminal bump width must be positive");
  ScalarField K;
  if (spec.kind == TerminalKind::uniform) {
    K = constant_field(state, 1.0);
  } else {
    const bool two_d = state.backend() == Backend::conformal_torus;
    K = sample(state, [&](double x, double y) {
      const double gx = periodic_gaussian(x, spec.center_x, spec.width);
      return two_d ? gx * periodic_gaussian(y, spec.center_y, spec.width) : gx;
    });
  }
  const double mass = integrate(state, K, volume_weights(state));
  for (auto& v : K.samples) v /= mass;
  return K;
}

ScalarField potential_from_density(const ScalarField& K, double tau, int dim) {
  const double shift = 0.5 * dim * std::log(4.0 * kPi * tau);
  if (K.backend == Backend::sphere) {
    for (const auto& m : K.modes)
      if (m.degree != 0 && m.coeff != 0.0)
        throw UnsupportedRepresentation("sphere potentials need a uniform density");
    return ScalarField::spectral({{0, -std::log(K.mode(0)) - shift}});
  }
  std::vector<double> f(K.samples.size());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = -std::log(K.samples[p]) - shift;
  return ScalarField::grid(K.backend, std::move(f));
}

WeightSystem solve_conjugate_backward(const Trajectory& traj, const ScalarField& terminal,
                                      double tau0) {
  if (!(tau0 > 0.0)) throw DomainError("tau0 must be positive");
  if (traj.states.empty()) throw DomainError("empty trajectory");
  const auto& last = traj.states.back();
  check_field(last, terminal);
  WeightSystem ws;
  ws.tau0 = tau0;
  ws.T = traj.t_end + tau0;
  const int dim = traj.dimension();
  const std::size_t count = traj.states.size();
  ws.snaps.resize(count);

  if (traj.backend() == Backend::sphere) {
    for (const auto& m : terminal.modes)
      if (m.degree != 0 && m.coeff != 0.0)
        throw UnsupportedRepresentation("the sphere supports only uniform terminal data");
    // A spatially constant K solves dK/dt = R K; with ∫K dμ = 1 it is 1/Vol(t).
    for (std::size_t k = 0; k < count; ++k) {
      const auto& s = traj.states[k];
      const double vol = sphere_volume(s.sphere().dim, s.sphere().radius_sq);
      auto& w = ws.snaps[k];
      w.t = s.time;
      w.tau = ws.T - s.time;
      w.K = ScalarField::spectral({{0, 1.0 / vol}});
      w.f = potential_from_density(w.K, w.tau, dim);
      w.dV.backend = Backend::sphere;
      w.dV.mass = w.K.mode(0) * vol;
      ws.max_mass_drift = std::max(ws.max_mass_drift, std::abs(w.dV.mass - 1.0));
    }
    return ws;
  }

  for (const auto& v : terminal.samples)
    if (!(v > 0.0)) throw PositivityError("terminal density must be strictly positive");
  std::vector<double> m(terminal.samples.size());
  {
    const auto vol = detail::cell_volume(last);
    for (std::size_t p = 0; p < m.size(); ++p) m[p] = terminal.samples[p] * vol[p];
    const double mass = total_mass(m);
    for (auto& x : m) x /= mass;
  }
  ws.snaps[count - 1] = make_snapshot(last, ws.T, m);

  for (int k = static_cast<int>(count) - 2; k >= 0; --k) {
    const auto& s0 = traj.states[static_cast<std::size_t>(k)];
    const auto& s1 = traj.states[static_cast<std::size_t>(k) + 1];
    const double dt = s1.time - s0.time;
    if (dt * laplacian_spectral_bound(s0) > kStabilityLimit)
      throw StepError("trajectory too coarse for the backward solve at step " + std::to_string(k));
    const auto mid = state_at_midpoint(traj, k);
    const auto k1 = density_rate(s1, m);
    std::vector<double> y(m.size());
    for (std::size_t p = 0; p < m.size(); ++p) y[p] = m[p] - 0.5 * dt * k1[p];
    const auto k2 = density_rate(mid, y);
    for (std::size_t p = 0; p < m.size(); ++p) y[p] = m[p] - 0.5 * dt * k2[p];
    const auto k3 = density_rate(mid, y);
    for (std::size_t p = 0; p < m.size(); ++p) y[p] = m[p] - dt * k3[p];
    const auto k4 = density_rate(s0, y);
    for (std::size_t p = 0; p < m.size(); ++p)
      m[p] -= dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
    require_positive(m, s0.time);
    ws.snaps[static_cast<std::size_t>(k)] = make_snapshot(s0, ws.T, m);
  }
  for (const auto& w : ws.snaps)
    ws.max_mass_drift = std::max(ws.max_mass_drift, std::abs(w.dV.mass - 1.0));
  return ws;
}

PotentialResidual potential_residual(const Trajectory& traj, const WeightSystem& ws) {
  const std::size_t count = traj.states.size();
  if (count < 3 || ws.snaps.size() != count)
    throw DomainError("potential residual needs aligned snapshots (at least 3)");
  PotentialResidual res;
  res.per_step.assign(count, 0.0);
  const int dim = traj.dimension();
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const auto& s = traj.states[k];
    const auto& w = ws.snaps[k];
    const double span = ws.snaps[k + 1].t - ws.snaps[k - 1].t;
    const double alpha = traj.alpha_at(s.time);
    const auto r = scalar_curvature(s);
    double worst = 0.0;
    if (s.backend() == Backend::sphere) {
      const double dfdt = (ws.snaps[k + 1].f.mode(0) - ws.snaps[k - 1].f.mode(0)) / span;
      const double rhs = -r.mode(0) + 0.5 * dim / w.tau;
      worst = std::abs(dfdt - rhs);
    } else {
      const auto lap = laplace_beltrami(s, w.f);
      const auto grad = gradient_norm_sq(s, w.f);
      const auto e = map_energy_density(s);
      const auto& fp = ws.snaps[k + 1].f.samples;
      const auto& fm = ws.snaps[k - 1].f.samples;
      for (std::size_t p = 0; p < fp.size(); ++p) {
        const double dfdt = (fp[p] - fm[p]) / span;
        const double rhs = -lap.samples[p] - r.samples[p] + grad.samples[p] + 0.5 * dim / w.tau +
                           alpha * e.samples[p];
        worst = std::max(worst, std::abs(dfdt - rhs));
      }
    }
    res.per_step[k] = worst;
    if (worst > res.max_abs) {
      res.max_abs = worst;
      res.worst_step = static_cast<int>(k);
    }
  }
  return res;
}

ScalarField drift_laplacian_density(const ManifoldState& state, const ScalarField& K,
                                    const ScalarField& u) {
  check_field(state, K);
  check_field(state, u);
  if (state.backend() == Backend::sphere) {
    for (const auto& m : K.modes)
      if (m.degree != 0 && m.coeff != 0.0)
        throw UnsupportedRepresentation("sphere drift Laplacian needs a uniform density");
    return laplace_beltrami(state, u);
  }
  const auto c = detail::edge_coefficients(state, std::span<const double>(K.samples));
  const auto vol = detail::cell_volume(state);
  std::vector<double> out(u.samples.size());
  detail::apply_divergence(state, c, u.samples, out);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] /= K.samples[p] * vol[p];
  return ScalarField::grid(state.backend(), std::move(out));
}

ScalarField drift_laplacian(const ManifoldState& state, const ScalarField& f,
                            const ScalarField& u) {
  check_field(state, f);
  if (state.backend() == Backend::sphere) return drift_laplacian_density(state, f, u);
  // Only ratios of K enter the operator, so e^{-f} suffices.
  std::vector<double> K(f.samples.size());
  for (std::size_t p = 0; p < K.size(); ++p) K[p] = std::exp(-f.samples[p]);
  return drift_laplacian_density(state, ScalarField::grid(state.backend(), std::move(K)), u);
}

double weighted_dirichlet(const ManifoldState& state, const ScalarField& K, const ScalarField& u,
                          const QuadratureWeights& dV) {
  check_field(state, u);
  if (state.backend() == Backend::sphere) {
    const auto& s = state.sphere();
    double acc = 0.0;
    for (const auto& m : u.modes)
      acc += sphere_eigenvalue(s.dim, s.radius_sq, m.degree) * m.coeff * m.coeff * dV.mass /
             sphere_multiplicity(s.dim, m.degree);
    return acc;
  }
  check_field(state, K);
  const auto c = detail::edge_coefficients(state, std::span<const double>(K.samples));
  return detail::apply_edge_form(state, c, u.samples, u.samples);
}

BakryEmery bakry_emery_bound(const ManifoldState& state, const ScalarField& f, double alpha,
                             bool include_dphi) {
  check_field(state, f);
  BakryEmery out;
  if (state.backend() == Backend::sphere) {
    for (const auto& m : f.modes)
      if (m.degree != 0 && m.coeff != 0.0)
        throw UnsupportedRepresentation("sphere Bakry-Emery bound needs a uniform density");
    out.tensor = ricci_tensor(state);
    out.s = out.tensor.metric_multiple;
    return out;
  }
  require_resolved(state, f, "bakry_emery_bound");
  out.tensor = ricci_tensor(state);
  const auto hess = hessian_tensor(state, f);
  const auto dphi = dphi_tensor(state);
  for (std::size_t p = 0; p < out.tensor.values.size(); ++p) {
    auto& t = out.tensor.values[p];
    t.xx += hess.values[p].xx;
    t.xy += hess.values[p].xy;
    t.yy += hess.values[p].yy;
    if (include_dphi) {
      t.xx -= alpha * dphi.values[p].xx;
      t.xy -= alpha * dphi.values[p].xy;
      t.yy -= alpha * dphi.values[p].yy;
    }
  }
  const auto eig = max_relative_eigenvalue(state, out.tensor);
  out.s = *std::max_element(eig.begin(), eig.end());
  return out;
}

BochnerDefect bochner_defect(const ManifoldState& state, const ScalarField& K,
                             const ScalarField& u) {
  check_field(state, K);
  check_field(state, u);
  if (state.backend() == Backend::sphere)
    throw UnsupportedRepresentation("the Bochner defect is assembled on grid states");
  const auto vol = detail::cell_volume(state);
  QuadratureWeights dV;
  dV.backend = state.backend();
  dV.w.resize(vol.size());
  for (std::size_t p = 0; p < vol.size(); ++p) dV.w[p] = K.samples[p] * vol[p];
  dV.mass = kernels::weighted_sum(std::vector<double>(vol.size(), 1.0), dV.w);

  std::vector<double> f(K.samples.size());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = -std::log(K.samples[p]);
  const auto ricf = bakry_emery_bound(state, ScalarField::grid(state.backend(), f), 0.0, false);
  const auto lf = drift_laplacian_density(state, K, u);

  // Ric_f(∇u, ∇u) in an orthonormal frame: e_x = ∂_x / |∂_x|, e_y = ∂_y / |∂_y|.
  const int n = state.resolution();
  const double h = state.spacing();
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> integrand(u.samples.size());
  for (std::size_t p = 0; p < integrand.size(); ++p) {
    double ux = 0.0, uy = 0.0, sx = 1.0, sy = 1.0;
    if (state.backend() == Backend::conformal_torus) {
      const std::size_t i = p % nn, j = p / nn;
      ux = (u.samples[j * nn + (i + 1) % nn] - u.samples[j * nn + (i + nn - 1) % nn]) / (2.0 * h);
      uy = (u.samples[((j + 1) % nn) * nn + i] - u.samples[((j + nn - 1) % nn) * nn + i]) / (2.0 * h);
      sx = sy = std::exp(state.conformal().phi[p]);
    } else {
      ux = (u.samples[(p + 1) % nn] - u.samples[(p + nn - 1) % nn]) / (2.0 * h);
      sx = state.warped().a[p];
      sy = state.warped().b[p];
    }
    const double vx = ux / sx, vy = uy / sy;
    const auto& t = ricf.tensor.values[p];
    const double ric = (t.xx * vx * vx) / (sx * sx) + 2.0 * t.xy * vx * vy / (sx * sy) +
                       (t.yy * vy * vy) / (sy * sy);
    integrand[p] = lf.samples[p] * lf.samples[p] - ric;
  }
  BochnerDefect out;
  out.hessian = hessian_energy(state, u, dV);
  out.rhs = kernels::weighted_sum(integrand, dV.w);
  out.relative = std::abs(out.hessian - out.rhs) / std::abs(out.hessian);
  return out;
}

}  // namespace geoflow
