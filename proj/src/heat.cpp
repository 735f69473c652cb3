#include "geoflow/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geoflow/errors.hpp"

namespace geoflow {

namespace {

// Gegenbauer C_0..C_L of parameter mu at x.
std::vector<double> gegenbauer(int L, double mu, double x) {
  std::vector<double> c(static_cast<std::size_t>(std::max(L, 0)) + 1, 0.0);
  c[0] = 1.0;
  if (L >= 1) c[1] = 2.0 * mu * x;
  for (int l = 1; l < L; ++l)
    c[static_cast<std::size_t>(l) + 1] =
        (2.0 * (l + mu) * x * c[static_cast<std::size_t>(l)] -
         (l + 2.0 * mu - 1.0) * c[static_cast<std::size_t>(l) - 1]) /
        (l + 1.0);
  return c;
}

struct Zonal {
  std::vector<double> z, dz;  // Z_l(x) and dZ_l/dx
};

Zonal zonal_all(int dim, int L, double x) {
  const double mu = 0.5 * (dim - 1);
  const auto c = gegenbauer(L, mu, x);
  const auto one = gegenbauer(L, mu, 1.0);
  const auto d = gegenbauer(std::max(L - 1, 0), mu + 1.0, x);
  Zonal out;
  out.z.resize(c.size());
  out.dz.assign(c.size(), 0.0);
  for (std::size_t l = 0; l < c.size(); ++l) {
    out.z[l] = c[l] / one[l];
    if (l >= 1) out.dz[l] = 2.0 * mu * d[l - 1] / one[l];
  }
  return out;
}

int max_degree(const ScalarField& u) {
  int L = 0;
  for (const auto& m : u.modes) L = std::max(L, m.degree);
  return L;
}

double zonal_value(int dim, const ScalarField& u, double theta) {
  const auto z = zonal_all(dim, max_degree(u), std::cos(theta));
  double acc = 0.0;
  for (const auto& m : u.modes) acc += m.coeff * z.z[static_cast<std::size_t>(m.degree)];
  return acc;
}

// Golden-section search for the extremum of sign·u on [lo, hi].
double refine_extremum(int dim, const ScalarField& u, double lo, double hi, double sign) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = sign * zonal_value(dim, u, c), fd = sign * zonal_value(dim, u, d);
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = sign * zonal_value(dim, u, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = sign * zonal_value(dim, u, d);
    }
  }
  return std::max({sign * zonal_value(dim, u, lo), sign * zonal_value(dim, u, hi),
                   sign * zonal_value(dim, u, 0.5 * (a + b))});
}

void check_positive(const ManifoldState& s, const ScalarField& u) {
  if (s.backend() == Backend::sphere) {
    const auto theta = theta_grid(256);
    const auto z = evaluate_zonal(s, u, theta);
    for (std::size_t i = 0; i < z.u.size(); ++i)
      if (!(z.u[i] > 0.0))
        throw PositivityError("heat solution lost positivity at t = " + std::to_string(s.time) +
                              ", theta = " + std::to_string(theta[i]));
    return;
  }
  for (std::size_t p = 0; p < u.samples.size(); ++p)
    if (!(u.samples[p] > 0.0))
      throw PositivityError("heat solution lost positivity at t = " + std::to_string(s.time) +
                            ", point " + std::to_string(p));
}

ScalarField combine(const ScalarField& y, double h, const ScalarField& k) {
  ScalarField out = y;
  if (y.backend == Backend::sphere) {
    for (auto& m : out.modes) m.coeff += h * k.mode(m.degree);
  } else {
    for (std::size_t p = 0; p < out.samples.size(); ++p) out.samples[p] += h * k.samples[p];
  }
  return out;
}

}  // namespace

ScalarField heat_rate(const ManifoldState& state, const ScalarField& u, double a) {
  auto out = laplace_beltrami(state, u);
  if (u.backend == Backend::sphere) {
    for (auto& m : out.modes) m.coeff += a * u.mode(m.degree);
  } else {
    for (std::size_t p = 0; p < out.samples.size(); ++p) out.samples[p] += a * u.samples[p];
  }
  return out;
}

PositivityData initial_bounds(const ManifoldState& state, const ScalarField& u0) {
  check_field(state, u0);
  PositivityData b;
  if (state.backend() != Backend::sphere) {
    const auto [lo, hi] = std::minmax_element(u0.samples.begin(), u0.samples.end());
    b.A = *hi;
    b.eta = *lo;
    return b;
  }
  const int dim = state.sphere().dim;
  const int n = 4096;
  const auto theta = theta_grid(n);
  const auto z = evaluate_zonal(state, u0, theta);
  const auto hi = static_cast<std::size_t>(std::max_element(z.u.begin(), z.u.end()) - z.u.begin());
  const auto lo = static_cast<std::size_t>(std::min_element(z.u.begin(), z.u.end()) - z.u.begin());
  auto bracket = [&](std::size_t i) {
    return std::pair{theta[i == 0 ? 0 : i - 1], theta[std::min(i + 1, theta.size() - 1)]};
  };
  const auto [a0, a1] = bracket(hi);
  const auto [b0, b1] = bracket(lo);
  b.A = std::max(z.u[hi], refine_extremum(dim, u0, a0, a1, 1.0));
  b.eta = std::min(z.u[lo], -refine_extremum(dim, u0, b0, b1, -1.0));
  return b;
}

HeatSolution solve_heat(const Trajectory& traj, const ScalarField& u0, const Schedule& a,
                        bool positive) {
  const auto& first = traj.states.front();
  check_field(first, u0);
  require_resolved(first, u0, "solve_heat");
  HeatSolution sol;
  sol.a = a;
  sol.positivity_requested = positive;
  sol.u.reserve(traj.states.size());
  if (positive) {
    sol.bounds = initial_bounds(first, u0);
    if (!(sol.bounds.eta > 0.0))
      throw PositivityError("initial data is not strictly positive (min " +
                            std::to_string(sol.bounds.eta) + ")");
  }
  ScalarField u = u0;
  if (u.backend == Backend::sphere) u = ScalarField::spectral(u.modes);
  sol.u.push_back(u);
  for (int k = 0; k + 1 < static_cast<int>(traj.states.size()); ++k) {
    const auto& s0 = traj.states[static_cast<std::size_t>(k)];
    const auto& s1 = traj.states[static_cast<std::size_t>(k) + 1];
    const double dt = s1.time - s0.time;
    if (s0.backend() != Backend::sphere && dt * laplacian_spectral_bound(s0) > kStabilityLimit)
      throw StepError("heat step violates the stability bound at step " + std::to_string(k));
    const auto mid = state_at_midpoint(traj, k);
    const double th = mid.time;
    const auto k1 = heat_rate(s0, u, a(s0.time));
    const auto k2 = heat_rate(mid, combine(u, 0.5 * dt, k1), a(th));
    const auto k3 = heat_rate(mid, combine(u, 0.5 * dt, k2), a(th));
    const auto k4 = heat_rate(s1, combine(u, dt, k3), a(s1.time));
    if (u.backend == Backend::sphere) {
      for (auto& m : u.modes)
        m.coeff += dt / 6.0 *
                   (k1.mode(m.degree) + 2.0 * k2.mode(m.degree) + 2.0 * k3.mode(m.degree) +
                    k4.mode(m.degree));
    } else {
      for (std::size_t p = 0; p < u.samples.size(); ++p)
        u.samples[p] += dt / 6.0 *
                        (k1.samples[p] + 2.0 * k2.samples[p] + 2.0 * k3.samples[p] +
                         k4.samples[p]);
    }
    if (u.backend != Backend::sphere &&
        !std::all_of(u.samples.begin(), u.samples.end(), [](double v) { return std::isfinite(v); }))
      throw DivergenceError("heat solution diverged at step " + std::to_string(k));
    if (positive) check_positive(s1, u);
    sol.u.push_back(u);
  }
  return sol;
}

std::vector<Mode> closed_form_sphere_solution(int dim, double r0sq, const std::vector<Mode>& modes,
                                              const Schedule& a, double t) {
  const double r2 = r0sq - 2.0 * (dim - 1) * t;
  if (!(r2 > 0.0)) throw DomainError("time is past the sphere extinction time");
  const double growth = std::exp(a.integral(0.0, t));
  std::vector<Mode> out = modes;
  for (auto& m : out) {
    const double exponent = static_cast<double>(m.degree) * (m.degree + dim - 1) / (2.0 * (dim - 1));
    m.coeff *= growth * std::pow(r2 / r0sq, exponent);
  }
  return out;
}

double zonal_harmonic(int dim, int degree, double x) {
  return zonal_all(dim, degree, x).z[static_cast<std::size_t>(degree)];
}

ZonalSamples evaluate_zonal(const ManifoldState& state, const ScalarField& coeffs,
                            std::span<const double> theta) {
  if (state.backend() != Backend::sphere)
    throw BackendMismatch("evaluate_zonal needs the sphere backend");
  check_field(state, coeffs);
  const auto& s = state.sphere();
  const int L = max_degree(coeffs);
  ZonalSamples out;
  out.u.resize(theta.size());
  out.grad_sq.resize(theta.size());
  out.lap.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double th = theta[i];
    if (!(th >= 0.0 && th <= std::numbers::pi))
      throw DomainError("polar angle outside [0, pi]: " + std::to_string(th));
    const auto z = zonal_all(s.dim, L, std::cos(th));
    double u = 0.0, du = 0.0, lap = 0.0;
    for (const auto& m : coeffs.modes) {
      const auto l = static_cast<std::size_t>(m.degree);
      u += m.coeff * z.z[l];
      du += -std::sin(th) * m.coeff * z.dz[l];
      lap -= sphere_eigenvalue(s.dim, s.radius_sq, m.degree) * m.coeff * z.z[l];
    }
    out.u[i] = u;
    out.grad_sq[i] = du * du / s.radius_sq;
    out.lap[i] = lap;
  }
  return out;
}

std::vector<double> theta_grid(int n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = std::numbers::pi * i / n;
  t.back() = std::numbers::pi;
  return t;
}

}  // namespace geoflow
