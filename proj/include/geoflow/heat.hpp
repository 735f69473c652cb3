#pragma once

// Forward linear heat equation ∂_t u = Δ_{g(t)} u + a(t) u along a stored
// trajectory, plus pointwise evaluation of zonal sphere data.

#include <span>
#include <vector>

#include "geoflow/flows.hpp"
#include "geoflow/geometry.hpp"

namespace geoflow {

struct PositivityData {
  double A = 0.0;    // max of u(0)
  double eta = 0.0;  // min of u(0)
};

struct HeatSolution {
  Schedule a;
  std::vector<ScalarField> u;  // one per snapshot
  bool positivity_requested = false;
  PositivityData bounds;
};

/// Throws PositivityError naming the first violating (t, point) when
/// `positive` is set and u leaves (0, ∞).
HeatSolution solve_heat(const Trajectory& traj, const ScalarField& u0, const Schedule& a,
                        bool positive = false);

/// Δ_g u + a u on one state: the time derivative used by every estimate.
ScalarField heat_rate(const ManifoldState& state, const ScalarField& u, double a);

/// max and min of u. The sphere is scanned on a fine θ grid with local
/// golden-section refinement.
PositivityData initial_bounds(const ManifoldState& state, const ScalarField& u0);

/// c_l(t) = c_l(0) e^{∫a} (r²(t)/r₀²)^{l(l+n-1)/(2(n-1))}.
std::vector<Mode> closed_form_sphere_solution(int dim, double r0sq, const std::vector<Mode>& modes,
                                              const Schedule& a, double t);

/// Normalized zonal harmonic Z_l(cos θ) with Z_l(1) = 1 (Legendre for n = 2).
double zonal_harmonic(int dim, int degree, double x);

struct ZonalSamples {
  std::vector<double> u, grad_sq, lap;
};

/// u, |∇u|² = (∂_θ u)² / r² and Δu at the given polar angles.
ZonalSamples evaluate_zonal(const ManifoldState& state, const ScalarField& coeffs,
                            std::span<const double> theta);

/// n+1 equally spaced angles covering [0, π].
std::vector<double> theta_grid(int n);

}  // namespace geoflow
