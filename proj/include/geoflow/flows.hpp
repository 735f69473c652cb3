#pragma once

// Ricci flow and Ricci-harmonic flow integration with stored snapshots.
//
// The sphere shrinks in closed form, r²(t) = r₀² - 2(n-1)t. The grid
// backends run classical RK4:
//   ConformalTorus  ∂_t φ = e^{-2φ} Δ₀ φ                       (= -R/2)
//   WarpedTorus     ∂_t a = -K a + α φ_x² / a,  ∂_t b = -K b,  ∂_t φ = Δ_g φ
// with K the Gaussian curvature. Ricci flow on the warped torus is the same
// system with α = 0, so the map field is still carried by the harmonic map
// heat flow and the α = 0 reduction is bitwise.

#include <string>
#include <vector>

#include "geoflow/geometry.hpp"

namespace geoflow {

/// c₀·e^{-βt} (β = 0 gives a constant).
struct Schedule {
  double c0 = 0.0;
  double rate = 0.0;

  double operator()(double t) const;
  /// ∫_{t0}^{t1} of the schedule, analytic.
  double integral(double t0, double t1) const;
  bool is_zero() const { return c0 == 0.0; }
  bool non_increasing() const { return c0 == 0.0 || (c0 > 0.0 ? rate >= 0.0 : rate <= 0.0); }
};

enum class FlowKind { ricci, ricci_harmonic };
const char* to_string(FlowKind k);

/// Largest Δt·ρ(-Δ_g) accepted by the explicit integrators. On the flat
/// conformal torus this is Δt ≤ 0.2 Δx².
inline constexpr double kStabilityLimit = 1.6;

struct Trajectory {
  FlowKind kind = FlowKind::ricci;
  Schedule alpha;
  double t_end = 0.0;
  double dt = 0.0;
  int steps = 0;
  double cfl_ratio = 0.0;  // max over steps of Δt·ρ / kStabilityLimit
  std::vector<ManifoldState> states;
  // Time derivative of the evolving fields at each snapshot, flattened
  // (conformal: φ; warped: a, b, φ_map). Empty on the sphere.
  std::vector<std::vector<double>> rates;

  double time(int k) const { return states[static_cast<std::size_t>(k)].time; }
  Backend backend() const { return states.front().backend(); }
  int dimension() const { return states.front().dimension(); }
  double alpha_at(double t) const { return kind == FlowKind::ricci ? 0.0 : alpha(t); }
};

/// Geometry at t_k + Δt/2 from the cubic Hermite interpolant of snapshots
/// k and k+1 (exact on the sphere).
ManifoldState state_at_midpoint(const Trajectory& traj, int k);

/// State at stage time t_k + half·Δt/2 for half ∈ {0, 1, 2}.
ManifoldState stage_state(const Trajectory& traj, int k, int half);

Trajectory evolve_ricci(const ManifoldState& initial, double t_end, int steps);
Trajectory evolve_ricci_harmonic(const ManifoldState& initial, const Schedule& alpha,
                                 double t_end, int steps);

/// ∂_t of the evolving fields for one state (public for tests and refinement).
std::vector<double> flow_rate(const ManifoldState& state, double alpha);

struct VolumeResidual {
  double max_relative = 0.0;  // max_k max_p |δ_t dμ - (-R + α|∇φ|²) dμ| / max dμ
  int worst_step = -1;
};

VolumeResidual check_volume_evolution(const Trajectory& traj);

/// |∇φ|²_g of the warped map field; zeros on other grids.
ScalarField map_energy_density(const ManifoldState& state);

}  // namespace geoflow
