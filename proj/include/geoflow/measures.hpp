#pragma once

// Conjugate heat measure along a trajectory.
//
// The backward solve evolves the mass density m = K dμ per cell,
//   ∂_t m = -Σ_e c_e δ(K),   K = m / dμ,
// which is the conjugate heat equation ∂_t K = -ΔK + RK (- α|∇φ|²K) once
// the volume form evolution is substituted. Written this way the total mass
// telescopes to zero at every RK stage, so ∫dV = 1 holds to round-off.

#include <vector>

#include "geoflow/flows.hpp"
#include "geoflow/geometry.hpp"

namespace geoflow {

enum class TerminalKind { uniform, bump };

struct TerminalSpec {
  TerminalKind kind = TerminalKind::uniform;
  double center_x = 0.5;
  double center_y = 0.5;
  double width = 0.25;  // Gaussian standard deviation in grid coordinates
};

/// Terminal K normalized to ∫K dμ = 1. The bump is a periodized Gaussian.
ScalarField terminal_density(const ManifoldState& state, const TerminalSpec& spec);

struct WeightSnapshot {
  double t = 0.0;
  double tau = 0.0;
  ScalarField K;          // heat-kernel density
  ScalarField f;          // potential, K = (4πτ)^{-n/2} e^{-f}
  QuadratureWeights dV;   // K·dμ
};

struct WeightSystem {
  double T = 0.0;     // t_end + τ₀
  double tau0 = 1.0;
  std::vector<WeightSnapshot> snaps;
  double max_mass_drift = 0.0;  // max_k |∫dV - 1|
};

/// Backward RK4 on the stored snapshot grid. Throws PositivityError when K
/// loses positivity and StepError when a snapshot violates the step bound.
WeightSystem solve_conjugate_backward(const Trajectory& traj, const ScalarField& terminal,
                                      double tau0 = 1.0);

/// f = -log K - (n/2) log(4πτ).
ScalarField potential_from_density(const ScalarField& K, double tau, int dim);

struct PotentialResidual {
  double max_abs = 0.0;
  int worst_step = -1;
  std::vector<double> per_step;  // max |residual| at each interior snapshot, 0 at the ends
};

/// Residual of ∂_t f = -Δf - R + |∇f|² + n/(2τ) + α|∇φ|², with ∂_t f by
/// central differences across snapshots.
PotentialResidual potential_residual(const Trajectory& traj, const WeightSystem& ws);

/// Δ_f u = K⁻¹ div(K ∇u) assembled with edge-averaged K, so that
/// ∫(Δ_f u) v dV = -Σ_e c_e K̄_e δu δv is symmetric to round-off.
ScalarField drift_laplacian(const ManifoldState& state, const ScalarField& f,
                            const ScalarField& u);
/// Same operator taking the density K directly.
ScalarField drift_laplacian_density(const ManifoldState& state, const ScalarField& K,
                                    const ScalarField& u);
/// ∫|∇u|² dV = Σ_e c_e K̄_e δu² (sphere: Σ λ_l c_l² · mass / multiplicity).
double weighted_dirichlet(const ManifoldState& state, const ScalarField& K, const ScalarField& u,
                          const QuadratureWeights& dV);

struct BakryEmery {
  SymTensorField tensor;  // Ric + ∇²f - α dφ⊗dφ
  double s = 0.0;         // sup over M of the largest eigenvalue relative to g
};

BakryEmery bakry_emery_bound(const ManifoldState& state, const ScalarField& f, double alpha,
                             bool include_dphi);

/// Integral Bochner identity on a grid state with density K. The relative
/// defect is |∫|∇²u|² dV - ∫((Δ_f u)² - Ric_f(∇u, ∇u)) dV| / ∫|∇²u|² dV.
struct BochnerDefect {
  double hessian = 0.0;
  double rhs = 0.0;
  double relative = 0.0;
};
BochnerDefect bochner_defect(const ManifoldState& state, const ScalarField& K,
                             const ScalarField& u);

}  // namespace geoflow
