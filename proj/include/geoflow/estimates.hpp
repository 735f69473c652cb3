#pragma once

// Pointwise gradient estimates for positive heat solutions and the
// curvature band checks that gate the Harnack-normalized monotonicity checks.
//
// Every check scans stored snapshots only; slacks are "right side minus
// left side", so a check passes when the worst slack is ≥ -tolerance.

#include <string>
#include <vector>

#include "geoflow/flows.hpp"
#include "geoflow/frequency.hpp"
#include "geoflow/heat.hpp"
#include "geoflow/measures.hpp"

namespace geoflow {

struct SlackReport {
  std::string id;
  double worst = 0.0;
  double t_worst = 0.0;
  std::size_t point = 0;  // grid index, or θ-sample index on the sphere
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::string> hypotheses;
  std::string note;
};

/// Number of θ samples used for pointwise checks on the sphere.
inline constexpr int kThetaSamples = 256;

/// t|∇u|² ≤ u² log(A/u) on snapshots with t ≤ t_max.
SlackReport hamilton_gradient_check(const Trajectory& traj, const HeatSolution& heat, double A,
                                    double t_max, double tol);

enum class LiYauVariant { ricci, ricci_harmonic };

/// |∇u|²/u - ∂_t u ≤ (c/2t) u + K_b n u with c = n (Ricci flow) or
/// c = n/2 + 4n C_dphi α(0) (Ricci-harmonic flow), on 0 < t ≤ t_max.
SlackReport li_yau_check(const Trajectory& traj, const HeatSolution& heat, double k_bound, int dim,
                         LiYauVariant variant, double c_dphi, double t_max, double tol);

/// Pointwise slack rows for the CSV, aligned with snapshots (NaN when t is
/// outside the checked range).
std::vector<double> hamilton_slack_series(const Trajectory& traj, const HeatSolution& heat,
                                          double A);
std::vector<double> li_yau_slack_series(const Trajectory& traj, const HeatSolution& heat,
                                        double k_bound, int dim, double leading);

enum class BandKind { ric_nonneg_upper, dphi_band, alpha_monotone, ricf_upper };
const char* to_string(BandKind k);

struct BandParams {
  double k_bound = 0.0;
  double c_dphi = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double tol = 1e-12;
  const std::vector<FrequencyRecord>* records = nullptr;  // ricf-upper
  HSchedule h;                                            // ricf-upper
};

SlackReport hypothesis_band_check(const Trajectory& traj, const WeightSystem& ws, BandKind kind,
                                  const BandParams& params);

/// Smallest C with dφ⊗dφ ≤ (C/t) g over snapshots in (0, t1].
double measure_dphi_constant(const Trajectory& traj, double t1);

/// sup of the largest Ricci eigenvalue relative to g over snapshots in [t0, t1].
double measure_ricci_sup(const Trajectory& traj, double t0, double t1);

/// ∫K dμ and min K for a 2D grid state; documents the torus obstruction.
struct GaussBonnet {
  double total = 0.0;
  double min_gauss = 0.0;
  double max_gauss = 0.0;
};
GaussBonnet gauss_bonnet(const ManifoldState& state);

}  // namespace geoflow
