#pragma once

// Parabolic frequency of a heat solution against the conjugate heat measure:
//   I = ∫u² dV,   D = h ∫|∇u|² dV,
//   U3 = exp{-∫_{t0}^t (h' + κ)/h} D/I,
//   U4 = exp{-∫_{t0}^t (h'/h + 2K_b n + (N/s) n/2 + n/s) ds} D/I,  N = log(A/η).

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "geoflow/flows.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/measures.hpp"

namespace geoflow {

enum class HKind { constant, backwards_time, linear };

struct HSchedule {
  HKind kind = HKind::constant;
  double c0 = -1.0;  // constant value, or linear intercept
  double c1 = 0.0;   // linear slope
  double T = 0.0;    // backwards-time origin (h = -(T - t))

  double operator()(double t) const;
  double derivative(double t) const;
  /// Throws DomainError if h vanishes or changes sign on [t0, t1].
  void validate(double t0, double t1) const;
  int sign(double t0) const { return (*this)(t0) < 0.0 ? -1 : 1; }
};

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
inline bool present(double v) { return !std::isnan(v); }

struct FrequencyRecord {
  double t = 0.0;
  double I = 0.0;
  double D = 0.0;
  double U3 = kAbsent;
  double U4 = kAbsent;
  double kappa = kAbsent;
  double s = kAbsent;        // sup of the Bakry-Emery eigenvalue
  double lambda1 = kAbsent;  // first nonzero drift eigenvalue
  double exponent3 = kAbsent;  // ∫(h' + κ)/h
  double exponent4 = kAbsent;  // ∫(h'/h + 2K_b n + C n/2 + n/s)
};

struct IDPair {
  double I = 0.0;
  double D = 0.0;
};

/// D is evaluated as -h∫u Δ_f u dV on grids and by coefficient sums on the sphere.
IDPair compute_I_D(const ManifoldState& state, const WeightSnapshot& w, const ScalarField& u,
                   double h);

/// κ = 2hs, the tightest κ with s ≤ κ/(2h).
double choose_kappa(double s, double h);

/// Fills exponent3 and U3. `exact_kappa_integral(t)`, when given, returns
/// ∫_{t0}^t κ/h exactly; otherwise the trapezoid rule runs on the records.
void normalize_frequency_kappa(std::vector<FrequencyRecord>& records, const HSchedule& h,
                               double t0,
                               const std::function<double(double)>& exact_kappa_integral = {});

/// Fills exponent4 and U4. Throws HypothesisError unless 0 < η ≤ A and t0 > 0.
void normalize_frequency_harnack(std::vector<FrequencyRecord>& records, const HSchedule& h,
                                 double k_bound, int dim, double A, double eta, double t0);

/// Smallest nonzero eigenvalue of -Δ_f in L²(dV).
double first_eigenvalue(const ManifoldState& state, const WeightSnapshot& w);

struct RatioBound {
  double bound = 0.0;
  double actual = 0.0;
  double t_prime = 0.0;
  double t1 = 0.0;
};

/// exp(-2U(t0) ∫_{t'}^{t1} e^{E3}/h dt + 2∫_{t'}^{t1} a) against I(t1)/I(t').
RatioBound ratio_lower_bound(const std::vector<FrequencyRecord>& records, const HSchedule& h,
                             const Schedule& a, double t_prime, double t1);

namespace detail {
/// Dense generalized eigensolve with the constant mode deflated (small grids).
double first_eigenvalue_dense(const ManifoldState& state, const WeightSnapshot& w);
/// Shift-invert block subspace iteration (large grids).
double first_eigenvalue_sparse(const ManifoldState& state, const WeightSnapshot& w);
}  // namespace detail

}  // namespace geoflow
