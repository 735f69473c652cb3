#pragma once

// Discrete manifold backends and their differential operators.
//
// Three families are supported:
//   * SphereSpectral - round Sⁿ of squared radius r², fields stored as zonal
//     harmonic coefficients (one mode per degree, normalized so Z_l(pole) = 1).
//   * ConformalTorus - e^{2φ}(dx² + dy²) on an n×n periodic grid of [0,1)².
//   * WarpedTorus    - a(x)²dx² + b(x)²dy² with fields depending on x only,
//     sampled on n periodic points; carries the map field φ used by the
//     Ricci-harmonic flow.
//
// Grid operators are written in divergence form, so summation by parts holds
// to round-off: Σ (Δu) v dμ = -Σ_e c_e δu δv.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace geoflow {

enum class Backend { sphere, conformal_torus, warped_torus };

const char* to_string(Backend b);

struct SphereSpectral {
  int dim = 2;
  double radius_sq = 1.0;
  int band_limit = 32;
};

struct ConformalTorus {
  int n = 0;
  std::vector<double> phi;  // n*n samples, p = j*n + i
};

struct WarpedTorus {
  int n = 0;
  std::vector<double> a, b, phi_map;  // n samples each
};

struct ManifoldState {
  std::variant<SphereSpectral, ConformalTorus, WarpedTorus> geometry;
  double time = 0.0;

  Backend backend() const { return static_cast<Backend>(geometry.index()); }
  int dimension() const;
  /// Number of grid samples (0 for the spectral sphere).
  std::size_t samples() const;
  /// Grid resolution per axis (0 for the spectral sphere).
  int resolution() const;
  double spacing() const { return resolution() > 0 ? 1.0 / resolution() : 0.0; }

  const SphereSpectral& sphere() const { return std::get<SphereSpectral>(geometry); }
  const ConformalTorus& conformal() const { return std::get<ConformalTorus>(geometry); }
  const WarpedTorus& warped() const { return std::get<WarpedTorus>(geometry); }
};

/// Throws DomainError when r² ≤ 0, a or b are non-positive, sizes are
/// inconsistent, or any field is non-finite.
void validate(const ManifoldState& state);

struct Mode {
  int degree = 0;
  double coeff = 0.0;
  friend bool operator==(const Mode&, const Mode&) = default;
};

struct ScalarField {
  Backend backend = Backend::sphere;
  std::vector<double> samples;  // grid backends
  std::vector<Mode> modes;      // sphere backend, distinct degrees

  static ScalarField grid(Backend b, std::vector<double> values);
  static ScalarField spectral(std::vector<Mode> modes);
  double mode(int degree) const;
};

/// Per-point symmetric 2×2 tensors (covariant components) on grids, or a
/// multiple of the metric on the sphere.
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
};

struct SymTensorField {
  Backend backend = Backend::sphere;
  std::vector<Sym2> values;
  double metric_multiple = 0.0;  // sphere: T = metric_multiple · g
};

/// Quadrature weights for ∫·dμ or ∫·dV. Grid weights are per sample and
/// include the cell area; the sphere carries the total mass of a spatially
/// uniform density (dμ: the volume, dV: 1).
struct QuadratureWeights {
  Backend backend = Backend::sphere;
  std::vector<double> w;
  double mass = 0.0;
};

/// Field matches the state's backend and resolution (or band limit).
void check_field(const ManifoldState& state, const ScalarField& u);

// Sphere spectral helpers.
double sphere_volume(int dim, double radius_sq);
double sphere_eigenvalue(int dim, double radius_sq, int degree);
/// Dimension of the degree-l harmonic space; ∫Z_l² dν = mass(ν) / multiplicity.
double sphere_multiplicity(int dim, int degree);

/// Samples a function of (x, y) ∈ [0,1)² on the grid (WarpedTorus ignores y).
ScalarField sample(const ManifoldState& state, const std::function<double(double, double)>& fn);
ScalarField constant_field(const ManifoldState& state, double value);

ScalarField scalar_curvature(const ManifoldState& state);
ScalarField laplace_beltrami(const ManifoldState& state, const ScalarField& u);

/// Pointwise |∇u|² by centered differences. The sphere has no pointwise
/// representation here; use evaluate_zonal.
ScalarField gradient_norm_sq(const ManifoldState& state, const ScalarField& u);

/// ∫⟨∇u, ∇v⟩ dμ assembled on edges (the exact adjoint partner of laplace_beltrami).
double dirichlet_inner(const ManifoldState& state, const ScalarField& u, const ScalarField& v);

QuadratureWeights volume_weights(const ManifoldState& state);

double integrate(const ManifoldState& state, const ScalarField& field,
                 const QuadratureWeights& weights);
/// ∫ u v against the weights (Parseval on the sphere).
double inner(const ManifoldState& state, const ScalarField& u, const ScalarField& v,
             const QuadratureWeights& weights);

/// Covariant Hessian ∇²u with Christoffel corrections.
SymTensorField hessian_tensor(const ManifoldState& state, const ScalarField& u);
/// Ric = (R/2) g for the 2D backends, (n-1)/r² g on the sphere.
SymTensorField ricci_tensor(const ManifoldState& state);
/// dφ⊗dφ of the WarpedTorus map field; zero elsewhere.
SymTensorField dphi_tensor(const ManifoldState& state);

/// Pointwise largest / smallest eigenvalue of T relative to g.
std::vector<double> max_relative_eigenvalue(const ManifoldState& state, const SymTensorField& t);
std::vector<double> min_relative_eigenvalue(const ManifoldState& state, const SymTensorField& t);

/// ∫ |∇²u|²_g against the weights.
double hessian_energy(const ManifoldState& state, const ScalarField& u,
                      const QuadratureWeights& weights);

/// Throws ResolutionError when the field's energy sits above a quarter of
/// the grid wavenumber range (or above the band limit on the sphere).
void require_resolved(const ManifoldState& state, const ScalarField& u, const char* what);

/// Gershgorin bound on the spectral radius of -Δ_g; sets the explicit step limit.
double laplacian_spectral_bound(const ManifoldState& state);

// Grid plumbing shared by the measure and frequency modules.
namespace detail {
/// Edge coefficients of √g g^{ij} on the grid, optionally multiplied by the
/// arithmetic mean of a density across each edge. For the conformal torus
/// (cx, cy) are filled; for the warped torus only cx.
struct EdgeCoefficients {
  std::vector<double> cx, cy;
};
EdgeCoefficients edge_coefficients(const ManifoldState& state,
                                   std::optional<std::span<const double>> density = {});
/// √g per sample times the cell measure (the dμ weights).
std::vector<double> cell_volume(const ManifoldState& state);
/// Applies Σ_e c_e (u_q - u_p) with the backend's stencil layout.
void apply_divergence(const ManifoldState& state, const EdgeCoefficients& c,
                      std::span<const double> u, std::span<double> out);
double apply_edge_form(const ManifoldState& state, const EdgeCoefficients& c,
                       std::span<const double> u, std::span<const double> v);
}  // namespace detail

}  // namespace geoflow
