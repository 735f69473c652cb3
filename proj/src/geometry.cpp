#include "geoflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "geoflow/errors.hpp"
#include "geoflow/kernels.hpp"

namespace geoflow {

namespace {

constexpr double kPi = std::numbers::pi;

inline std::size_t wrap(long i, long n) { return static_cast<std::size_t>(((i % n) + n) % n); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_grid(const ManifoldState& state, const char* op) {
  if (state.backend() == Backend::sphere)
    throw UnsupportedRepresentation(std::string(op) + ": not available on the spectral sphere");
}

std::vector<Mode> scaled_modes(const ScalarField& u, const std::function<double(int)>& factor) {
  std::vector<Mode> out = u.modes;
  for (auto& m : out) m.coeff *= factor(m.degree);
  return out;
}

// Eigenvalues of the symmetric matrix [[p, q], [q, r]].
std::pair<double, double> sym_eigen(double p, double q, double r) {
  const double mean = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), q);
  return {mean - rad, mean + rad};
}

// g^{-1/2} T g^{-1/2} entries for the diagonal metrics used here.
Sym2 relative_to_metric(const ManifoldState& state, const Sym2& t, std::size_t p) {
  if (state.backend() == Backend::conformal_torus) {
    const double inv = std::exp(-2.0 * state.conformal().phi[p]);
    return {t.xx * inv, t.xy * inv, t.yy * inv};
  }
  const auto& w = state.warped();
  const double a = w.a[p], b = w.b[p];
  return {t.xx / (a * a), t.xy / (a * b), t.yy / (b * b)};
}

}  // namespace

const char* to_string(Backend b) {
  switch (b) {
    case Backend::sphere:
      return "sphere";
    case Backend::conformal_torus:
      return "conformal-torus";
    case Backend::warped_torus:
      return "warped-torus";
  }
  return "unknown";
}

int ManifoldState::dimension() const {
  return backend() == Backend::sphere ? sphere().dim : 2;
}

std::size_t ManifoldState::samples() const {
  switch (backend()) {
    case Backend::sphere:
      return 0;
    case Backend::conformal_torus: {
      const auto n = static_cast<std::size_t>(conformal().n);
      return n * n;
    }
    case Backend::warped_torus:
      return static_cast<std::size_t>(warped().n);
  }
  return 0;
}

int ManifoldState::resolution() const {
  switch (backend()) {
    case Backend::sphere:
      return 0;
    case Backend::conformal_torus:
      return conformal().n;
    case Backend::warped_torus:
      return warped().n;
  }
  return 0;
}

void validate(const ManifoldState& state) {
  if (!std::isfinite(state.time)) throw DomainError("state time is not finite");
  switch (state.backend()) {
    case Backend::sphere: {
      const auto& s = state.sphere();
      if (s.dim < 2) throw DomainError("sphere dimension must be at least 2");
      if (!(s.radius_sq > 0.0) || !std::isfinite(s.radius_sq))
        throw DomainError("sphere squared radius must be positive and finite");
      if (s.band_limit < 0) throw DomainError("sphere band limit must be non-negative");
      return;
    }
    case Backend::conformal_torus: {
      const auto& c = state.conformal();
      if (c.n < 4) throw DomainError("conformal torus needs at least 4 points per axis");
      if (c.phi.size() != static_cast<std::size_t>(c.n) * static_cast<std::size_t>(c.n))
        throw DomainError("conformal exponent size does not match n*n");
      if (!all_finite(c.phi)) throw DomainError("conformal exponent has non-finite values");
      return;
    }
    case Backend::warped_torus: {
      const auto& w = state.warped();
      const auto n = static_cast<std::size_t>(w.n);
      if (w.n < 4) throw DomainError("warped torus needs at least 4 points");
      if (w.a.size() != n || w.b.size() != n || w.phi_map.size() != n)
        throw DomainError("warped torus field sizes do not match n");
      if (!all_finite(w.a) || !all_finite(w.b) || !all_finite(w.phi_map))
        throw DomainError("warped torus fields have non-finite values");
      for (std::size_t i = 0; i < n; ++i)
        if (!(w.a[i] > 0.0) || !(w.b[i] > 0.0))
          throw DomainError("warp factors must be strictly positive (index " +
                            std::to_string(i) + ")");
      return;
    }
  }
}

ScalarField ScalarField::grid(Backend b, std::vector<double> values) {
  ScalarField f;
  f.backend = b;
  f.samples = std::move(values);
  return f;
}

ScalarField ScalarField::spectral(std::vector<Mode> modes) {
  ScalarField f;
  f.backend = Backend::sphere;
  std::sort(modes.begin(), modes.end(),
            [](const Mode& a, const Mode& b) { return a.degree < b.degree; });
  f.modes = std::move(modes);
  return f;
}

double ScalarField::mode(int degree) const {
  for (const auto& m : modes)
    if (m.degree == degree) return m.coeff;
  return 0.0;
}

void check_field(const ManifoldState& state, const ScalarField& u) {
  if (u.backend != state.backend())
    throw BackendMismatch(std::string("field backend ") + to_string(u.backend) +
                          " does not match state backend " + to_string(state.backend()));
  if (state.backend() == Backend::sphere) {
    std::set<int> seen;
    for (const auto& m : u.modes) {
      if (m.degree < 0) throw DomainError("spectral degree must be non-negative");
      if (!seen.insert(m.degree).second) throw DomainError("spectral degrees must be distinct");
      if (!std::isfinite(m.coeff)) throw DomainError("spectral coefficient is not finite");
    }
    return;
  }
  if (u.samples.size() != state.samples())
    throw BackendMismatch("field has " + std::to_string(u.samples.size()) +
                          " samples, state resolution needs " + std::to_string(state.samples()));
}

double sphere_volume(int dim, double radius_sq) {
  const double unit =
      2.0 * std::pow(kPi, 0.5 * (dim + 1)) / std::tgamma(0.5 * (dim + 1));
  return unit * std::pow(radius_sq, 0.5 * dim);
}

double sphere_eigenvalue(int dim, double radius_sq, int degree) {
  return static_cast<double>(degree) * (degree + dim - 1) / radius_sq;
}

double sphere_multiplicity(int dim, int degree) {
  // (2l+n-1)(l+n-2)! / (l! (n-1)!)
  double binom = 1.0;  // C(l+n-2, l)
  for (int k = 1; k <= degree; ++k) binom *= static_cast<double>(dim - 2 + k) / k;
  return binom * (2.0 * degree + dim - 1) / (dim - 1);
}

ScalarField sample(const ManifoldState& state, const std::function<double(double, double)>& fn) {
  require_grid(state, "sample");
  const int n = state.resolution();
  const double h = state.spacing();
  std::vector<double> v(state.samples());
  if (state.backend() == Backend::conformal_torus) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(j) * n + i] = fn(i * h, j * h);
  } else {
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = fn(i * h, 0.0);
  }
  return ScalarField::grid(state.backend(), std::move(v));
}

ScalarField constant_field(const ManifoldState& state, double value) {
  if (state.backend() == Backend::sphere) return ScalarField::spectral({{0, value}});
  return ScalarField::grid(state.backend(), std::vector<double>(state.samples(), value));
}

namespace detail {

EdgeCoefficients edge_coefficients(const ManifoldState& state,
                                   std::optional<std::span<const double>> density) {
  require_grid(state, "edge coefficients");
  EdgeCoefficients c;
  const int n = state.resolution();
  if (state.backend() == Backend::conformal_torus) {
    // √g g^{ij} = δ^{ij} in two dimensions; the h² of the cell cancels 1/h².
    const std::size_t total = state.samples();
    c.cx.assign(total, 1.0);
    c.cy.assign(total, 1.0);
    if (density) {
      const auto& rho = *density;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const std::size_t p = static_cast<std::size_t>(j) * n + i;
          c.cx[p] = 0.5 * (rho[p] + rho[static_cast<std::size_t>(j) * n + wrap(i + 1, n)]);
          c.cy[p] = 0.5 * (rho[p] + rho[wrap(j + 1, n) * n + i]);
        }
    }
    return c;
  }
  const auto& w = state.warped();
  const double h = state.spacing();
  c.cx.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t p = static_cast<std::size_t>(i), q = wrap(i + 1, n);
    const double ratio = 0.5 * (w.b[p] / w.a[p] + w.b[q] / w.a[q]);
    double coeff = ratio / h;
    if (density) coeff *= 0.5 * ((*density)[p] + (*density)[q]);
    c.cx[p] = coeff;
  }
  return c;
}

std::vector<double> cell_volume(const ManifoldState& state) {
  require_grid(state, "cell volume");
  const double h = state.spacing();
  std::vector<double> v(state.samples());
  if (state.backend() == Backend::conformal_torus) {
    const auto& phi = state.conformal().phi;
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::exp(2.0 * phi[p]) * h * h;
  } else {
    const auto& w = state.warped();
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = w.a[p] * w.b[p] * h;
  }
  return v;
}

void apply_divergence(const ManifoldState& state, const EdgeCoefficients& c,
                      std::span<const double> u, std::span<double> out) {
  if (state.backend() == Backend::conformal_torus)
    kernels::divergence_2d(state.resolution(), c.cx, c.cy, u, out);
  else
    kernels::divergence_1d(c.cx, u, out);
}

double apply_edge_form(const ManifoldState& state, const EdgeCoefficients& c,
                       std::span<const double> u, std::span<const double> v) {
  if (state.backend() == Backend::conformal_torus)
    return kernels::edge_form_2d(state.resolution(), c.cx, c.cy, u, v);
  return kernels::edge_form_1d(c.cx, u, v);
}

}  // namespace detail

ScalarField laplace_beltrami(const ManifoldState& state, const ScalarField& u) {
  check_field(state, u);
  if (state.backend() == Backend::sphere) {
    const auto& s = state.sphere();
    return ScalarField::spectral(scaled_modes(
        u, [&](int l) { return -sphere_eigenvalue(s.dim, s.radius_sq, l); }));
  }
  const auto coeffs = detail::edge_coefficients(state);
  const auto vol = detail::cell_volume(state);
  std::vector<double> out(u.samples.size());
  detail::apply_divergence(state, coeffs, u.samples, out);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] /= vol[p];
  return ScalarField::grid(state.backend(), std::move(out));
}

ScalarField scalar_curvature(const ManifoldState& state) {
  validate(state);
  switch (state.backend()) {
    case Backend::sphere: {
      const auto& s = state.sphere();
      return ScalarField::spectral({{0, s.dim * (s.dim - 1) / s.radius_sq}});
    }
    case Backend::conformal_torus: {
      // R = -2 e^{-2φ} Δ₀φ = -2 Δ_g φ
      auto r = laplace_beltrami(
          state, ScalarField::grid(Backend::conformal_torus, state.conformal().phi));
      for (auto& x : r.samples) x *= -2.0;
      return r;
    }
    case Backend::warped_torus: {
      // K = -(1/(ab)) d/dx (b_x / a)
      const auto& w = state.warped();
      const int n = w.n;
      const double h = state.spacing();
      std::vector<double> flux(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const std::size_t p = static_cast<std::size_t>(i), q = wrap(i + 1, n);
        flux[p] = (w.b[q] - w.b[p]) / (0.5 * (w.a[p] + w.a[q]));
      }
      std::vector<double> r(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const std::size_t p = static_cast<std::size_t>(i), m = wrap(i - 1, n);
        const double gauss = -(flux[p] - flux[m]) / (w.a[p] * w.b[p] * h * h);
        r[p] = 2.0 * gauss;
      }
      return ScalarField::grid(Backend::warped_torus, std::move(r));
    }
  }
  return {};
}

ScalarField gradient_norm_sq(const ManifoldState& state, const ScalarField& u) {
  check_field(state, u);
  if (state.backend() == Backend::sphere)
    throw UnsupportedRepresentation(
        "pointwise gradients of spectral sphere fields need evaluate_zonal");
  const int n = state.resolution();
  const double h = state.spacing();
  std::vector<double> out(u.samples.size());
  if (state.backend() == Backend::conformal_torus) {
    std::vector<double> gx(out.size()), gy(out.size());
    kernels::centered_gradient_2d(n, u.samples, gx, gy);
    const auto& phi = state.conformal().phi;
    for (std::size_t p = 0; p < out.size(); ++p)
      out[p] = std::exp(-2.0 * phi[p]) * (gx[p] * gx[p] + gy[p] * gy[p]) / (h * h);
  } else {
    const auto& a = state.warped().a;
    for (int i = 0; i < n; ++i) {
      const std::size_t p = static_cast<std::size_t>(i);
      const double d = (u.samples[wrap(i + 1, n)] - u.samples[wrap(i - 1, n)]) / (2.0 * h);
      out[p] = d * d / (a[p] * a[p]);
    }
  }
  return ScalarField::grid(state.backend(), std::move(out));
}

double dirichlet_inner(const ManifoldState& state, const ScalarField& u, const ScalarField& v) {
  check_field(state, u);
  check_field(state, v);
  if (state.backend() == Backend::sphere) {
    const auto& s = state.sphere();
    const double vol = sphere_volume(s.dim, s.radius_sq);
    double acc = 0.0;
    for (const auto& m : u.modes)
      acc += sphere_eigenvalue(s.dim, s.radius_sq, m.degree) * m.coeff * v.mode(m.degree) * vol /
             sphere_multiplicity(s.dim, m.degree);
    return acc;
  }
  return detail::apply_edge_form(state, detail::edge_coefficients(state), u.samples, v.samples);
}

QuadratureWeights volume_weights(const ManifoldState& state) {
  QuadratureWeights q;
  q.backend = state.backend();
  if (state.backend() == Backend::sphere) {
    q.mass = sphere_volume(state.sphere().dim, state.sphere().radius_sq);
    return q;
  }
  q.w = detail::cell_volume(state);
  q.mass = kernels::weighted_sum(std::vector<double>(q.w.size(), 1.0), q.w);
  return q;
}

namespace {
void check_weights(const ManifoldState& state, const QuadratureWeights& w) {
  if (w.backend != state.backend()) throw BackendMismatch("quadrature weights backend mismatch");
  if (state.backend() != Backend::sphere && w.w.size() != state.samples())
    throw BackendMismatch("quadrature weights do not match the grid size");
}
}  // namespace

double integrate(const ManifoldState& state, const ScalarField& field,
                 const QuadratureWeights& weights) {
  check_field(state, field);
  check_weights(state, weights);
  if (state.backend() == Backend::sphere) return field.mode(0) * weights.mass;
  return kernels::weighted_sum(field.samples, weights.w);
}

double inner(const ManifoldState& state, const ScalarField& u, const ScalarField& v,
             const QuadratureWeights& weights) {
  check_field(state, u);
  check_field(state, v);
  check_weights(state, weights);
  if (state.backend() == Backend::sphere) {
    const int dim = state.sphere().dim;
    double acc = 0.0;
    for (const auto& m : u.modes)
      acc += m.coeff * v.mode(m.degree) * weights.mass / sphere_multiplicity(dim, m.degree);
    return acc;
  }
  return kernels::weighted_dot(u.samples, v.samples, weights.w);
}

SymTensorField hessian_tensor(const ManifoldState& state, const ScalarField& u) {
  check_field(state, u);
  require_grid(state, "hessian_tensor");
  const int n = state.resolution();
  const double h = state.spacing();
  SymTensorField t;
  t.backend = state.backend();
  t.values.resize(state.samples());
  const auto& s = u.samples;
  if (state.backend() == Backend::conformal_torus) {
    const auto& phi = state.conformal().phi;
    auto at = [&](const std::vector<double>& f, int i, int j) {
      return f[wrap(j, n) * n + wrap(i, n)];
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double c = at(s, i, j);
        const double ux = (at(s, i + 1, j) - at(s, i - 1, j)) / (2.0 * h);
        const double uy = (at(s, i, j + 1) - at(s, i, j - 1)) / (2.0 * h);
        const double uxx = (at(s, i + 1, j) - 2.0 * c + at(s, i - 1, j)) / (h * h);
        const double uyy = (at(s, i, j + 1) - 2.0 * c + at(s, i, j - 1)) / (h * h);
        const double uxy = (at(s, i + 1, j + 1) - at(s, i + 1, j - 1) - at(s, i - 1, j + 1) +
                            at(s, i - 1, j - 1)) /
                           (4.0 * h * h);
        const double px = (at(phi, i + 1, j) - at(phi, i - 1, j)) / (2.0 * h);
        const double py = (at(phi, i, j + 1) - at(phi, i, j - 1)) / (2.0 * h);
        // Γ^k_ij = δ_ik φ_j + δ_jk φ_i - δ_ij φ_k
        auto& out = t.values[static_cast<std::size_t>(j) * n + i];
        out.xx = uxx - (px * ux - py * uy);
        out.yy = uyy - (py * uy - px * ux);
        out.xy = uxy - (px * uy + py * ux);
      }
    return t;
  }
  const auto& w = state.warped();
  for (int i = 0; i < n; ++i) {
    const std::size_t p = static_cast<std::size_t>(i), ip = wrap(i + 1, n), im = wrap(i - 1, n);
    const double du = (s[ip] - s[im]) / (2.0 * h);
    const double d2u = (s[ip] - 2.0 * s[p] + s[im]) / (h * h);
    const double da = (w.a[ip] - w.a[im]) / (2.0 * h);
    const double db = (w.b[ip] - w.b[im]) / (2.0 * h);
    // Γ^x_xx = a'/a, Γ^x_yy = -b b'/a²
    t.values[p].xx = d2u - (da / w.a[p]) * du;
    t.values[p].yy = (w.b[p] * db / (w.a[p] * w.a[p])) * du;
    t.values[p].xy = 0.0;
  }
  return t;
}

SymTensorField ricci_tensor(const ManifoldState& state) {
  SymTensorField t;
  t.backend = state.backend();
  if (state.backend() == Backend::sphere) {
    const auto& s = state.sphere();
    t.metric_multiple = (s.dim - 1) / s.radius_sq;
    return t;
  }
  const auto r = scalar_curvature(state);
  t.values.resize(state.samples());
  if (state.backend() == Backend::conformal_torus) {
    const auto& phi = state.conformal().phi;
    for (std::size_t p = 0; p < t.values.size(); ++p) {
      const double k = 0.5 * r.samples[p] * std::exp(2.0 * phi[p]);
      t.values[p] = {k, 0.0, k};
    }
  } else {
    const auto& w = state.warped();
    for (std::size_t p = 0; p < t.values.size(); ++p) {
      const double k = 0.5 * r.samples[p];
      t.values[p] = {k * w.a[p] * w.a[p], 0.0, k * w.b[p] * w.b[p]};
    }
  }
  return t;
}

SymTensorField dphi_tensor(const ManifoldState& state) {
  SymTensorField t;
  t.backend = state.backend();
  if (state.backend() == Backend::sphere) return t;
  t.values.assign(state.samples(), Sym2{});
  if (state.backend() == Backend::warped_torus) {
    const auto& w = state.warped();
    const int n = w.n;
    const double h = state.spacing();
    for (int i = 0; i < n; ++i) {
      const double d = (w.phi_map[wrap(i + 1, n)] - w.phi_map[wrap(i - 1, n)]) / (2.0 * h);
      t.values[static_cast<std::size_t>(i)].xx = d * d;
    }
  }
  return t;
}

std::vector<double> max_relative_eigenvalue(const ManifoldState& state, const SymTensorField& t) {
  if (state.backend() == Backend::sphere) return {t.metric_multiple};
  std::vector<double> out(t.values.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto m = relative_to_metric(state, t.values[p], p);
    out[p] = sym_eigen(m.xx, m.xy, m.yy).second;
  }
  return out;
}

std::vector<double> min_relative_eigenvalue(const ManifoldState& state, const SymTensorField& t) {
  if (state.backend() == Backend::sphere) return {t.metric_multiple};
  std::vector<double> out(t.values.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto m = relative_to_metric(state, t.values[p], p);
    out[p] = sym_eigen(m.xx, m.xy, m.yy).first;
  }
  return out;
}

double hessian_energy(const ManifoldState& state, const ScalarField& u,
                      const QuadratureWeights& weights) {
  check_field(state, u);
  check_weights(state, weights);
  require_resolved(state, u, "hessian_energy");
  if (state.backend() == Backend::sphere) {
    // ∫|∇²u|² = ∫(Δu)² - Ric(∇u,∇u) mode by mode on the Einstein sphere.
    const auto& s = state.sphere();
    const double ric = (s.dim - 1) / s.radius_sq;
    double acc = 0.0;
    for (const auto& m : u.modes) {
      const double lam = sphere_eigenvalue(s.dim, s.radius_sq, m.degree);
      acc += m.coeff * m.coeff * (lam * lam - ric * lam) * weights.mass /
             sphere_multiplicity(s.dim, m.degree);
    }
    return acc;
  }
  const auto hess = hessian_tensor(state, u);
  std::vector<double> norm_sq(hess.values.size());
  for (std::size_t p = 0; p < norm_sq.size(); ++p) {
    const auto m = relative_to_metric(state, hess.values[p], p);
    norm_sq[p] = m.xx * m.xx + 2.0 * m.xy * m.xy + m.yy * m.yy;
  }
  return kernels::weighted_sum(norm_sq, weights.w);
}

void require_resolved(const ManifoldState& state, const ScalarField& u, const char* what) {
  check_field(state, u);
  if (state.backend() == Backend::sphere) {
    const int limit = state.sphere().band_limit;
    for (const auto& m : u.modes)
      if (m.degree > limit && m.coeff != 0.0)
        throw ResolutionError(std::string(what) + ": degree " + std::to_string(m.degree) +
                              " exceeds band limit " + std::to_string(limit));
    return;
  }
  // For a single Fourier mode of wavenumber k, ‖δ²u‖ / ‖δu‖ = 2 sin(πk/n);
  // reject fields whose energy-weighted wavenumber exceeds n/4.
  const int n = state.resolution();
  const auto& s = u.samples;
  auto axis_ratio = [&](auto index) {
    double d1 = 0.0, d2 = 0.0;
    const long len = n;
    const long lines = static_cast<long>(s.size()) / len;
    for (long line = 0; line < lines; ++line)
      for (long i = 0; i < len; ++i) {
        const double c = s[index(line, i)];
        const double f = s[index(line, static_cast<long>(wrap(i + 1, len)))];
        const double b = s[index(line, static_cast<long>(wrap(i - 1, len)))];
        d1 += (f - c) * (f - c);
        d2 += (f - 2.0 * c + b) * (f - 2.0 * c + b);
      }
    return d1 > 0.0 ? std::sqrt(d2 / d1) : 0.0;
  };
  const double limit = std::sqrt(2.0) * (1.0 + 1e-9);
  double ratio = 0.0;
  if (state.backend() == Backend::conformal_torus) {
    const auto nn = static_cast<std::size_t>(n);
    ratio = std::max(
        axis_ratio([&](long line, long i) { return static_cast<std::size_t>(line) * nn + static_cast<std::size_t>(i); }),
        axis_ratio([&](long line, long i) { return static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(line); }));
  } else {
    ratio = axis_ratio([](long, long i) { return static_cast<std::size_t>(i); });
  }
  if (ratio > limit)
    throw ResolutionError(std::string(what) +
                          ": field is under-resolved (energy above a quarter of the grid "
                          "wavenumber range)");
}

double laplacian_spectral_bound(const ManifoldState& state) {
  if (state.backend() == Backend::sphere) return 0.0;
  const auto c = detail::edge_coefficients(state);
  const auto vol = detail::cell_volume(state);
  const int n = state.resolution();
  double bound = 0.0;
  if (state.backend() == Backend::conformal_torus) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t p = static_cast<std::size_t>(j) * n + i;
        const double sum = c.cx[p] + c.cx[static_cast<std::size_t>(j) * n + wrap(i - 1, n)] +
                           c.cy[p] + c.cy[wrap(j - 1, n) * n + i];
        bound = std::max(bound, 2.0 * sum / vol[p]);
      }
  } else {
    for (int i = 0; i < n; ++i) {
      const std::size_t p = static_cast<std::size_t>(i);
      bound = std::max(bound, 2.0 * (c.cx[p] + c.cx[wrap(i - 1, n)]) / vol[p]);
    }
  }
  return bound;
}

}  // namespace geoflow
