#include <doctest.h>

#include <cmath>

#include "geoflow/errors.hpp"
#include "geoflow/measures.hpp"
#include "helpers.hpp"

using namespace geoflow;
using namespace testing;

namespace {

ManifoldState bumpy_conformal(int n) {
  return conformal_state(n, [](double x, double y) {
    return 0.1 * std::sin(kTwoPi * x) + 0.05 * std::cos(kTwoPi * y);
  });
}

Trajectory short_conformal_run(int n) {
  const double rho = laplacian_spectral_bound(bumpy_conformal(n));
  const double t_end = 1e-3;
  const int steps = std::max(16, static_cast<int>(std::ceil(t_end * rho / 1.2)));
  return evolve_ricci(bumpy_conformal(n), t_end, steps);
}

double total(const QuadratureWeights& q) {
  if (q.backend == Backend::sphere) return q.mass;
  double s = 0.0;
  for (double w : q.w) s += w;
  return s;
}

}  // namespace

TEST_CASE("sphere conjugate heat kernel is uniform") {
  const auto traj = evolve_ricci(sphere_state(2, 1.0), 0.2, 64);
  const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), {}), 1.0);
  CHECK(ws.T == doctest::Approx(1.2));
  CHECK(ws.max_mass_drift <= 1e-10);
  for (std::size_t k = 0; k < ws.snaps.size(); ++k) {
    const auto& s = traj.states[k];
    CHECK(ws.snaps[k].K.mode(0) ==
          doctest::Approx(1.0 / sphere_volume(2, s.sphere().radius_sq)).epsilon(1e-14));
    CHECK(ws.snaps[k].tau == doctest::Approx(ws.T - s.time));
  }
  TerminalSpec bump;
  bump.kind = TerminalKind::bump;
  CHECK_THROWS_AS(terminal_density(traj.states.back(), bump), UnsupportedRepresentation);
}

TEST_CASE("grid conjugate heat measure keeps unit mass and stays positive") {
  const auto traj = short_conformal_run(32);
  TerminalSpec bump;
  bump.kind = TerminalKind::bump;
  bump.width = 0.15;
  const auto K1 = terminal_density(traj.states.back(), bump);
  CHECK(integrate(traj.states.back(), K1, volume_weights(traj.states.back())) ==
        doctest::Approx(1.0).epsilon(1e-13));
  const auto ws = solve_conjugate_backward(traj, K1, 1.0);
  CHECK(ws.max_mass_drift <= 1e-10);
  for (const auto& w : ws.snaps) {
    CHECK(std::abs(total(w.dV) - 1.0) <= 1e-10);
    for (double k : w.K.samples) CHECK(k > 0.0);
  }
  // Backward diffusion flattens the bump: K(0) is closer to uniform than K(t_end).
  auto spread = [](const ScalarField& K) {
    const auto [lo, hi] = std::minmax_element(K.samples.begin(), K.samples.end());
    return *hi - *lo;
  };
  CHECK(spread(ws.snaps.front().K) < spread(ws.snaps.back().K));
}

TEST_CASE("potential and density are consistent") {
  const auto s = flat_torus(8);
  const auto K = constant_field(s, 0.3);
  const double tau = 1.7;
  const auto f = potential_from_density(K, tau, 2);
  for (double v : f.samples)
    CHECK(std::pow(4.0 * std::numbers::pi * tau, -1.0) * std::exp(-v) == doctest::Approx(0.3));
}

TEST_CASE("drift Laplacian is self-adjoint in L2(dV) on a 20-pair basis") {
  const auto traj = short_conformal_run(32);
  TerminalSpec bump;
  bump.kind = TerminalKind::bump;
  const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), bump), 1.0);
  const auto& s = traj.states.front();
  const auto& w = ws.snaps.front();
  double worst = 0.0;
  for (unsigned pair = 0; pair < 20; ++pair) {
    const auto u = random_smooth(s, 2 * pair + 1), v = random_smooth(s, 2 * pair + 2);
    const double uv = inner(s, drift_laplacian_density(s, w.K, u), v, w.dV);
    const double vu = inner(s, u, drift_laplacian_density(s, w.K, v), w.dV);
    worst = std::max(worst, std::abs(uv - vu) / std::max(1.0, std::abs(uv)));
    // ∫|∇u|² dV = -∫u Δ_f u dV.
    const double dir = weighted_dirichlet(s, w.K, u, w.dV);
    CHECK(dir == doctest::Approx(-inner(s, u, drift_laplacian_density(s, w.K, u), w.dV)).epsilon(1e-12));
  }
  CHECK(worst <= 1e-12);
  // The f-form and K-form operators coincide.
  const auto u = random_smooth(s, 99);
  CHECK(max_abs_diff(drift_laplacian(s, w.f, u).samples, drift_laplacian_density(s, w.K, u).samples) <=
        1e-8);
}

TEST_CASE("potential equation residual is small and shrinks under refinement") {
  std::vector<double> res;
  for (int n : {16, 32}) {
    const auto traj = short_conformal_run(n);
    TerminalSpec bump;
    bump.kind = TerminalKind::bump;
    bump.width = 0.3;
    const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), bump), 1.0);
    res.push_back(potential_residual(traj, ws).max_abs);
  }
  CHECK(res[1] < res[0] / 3.0);
}

TEST_CASE("Bakry-Emery bound on model geometries") {
  const auto sph = sphere_state(3, 2.0);
  const auto f = potential_from_density(constant_field(sph, 1.0 / sphere_volume(3, 2.0)), 1.0, 3);
  CHECK(bakry_emery_bound(sph, f, 0.0, false).s == doctest::Approx(1.0));
  const auto flat = flat_torus(16);
  CHECK(bakry_emery_bound(flat, constant_field(flat, 2.0), 0.0, false).s == doctest::Approx(0.0));
  // -α dφ⊗dφ lowers the bound.
  const auto w = warped_state(32, [](double) { return 1.0; }, [](double) { return 1.0; },
                              [](double x) { return 0.2 * std::sin(kTwoPi * x); });
  const auto fw = constant_field(w, 0.0);
  const auto plain = bakry_emery_bound(w, fw, 1.0, false);
  const auto corrected = bakry_emery_bound(w, fw, 1.0, true);
  CHECK(corrected.s <= plain.s + 1e-15);
}

TEST_CASE("integral Bochner identity on the conformal torus") {
  const auto traj = short_conformal_run(64);
  const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), {}), 1.0);
  const auto& s = traj.states.front();
  const auto u = sample(s, [](double x, double y) {
    return std::cos(kTwoPi * x) + 0.5 * std::sin(kTwoPi * y);
  });
  const auto b = bochner_defect(s, ws.snaps.front().K, u);
  CHECK(b.hessian > 0.0);
  CHECK(b.relative <= 5e-3);
  CHECK_THROWS_AS(bochner_defect(sphere_state(), ScalarField::spectral({{0, 1.0}}),
                                 ScalarField::spectral({{1, 1.0}})),
                  UnsupportedRepresentation);
}
