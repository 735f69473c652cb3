#include <doctest.h>

#include <cmath>

#include "geoflow/errors.hpp"
#include "geoflow/frequency.hpp"
#include "geoflow/heat.hpp"
#include "helpers.hpp"

using namespace geoflow;
using namespace testing;

TEST_CASE("zonal harmonics are normalized at the pole") {
  for (int dim : {2, 3, 4})
    for (int l = 0; l < 8; ++l) CHECK(zonal_harmonic(dim, l, 1.0) == doctest::Approx(1.0));
  const double x = 0.3;
  CHECK(zonal_harmonic(2, 1, x) == doctest::Approx(x));
  CHECK(zonal_harmonic(2, 2, x) == doctest::Approx(0.5 * (3 * x * x - 1)));
  // S³: Z_l(cos θ) = sin((l+1)θ) / ((l+1) sin θ).
  const double th = 0.7;
  for (int l = 0; l < 5; ++l)
    CHECK(zonal_harmonic(3, l, std::cos(th)) ==
          doctest::Approx(std::sin((l + 1) * th) / ((l + 1) * std::sin(th))));
}

TEST_CASE("pointwise zonal evaluation") {
  const auto s = sphere_state(2, 0.5);
  const auto u = ScalarField::spectral({{0, 1.0}, {1, 0.2}});
  const auto theta = theta_grid(8);
  REQUIRE(theta.size() == 9);
  CHECK(theta.front() == 0.0);
  CHECK(theta.back() == doctest::Approx(std::numbers::pi));
  const auto z = evaluate_zonal(s, u, theta);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double c = std::cos(theta[i]), sn = std::sin(theta[i]);
    CHECK(z.u[i] == doctest::Approx(1.0 + 0.2 * c));
    CHECK(z.grad_sq[i] == doctest::Approx(0.04 * sn * sn / 0.5).scale(1.0));
    CHECK(z.lap[i] == doctest::Approx(-sphere_eigenvalue(2, 0.5, 1) * 0.2 * c).scale(1.0));
  }
  const std::vector<double> bad{4.0};
  CHECK_THROWS_AS(evaluate_zonal(s, u, bad), DomainError);
  CHECK_THROWS_AS(evaluate_zonal(flat_torus(8), u, theta), BackendMismatch);
}

TEST_CASE("sphere heat solve tracks the closed form") {
  const auto traj = evolve_ricci(sphere_state(2, 1.0), 0.35, 256);
  const std::vector<Mode> modes{{0, 1.0}, {1, 1.0}, {2, 0.5}, {3, -0.2}};
  const Schedule a{0.3, 1.0};
  const auto heat = solve_heat(traj, ScalarField::spectral(modes), a);
  for (std::size_t k = 0; k < traj.states.size(); k += 32) {
    const auto exact = closed_form_sphere_solution(2, 1.0, modes, a, traj.states[k].time);
    for (const auto& m : exact)
      CHECK(heat.u[k].mode(m.degree) == doctest::Approx(m.coeff).epsilon(1e-9).scale(1.0));
  }
  CHECK_THROWS_AS(closed_form_sphere_solution(2, 1.0, modes, a, 0.6), DomainError);
}

TEST_CASE("flat heat solution converges to the closed form at second order") {
  std::vector<double> err;
  const double t_end = 2e-3;
  for (int l = 0; l < 3; ++l) {
    const int n = 16 << l;
    const auto s = flat_torus(n);
    const int steps = 16 << (2 * l);
    const auto traj = evolve_ricci(s, t_end, steps);
    auto u0 = sample(s, [](double x, double y) { return std::cos(kTwoPi * x) + std::sin(kTwoPi * 2 * y); });
    const auto heat = solve_heat(traj, u0, Schedule{});
    const auto exact = sample(s, [&](double x, double y) {
      return std::exp(-kTwoPi * kTwoPi * t_end) * std::cos(kTwoPi * x) +
             std::exp(-4.0 * kTwoPi * kTwoPi * t_end) * std::sin(kTwoPi * 2 * y);
    });
    err.push_back(max_abs_diff(heat.u.back().samples, exact.samples));
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
  CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("positivity bounds and violations") {
  const auto s = sphere_state();
  const auto b = initial_bounds(s, ScalarField::spectral({{0, 1.0}, {1, 0.1}}));
  CHECK(b.A == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(b.eta == doctest::Approx(0.9).epsilon(1e-12));
  const auto traj = evolve_ricci(s, 0.1, 32);
  CHECK_THROWS_AS(solve_heat(traj, ScalarField::spectral({{0, 0.5}, {1, 1.0}}), Schedule{}, true),
                  PositivityError);
  // A spatially constant potential only rescales u, so positivity survives any a(t).
  const auto flat = flat_torus(16);
  const auto ft = evolve_ricci(flat, 0.5, 2000);
  const auto bump = sample(flat, [](double x, double) { return 1.0 + 0.5 * std::cos(kTwoPi * x); });
  CHECK_NOTHROW(solve_heat(ft, bump, Schedule{-10.0, 0.0}, true));
  const auto crossing = sample(flat, [](double x, double) { return std::cos(kTwoPi * x); });
  CHECK_THROWS_AS(solve_heat(ft, crossing, Schedule{}, true), PositivityError);
}

TEST_CASE("I' = -(2/h) D + 2 a I along a conformal Ricci flow") {
  const auto s0 = conformal_state(32, [](double x, double y) {
    return 0.1 * std::sin(kTwoPi * x) + 0.05 * std::cos(kTwoPi * y);
  });
  const auto traj = evolve_ricci(s0, 1e-3, 64);
  const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), {}), 1.0);
  const Schedule a{0.5, 0.0};
  const auto heat = solve_heat(
      traj, sample(s0, [](double x, double y) { return std::cos(kTwoPi * x) + 0.3 * std::sin(kTwoPi * y); }), a);
  const double h = -1.0;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.states.size(); k += 7) {
    const auto im = compute_I_D(traj.states[k - 1], ws.snaps[k - 1], heat.u[k - 1], h);
    const auto ip = compute_I_D(traj.states[k + 1], ws.snaps[k + 1], heat.u[k + 1], h);
    const auto ik = compute_I_D(traj.states[k], ws.snaps[k], heat.u[k], h);
    const double dI = (ip.I - im.I) / (2.0 * traj.dt);
    const double rhs = -2.0 / h * ik.D + 2.0 * a(traj.states[k].time) * ik.I;
    worst = std::max(worst, std::abs(dI - rhs) / std::abs(rhs));
  }
  CHECK(worst <= 1e-4);
}
