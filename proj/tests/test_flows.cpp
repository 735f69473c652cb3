#include <doctest.h>

#include <cmath>

#include "geoflow/errors.hpp"
#include "geoflow/flows.hpp"
#include "helpers.hpp"

using namespace geoflow;
using namespace testing;

namespace {

ManifoldState bumpy_conformal(int n) {
  return conformal_state(n, [](double x, double y) {
    return 0.1 * std::sin(kTwoPi * x) + 0.05 * std::cos(kTwoPi * y);
  });
}

ManifoldState bumpy_warped(int n) {
  return warped_state(
      n, [](double x) { return 1.0 + 0.1 * std::sin(kTwoPi * x); },
      [](double x) { return 1.0 + 0.1 * std::cos(kTwoPi * x); },
      [](double x) { return 0.1 * std::sin(kTwoPi * x); });
}

double total_volume(const ManifoldState& s) {
  double v = 0.0;
  for (double w : volume_weights(s).w) v += w;
  return v;
}

}  // namespace

TEST_CASE("schedule values and integrals") {
  const Schedule c{2.0, 0.0};
  CHECK(c(5.0) == 2.0);
  CHECK(c.integral(1.0, 3.0) == doctest::Approx(4.0));
  const Schedule e{2.0, 3.0};
  CHECK(e(1.0) == doctest::Approx(2.0 * std::exp(-3.0)));
  CHECK(e.integral(0.0, 1.0) == doctest::Approx(2.0 * (1.0 - std::exp(-3.0)) / 3.0));
  CHECK(e.non_increasing());
  CHECK_FALSE(Schedule{1.0, -1.0}.non_increasing());
  CHECK(Schedule{}.is_zero());
}

TEST_CASE("the round sphere shrinks in closed form") {
  for (int dim : {2, 3, 5}) {
    const auto traj = evolve_ricci(sphere_state(dim, 2.0), 0.1, 64);
    REQUIRE(traj.states.size() == 65);
    for (const auto& s : traj.states)
      CHECK(std::abs(s.sphere().radius_sq - (2.0 - 2.0 * (dim - 1) * s.time)) <= 1e-14);
    const auto mid = state_at_midpoint(traj, 10);
    CHECK(std::abs(mid.sphere().radius_sq - (2.0 - 2.0 * (dim - 1) * mid.time)) <= 1e-14);
  }
  CHECK_THROWS_AS(evolve_ricci(sphere_state(2, 1.0), 0.49, 64), DomainError);
}

TEST_CASE("Ricci-harmonic flow with alpha = 0 is bitwise Ricci flow") {
  const auto s0 = bumpy_warped(32);
  const auto rf = evolve_ricci(s0, 2e-3, 40);
  const auto rhf = evolve_ricci_harmonic(s0, Schedule{0.0, 0.0}, 2e-3, 40);
  for (std::size_t k = 0; k < rf.states.size(); ++k) {
    CHECK(rf.states[k].warped().a == rhf.states[k].warped().a);
    CHECK(rf.states[k].warped().b == rhf.states[k].warped().b);
    CHECK(rf.states[k].warped().phi_map == rhf.states[k].warped().phi_map);
  }
}

TEST_CASE("flow argument errors") {
  CHECK_THROWS_AS(evolve_ricci_harmonic(flat_torus(16), Schedule{1.0, 0.0}, 1e-3, 16), BackendMismatch);
  CHECK_THROWS_AS(evolve_ricci_harmonic(bumpy_warped(16), Schedule{-1.0, 0.0}, 1e-3, 16), DomainError);
  CHECK_THROWS_AS(evolve_ricci(bumpy_conformal(64), 0.01, 16), StepError);
  CHECK_THROWS_AS(evolve_ricci(bumpy_conformal(16), -1.0, 16), DomainError);
}

TEST_CASE("flat data is a fixed point") {
  const auto traj = evolve_ricci(flat_torus(16), 1e-3, 20);
  for (double v : traj.states.back().conformal().phi) CHECK(v == 0.0);
  const auto w = evolve_ricci(warped_state(16, [](double) { return 1.3; }, [](double) { return 0.7; },
                                           [](double) { return 0.0; }),
                              1e-3, 20);
  for (double v : w.states.back().warped().a) CHECK(v == 1.3);
}

TEST_CASE("Ricci flow on the torus preserves total area") {
  // d/dt Vol = -∫R dμ, which vanishes by Gauss-Bonnet.
  const auto traj = evolve_ricci(bumpy_conformal(32), 4e-3, 64);
  const double v0 = total_volume(traj.states.front());
  for (const auto& s : traj.states) CHECK(std::abs(total_volume(s) - v0) <= 1e-12 * v0);
}

TEST_CASE("Hermite midpoint agrees with a half-step integration") {
  const auto s0 = bumpy_conformal(24);
  const auto coarse = evolve_ricci(s0, 2e-3, 20);
  const auto fine = evolve_ricci(s0, 2e-3, 40);
  const auto mid = state_at_midpoint(coarse, 7);
  CHECK(mid.time == doctest::Approx(fine.states[15].time));
  CHECK(max_abs_diff(mid.conformal().phi, fine.states[15].conformal().phi) <= 1e-9);
}

TEST_CASE("volume-form residual converges at second order") {
  std::vector<double> err;
  for (int l = 0; l < 3; ++l) {
    const int n = 16 << l;
    const auto traj = evolve_ricci(bumpy_conformal(n), 2e-3, 20 << (2 * l));
    err.push_back(check_volume_evolution(traj).max_relative);
  }
  const auto wtraj = evolve_ricci_harmonic(bumpy_warped(64), Schedule{1.0, 0.0}, 2e-3, 64);
  CHECK(check_volume_evolution(wtraj).max_relative < 1e-3);
  MESSAGE("volume residuals " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("trajectory metadata") {
  const auto traj = evolve_ricci_harmonic(bumpy_warped(32), Schedule{1.0, 2.0}, 1e-3, 32);
  CHECK(traj.kind == FlowKind::ricci_harmonic);
  CHECK(traj.steps == 32);
  CHECK(traj.dt == doctest::Approx(1e-3 / 32));
  CHECK(traj.cfl_ratio > 0.0);
  CHECK(traj.cfl_ratio <= 1.0);
  CHECK(traj.rates.size() == traj.states.size());
  CHECK(traj.alpha_at(0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(traj.states.back().time == 1e-3);
  CHECK(std::string(to_string(FlowKind::ricci_harmonic)) == "ricci-harmonic");
}
