#include <doctest.h>

#include <cmath>

#include "geoflow/errors.hpp"
#include "geoflow/estimates.hpp"
#include "helpers.hpp"

using namespace geoflow;
using namespace testing;

namespace {

struct SphereRun {
  Trajectory traj;
  WeightSystem ws;
  HeatSolution heat;
};

SphereRun sphere_run(bool positive) {
  SphereRun r;
  r.traj = evolve_ricci(sphere_state(2, 1.0), 0.35, 256);
  r.ws = solve_conjugate_backward(r.traj, terminal_density(r.traj.states.back(), {}), 1.0);
  r.heat = solve_heat(r.traj, ScalarField::spectral({{0, 1.0}, {1, 0.1}}), Schedule{}, positive);
  return r;
}

}  // namespace

TEST_CASE("gradient estimates hold for a positive solution on the shrinking sphere") {
  const auto run = sphere_run(true);
  const double A = run.heat.bounds.A;
  const auto ham = hamilton_gradient_check(run.traj, run.heat, A, 0.35, 1e-8);
  CHECK(ham.pass);
  CHECK(ham.worst >= -1e-8);
  const double kb = 1.0 / (1.0 - 2.0 * 0.35);
  const auto ly = li_yau_check(run.traj, run.heat, kb, 2, LiYauVariant::ricci, 0.0, 0.35, 1e-8);
  CHECK(ly.pass);
  const auto hs = hamilton_slack_series(run.traj, run.heat, A);
  const auto ls = li_yau_slack_series(run.traj, run.heat, kb, 2, 2.0);
  REQUIRE(hs.size() == run.traj.states.size());
  REQUIRE(ls.size() == run.traj.states.size());
  CHECK_FALSE(present(ls.front()));  // t = 0 is outside the Li-Yau range
  for (std::size_t k = 1; k < ls.size(); ++k) CHECK(ls[k] >= -1e-8);
  // An undersized A breaks Hamilton's bound.
  CHECK_FALSE(hamilton_gradient_check(run.traj, run.heat, 0.95 * A, 0.35, 1e-8).pass);
}

TEST_CASE("gradient estimates need positivity metadata") {
  const auto run = sphere_run(false);
  CHECK_THROWS_AS(hamilton_gradient_check(run.traj, run.heat, 1.1, 0.35, 1e-8), HypothesisError);
  CHECK_THROWS_AS(li_yau_check(run.traj, run.heat, 1.0, 2, LiYauVariant::ricci, 0.0, 0.35, 1e-8),
                  HypothesisError);
}

TEST_CASE("curvature band checks") {
  const auto run = sphere_run(true);
  BandParams p;
  p.t1 = 0.35;
  p.k_bound = 1.0 / 0.3;
  p.tol = 1e-12;
  CHECK(measure_ricci_sup(run.traj, 0.0, 0.35) == doctest::Approx(1.0 / 0.3));
  CHECK(hypothesis_band_check(run.traj, run.ws, BandKind::ric_nonneg_upper, p).pass);
  p.k_bound = 2.0;
  CHECK_FALSE(hypothesis_band_check(run.traj, run.ws, BandKind::ric_nonneg_upper, p).pass);

  // A curved torus always has negative curvature somewhere.
  const auto s0 = conformal_state(32, [](double x, double) { return 0.1 * std::sin(kTwoPi * x); });
  const auto traj = evolve_ricci(s0, 1e-3, 64);
  const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), {}), 1.0);
  p.t1 = 1e-3;
  p.k_bound = 1e3;
  const auto band = hypothesis_band_check(traj, ws, BandKind::ric_nonneg_upper, p);
  CHECK_FALSE(band.pass);
  CHECK(band.note.find("rules out Ric >= 0") != std::string::npos);
  CHECK(measure_dphi_constant(traj, 1e-3) == 0.0);
}

TEST_CASE("map-field and alpha hypotheses on the warped torus") {
  const auto s0 = warped_state(32, [](double) { return 1.0; }, [](double) { return 1.0; },
                               [](double x) { return 0.1 * std::sin(kTwoPi * x); });
  const auto traj = evolve_ricci_harmonic(s0, Schedule{1.0, 0.0}, 1e-3, 32);
  const auto ws = solve_conjugate_backward(traj, terminal_density(traj.states.back(), {}), 1.0);
  BandParams p;
  p.t1 = 1e-3;
  p.c_dphi = measure_dphi_constant(traj, 1e-3);
  CHECK(p.c_dphi > 0.0);
  CHECK(hypothesis_band_check(traj, ws, BandKind::dphi_band, p).pass);
  p.c_dphi *= 0.5;
  CHECK_FALSE(hypothesis_band_check(traj, ws, BandKind::dphi_band, p).pass);
  CHECK(hypothesis_band_check(traj, ws, BandKind::alpha_monotone, p).pass);
  const auto growing = evolve_ricci_harmonic(s0, Schedule{1.0, -5.0}, 1e-3, 32);
  CHECK_FALSE(hypothesis_band_check(growing, ws, BandKind::alpha_monotone, p).pass);
  CHECK_THROWS_AS(hypothesis_band_check(traj, ws, BandKind::ricf_upper, p), HypothesisError);
  CHECK(std::string(to_string(BandKind::dphi_band)) == "dphi-band");
}
