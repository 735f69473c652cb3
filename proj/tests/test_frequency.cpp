#include <doctest.h>

#include <cmath>

#include "geoflow/errors.hpp"
#include "geoflow/frequency.hpp"
#include "helpers.hpp"

using namespace geoflow;
using namespace testing;

namespace {

WeightSnapshot uniform_weights(const ManifoldState& s) {
  const auto dmu = volume_weights(s);
  double vol = dmu.mass;
  if (s.backend() != Backend::sphere) {
    vol = 0.0;
    for (double w : dmu.w) vol += w;
  }
  WeightSnapshot w;
  w.t = s.time;
  w.tau = 1.0;
  w.K = constant_field(s, 1.0 / vol);
  w.f = potential_from_density(w.K, w.tau, s.dimension());
  w.dV = dmu;
  for (auto& x : w.dV.w) x /= vol;
  w.dV.mass = 1.0;
  return w;
}

double discrete_lambda(int n, int k = 1) {
  const double h = 1.0 / n;
  return 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * k * h), 2);
}

}  // namespace

TEST_CASE("h schedules") {
  HSchedule c;
  c.c0 = -2.0;
  CHECK(c(3.0) == -2.0);
  CHECK(c.derivative(3.0) == 0.0);
  CHECK(c.sign(0.0) == -1);
  HSchedule b;
  b.kind = HKind::backwards_time;
  b.T = 2.0;
  CHECK(b(0.5) == doctest::Approx(-1.5));
  CHECK(b.derivative(0.5) == doctest::Approx(1.0));
  CHECK_NOTHROW(b.validate(0.0, 1.9));
  CHECK_THROWS_AS(b.validate(0.0, 2.5), DomainError);
  HSchedule l;
  l.kind = HKind::linear;
  l.c0 = -1.0;
  l.c1 = 4.0;
  CHECK_THROWS_AS(l.validate(0.0, 0.5), DomainError);
  CHECK_NOTHROW(l.validate(0.0, 0.2));
  CHECK(choose_kappa(0.5, -1.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(choose_kappa(0.5, 0.0), DomainError);
}

TEST_CASE("first eigenvalue on model spaces") {
  for (int dim : {2, 3}) {
    const auto s = sphere_state(dim, 0.7);
    CHECK(first_eigenvalue(s, uniform_weights(s)) == doctest::Approx(dim / 0.7));
  }
  const auto flat32 = flat_torus(32);
  CHECK(first_eigenvalue(flat32, uniform_weights(flat32)) ==
        doctest::Approx(discrete_lambda(32)).epsilon(1e-10));
  const auto flat64 = flat_torus(64);
  CHECK(first_eigenvalue(flat64, uniform_weights(flat64)) ==
        doctest::Approx(discrete_lambda(64)).epsilon(1e-9));
  const auto w = warped_state(64, [](double) { return 2.0; }, [](double) { return 1.0; },
                              [](double) { return 0.0; });
  CHECK(first_eigenvalue(w, uniform_weights(w)) == doctest::Approx(discrete_lambda(64) / 4.0).epsilon(1e-10));
}

TEST_CASE("dense and sparse eigensolvers agree on a curved weighted grid") {
  const auto s = conformal_state(24, [](double x, double y) {
    return 0.15 * std::sin(kTwoPi * x) + 0.1 * std::cos(kTwoPi * (x + y));
  });
  auto w = uniform_weights(s);
  // Non-uniform density normalized against dμ.
  const auto dmu = volume_weights(s);
  double mass = 0.0;
  for (std::size_t p = 0; p < w.K.samples.size(); ++p) {
    const double x = double(p % 24) / 24.0;
    w.K.samples[p] = 1.0 + 0.3 * std::cos(kTwoPi * x);
    mass += w.K.samples[p] * dmu.w[p];
  }
  for (std::size_t p = 0; p < w.K.samples.size(); ++p) {
    w.K.samples[p] /= mass;
    w.dV.w[p] = w.K.samples[p] * dmu.w[p];
  }
  w.f = potential_from_density(w.K, w.tau, 2);
  const double dense = detail::first_eigenvalue_dense(s, w);
  const double sparse = detail::first_eigenvalue_sparse(s, w);
  CHECK(sparse == doctest::Approx(dense).epsilon(1e-9));
  CHECK(dense > 0.0);
}

TEST_CASE("I and D for a sphere mode") {
  const auto s = sphere_state(2, 1.0);
  const auto w = uniform_weights(s);
  const auto id = compute_I_D(s, w, ScalarField::spectral({{1, 2.0}}), -1.0);
  CHECK(id.I == doctest::Approx(4.0 / 3.0));
  CHECK(id.D == doctest::Approx(-2.0 * 4.0 / 3.0));
  auto shifted = w;
  shifted.t = 0.5;
  CHECK_THROWS_AS(compute_I_D(s, shifted, ScalarField::spectral({{1, 2.0}}), -1.0), DomainError);
}

TEST_CASE("normalizations") {
  std::vector<FrequencyRecord> recs(3);
  for (int i = 0; i < 3; ++i) {
    recs[i].t = 0.1 * (i + 1);
    recs[i].I = 1.0;
    recs[i].D = -2.0;
    recs[i].kappa = 0.0;
  }
  HSchedule h;
  normalize_frequency_kappa(recs, h, 0.1);
  for (const auto& r : recs) CHECK(r.U3 == doctest::Approx(-2.0));
  CHECK_THROWS_AS(normalize_frequency_harnack(recs, h, 1.0, 2, 1.0, 0.0, 0.1), HypothesisError);
  CHECK_THROWS_AS(normalize_frequency_harnack(recs, h, 1.0, 2, 0.5, 1.0, 0.1), HypothesisError);
  CHECK_THROWS_AS(normalize_frequency_harnack(recs, h, 1.0, 2, 2.0, 1.0, 0.0), HypothesisError);
  normalize_frequency_harnack(recs, h, 1.0, 2, 2.0, 1.0, 0.1);
  CHECK(recs[0].U4 == doctest::Approx(-2.0));
  // Positive exponent integrand with h < 0 makes U4 = e^{-E} D/I grow toward zero.
  CHECK(recs[2].U4 > recs[0].U4);
  recs[1].kappa = kAbsent;
  CHECK_THROWS_AS(normalize_frequency_kappa(recs, h, 0.1), HypothesisError);
  CHECK_THROWS_AS(ratio_lower_bound({recs[0]}, h, Schedule{}, 0.1, 0.2), DomainError);
}
