#include <doctest.h>

#include <random>
#include <vector>

#include "geoflow/kernels.hpp"

namespace k = geoflow::kernels;

namespace {

std::vector<double> noise(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

}  // namespace

TEST_CASE("parallel stencils reproduce the serial reference bit for bit") {
  for (int n : {4, 17, 64, 129}) {
    const std::size_t m = static_cast<std::size_t>(n) * n;
    const auto cx = noise(m, 1, 0.5, 2.0), cy = noise(m, 2, 0.5, 2.0);
    const auto u = noise(m, 3), v = noise(m, 4), w = noise(m, 5, 0.1, 1.0);
    std::vector<double> a(m), b(m);
    k::serial::divergence_2d(n, cx, cy, u, a);
    k::parallel::divergence_2d(n, cx, cy, u, b);
    CHECK(a == b);
    CHECK(k::serial::edge_form_2d(n, cx, cy, u, v) == k::parallel::edge_form_2d(n, cx, cy, u, v));
    CHECK(k::serial::weighted_dot(u, v, w) == k::parallel::weighted_dot(u, v, w));
    CHECK(k::serial::weighted_sum(u, w) == k::parallel::weighted_sum(u, w));
    std::vector<double> gx(m), gy(m), hx(m), hy(m);
    k::serial::centered_gradient_2d(n, u, gx, gy);
    k::parallel::centered_gradient_2d(n, u, hx, hy);
    CHECK(gx == hx);
    CHECK(gy == hy);
  }
  for (std::size_t n : {5u, 513u, 2000u}) {
    const auto c = noise(n, 6, 0.5, 2.0), u = noise(n, 7), v = noise(n, 8);
    std::vector<double> a(n), b(n);
    k::serial::divergence_1d(c, u, a);
    k::parallel::divergence_1d(c, u, b);
    CHECK(a == b);
    CHECK(k::serial::edge_form_1d(c, u, v) == k::parallel::edge_form_1d(c, u, v));
  }
}

TEST_CASE("divergence and edge form are adjoint") {
  const int n = 32;
  const std::size_t m = static_cast<std::size_t>(n) * n;
  const auto cx = noise(m, 11, 0.5, 2.0), cy = noise(m, 12, 0.5, 2.0);
  const auto u = noise(m, 13), v = noise(m, 14);
  std::vector<double> du(m), ones(m, 1.0);
  k::serial::divergence_2d(n, cx, cy, u, du);
  const double lhs = k::serial::weighted_dot(du, v, ones);
  const double rhs = -k::serial::edge_form_2d(n, cx, cy, u, v);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  // Constants are in the kernel.
  k::serial::divergence_2d(n, cx, cy, ones, du);
  for (double x : du) CHECK(x == 0.0);
}
