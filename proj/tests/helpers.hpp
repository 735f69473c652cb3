#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "geoflow/geometry.hpp"

namespace testing {

using namespace geoflow;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline ManifoldState sphere_state(int dim = 2, double r2 = 1.0, int band = 32) {
  return ManifoldState{SphereSpectral{dim, r2, band}, 0.0};
}

inline ManifoldState conformal_state(int n, const std::function<double(double, double)>& phi) {
  ConformalTorus c;
  c.n = n;
  c.phi.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) c.phi[j * n + i] = phi(double(i) / n, double(j) / n);
  return ManifoldState{c, 0.0};
}

inline ManifoldState flat_torus(int n) {
  return conformal_state(n, [](double, double) { return 0.0; });
}

inline ManifoldState warped_state(int n, const std::function<double(double)>& a,
                                  const std::function<double(double)>& b,
                                  const std::function<double(double)>& phi) {
  WarpedTorus w;
  w.n = n;
  for (int i = 0; i < n; ++i) {
    const double x = double(i) / n;
    w.a.push_back(a(x));
    w.b.push_back(b(x));
    w.phi_map.push_back(phi(x));
  }
  return ManifoldState{w, 0.0};
}

// Smooth random trigonometric field with a fixed seed (low modes only).
inline ScalarField random_smooth(const ManifoldState& s, unsigned seed, int kmax = 3) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  struct T {
    int kx, ky;
    double a, b;
  };
  std::vector<T> terms;
  for (int kx = 0; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky) terms.push_back({kx, ky, U(rng), U(rng)});
  return sample(s, [&](double x, double y) {
    double v = 0.0;
    for (const auto& t : terms) {
      const double arg = kTwoPi * (t.kx * x + t.ky * y);
      v += t.a * std::cos(arg) + t.b * std::sin(arg);
    }
    return v;
  });
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing
