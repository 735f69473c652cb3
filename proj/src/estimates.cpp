#include "geoflow/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geoflow/errors.hpp"
#include "geoflow/kernels.hpp"

namespace geoflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinU = 1e-12;

struct Pointwise {
  std::vector<double> u, grad_sq, dudt;
};

Pointwise pointwise(const ManifoldState& s, const ScalarField& u, double a) {
  Pointwise out;
  if (s.backend() == Backend::sphere) {
    const auto theta = theta_grid(kThetaSamples - 1);
    auto z = evaluate_zonal(s, u, theta);
    out.u = std::move(z.u);
    out.grad_sq = std::move(z.grad_sq);
    out.dudt.resize(out.u.size());
    for (std::size_t i = 0; i < out.u.size(); ++i) out.dudt[i] = z.lap[i] + a * out.u[i];
    return out;
  }
  out.u = u.samples;
  out.grad_sq = gradient_norm_sq(s, u).samples;
  out.dudt = heat_rate(s, u, a).samples;
  return out;
}

void require_positivity_metadata(const HeatSolution& heat) {
  if (!heat.positivity_requested)
    throw HypothesisError("gradient estimates need a positive solution (positivity metadata)");
}

double hamilton_at(double u, double g, double t, double A) {
  return u * u * std::log(A / u) - t * g;
}

double li_yau_at(double u, double g, double dudt, double t, double leading, double kn) {
  if (u < kMinU) throw DomainError("Li-Yau check divides by u below 1e-12");
  return leading / (2.0 * t) * u + kn * u - (g / u - dudt);
}

void record(SlackReport& r, double slack, double t, std::size_t p) {
  if (slack < r.worst) {
    r.worst = slack;
    r.t_worst = t;
    r.point = p;
  }
}

double leading_coefficient(const Trajectory& traj, int dim, LiYauVariant variant, double c_dphi) {
  if (variant == LiYauVariant::ricci) return dim;
  return 0.5 * dim + 4.0 * dim * c_dphi * traj.alpha_at(0.0);
}

}  // namespace

const char* to_string(BandKind k) {
  switch (k) {
    case BandKind::ric_nonneg_upper:
      return "ric-nonneg-upper";
    case BandKind::dphi_band:
      return "dphi-band";
    case BandKind::alpha_monotone:
      return "alpha-monotone";
    case BandKind::ricf_upper:
      return "ricf-upper";
  }
  return "unknown";
}

SlackReport hamilton_gradient_check(const Trajectory& traj, const HeatSolution& heat, double A,
                                    double t_max, double tol) {
  require_positivity_metadata(heat);
  SlackReport r;
  r.id = "hamilton";
  r.worst = kInf;
  r.tolerance = tol;
  r.hypotheses = {"positive-solution"};
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    if (s.time > t_max) break;
    const auto pw = pointwise(s, heat.u[k], heat.a(s.time));
    for (std::size_t p = 0; p < pw.u.size(); ++p) {
      if (!(pw.u[p] > 0.0))
        throw PositivityError("Hamilton check met u <= 0 at t = " + std::to_string(s.time));
      record(r, hamilton_at(pw.u[p], pw.grad_sq[p], s.time, A), s.time, p);
    }
  }
  r.pass = r.worst >= -tol;
  return r;
}

SlackReport li_yau_check(const Trajectory& traj, const HeatSolution& heat, double k_bound, int dim,
                         LiYauVariant variant, double c_dphi, double t_max, double tol) {
  require_positivity_metadata(heat);
  SlackReport r;
  r.id = variant == LiYauVariant::ricci ? "li-yau" : "li-yau-rhf";
  r.worst = kInf;
  r.tolerance = tol;
  r.hypotheses = {"positive-solution", "ric-nonneg-upper"};
  if (variant == LiYauVariant::ricci_harmonic) {
    r.hypotheses.emplace_back("dphi-band");
    r.hypotheses.emplace_back("alpha-monotone");
  }
  const double leading = leading_coefficient(traj, dim, variant, c_dphi);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    if (s.time > t_max) break;
    if (!(s.time > 0.0)) continue;
    const auto pw = pointwise(s, heat.u[k], heat.a(s.time));
    for (std::size_t p = 0; p < pw.u.size(); ++p)
      record(r, li_yau_at(pw.u[p], pw.grad_sq[p], pw.dudt[p], s.time, leading, k_bound * dim),
             s.time, p);
  }
  r.note = "leading coefficient " + std::to_string(leading);
  r.pass = r.worst >= -tol;
  return r;
}

std::vector<double> hamilton_slack_series(const Trajectory& traj, const HeatSolution& heat,
                                          double A) {
  std::vector<double> out(traj.states.size(), kAbsent);
  if (!heat.positivity_requested) return out;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    const auto pw = pointwise(s, heat.u[k], heat.a(s.time));
    double worst = kInf;
    for (std::size_t p = 0; p < pw.u.size(); ++p)
      if (pw.u[p] > 0.0) worst = std::min(worst, hamilton_at(pw.u[p], pw.grad_sq[p], s.time, A));
    out[k] = worst;
  }
  return out;
}

std::vector<double> li_yau_slack_series(const Trajectory& traj, const HeatSolution& heat,
                                        double k_bound, int dim, double leading) {
  std::vector<double> out(traj.states.size(), kAbsent);
  if (!heat.positivity_requested) return out;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    if (!(s.time > 0.0)) continue;
    const auto pw = pointwise(s, heat.u[k], heat.a(s.time));
    double worst = kInf;
    for (std::size_t p = 0; p < pw.u.size(); ++p)
      if (pw.u[p] >= kMinU)
        worst = std::min(worst, li_yau_at(pw.u[p], pw.grad_sq[p], pw.dudt[p], s.time, leading,
                                          k_bound * dim));
    out[k] = worst;
  }
  return out;
}

double measure_dphi_constant(const Trajectory& traj, double t1) {
  double c = 0.0;
  for (const auto& s : traj.states) {
    if (s.time > t1) break;
    if (!(s.time > 0.0) || s.backend() != Backend::warped_torus) continue;
    const auto e = map_energy_density(s);
    c = std::max(c, s.time * *std::max_element(e.samples.begin(), e.samples.end()));
  }
  return c;
}

double measure_ricci_sup(const Trajectory& traj, double t0, double t1) {
  double sup = -kInf;
  for (const auto& s : traj.states) {
    if (s.time < t0 - 1e-15 || s.time > t1 + 1e-15) continue;
    const auto eig = max_relative_eigenvalue(s, ricci_tensor(s));
    sup = std::max(sup, *std::max_element(eig.begin(), eig.end()));
  }
  return sup;
}

GaussBonnet gauss_bonnet(const ManifoldState& state) {
  if (state.backend() == Backend::sphere)
    throw UnsupportedRepresentation("Gauss-Bonnet summary is for the torus backends");
  auto r = scalar_curvature(state);
  for (auto& v : r.samples) v *= 0.5;
  GaussBonnet g;
  g.total = integrate(state, r, volume_weights(state));
  const auto [lo, hi] = std::minmax_element(r.samples.begin(), r.samples.end());
  g.min_gauss = *lo;
  g.max_gauss = *hi;
  return g;
}

SlackReport hypothesis_band_check(const Trajectory& traj, const WeightSystem& ws, BandKind kind,
                                  const BandParams& params) {
  SlackReport r;
  r.id = to_string(kind);
  r.worst = kInf;
  r.tolerance = params.tol;
  auto in_window = [&](double t) {
    return t >= params.t0 - 1e-15 && t <= params.t1 + 1e-15;
  };
  switch (kind) {
    case BandKind::ric_nonneg_upper: {
      for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& s = traj.states[k];
        if (!in_window(s.time)) continue;
        const auto ric = ricci_tensor(s);
        const auto lo = min_relative_eigenvalue(s, ric);
        const auto hi = max_relative_eigenvalue(s, ric);
        for (std::size_t p = 0; p < lo.size(); ++p)
          record(r, std::min(lo[p], params.k_bound - hi[p]), s.time, p);
      }
      if (traj.backend() != Backend::sphere) {
        const auto gb = gauss_bonnet(traj.states.front());
        r.note = "torus total curvature " + std::to_string(gb.total) + ", min K " +
                 std::to_string(gb.min_gauss) +
                 (gb.min_gauss < -params.tol
                      ? "; zero total curvature with negative K somewhere rules out Ric >= 0"
                      : "; flat data satisfies Ric >= 0");
      }
      break;
    }
    case BandKind::dphi_band: {
      for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& s = traj.states[k];
        if (!(s.time > 0.0) || s.time > params.t1 + 1e-15) continue;
        const auto e = map_energy_density(s);
        for (std::size_t p = 0; p < e.samples.size(); ++p)
          record(r, params.c_dphi / s.time - e.samples[p], s.time, p);
      }
      r.note = "C_dphi " + std::to_string(params.c_dphi);
      break;
    }
    case BandKind::alpha_monotone: {
      for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const double t = traj.time(static_cast<int>(k));
        record(r, traj.alpha_at(t) - traj.alpha_at(traj.time(static_cast<int>(k) + 1)), t, 0);
      }
      if (traj.kind == FlowKind::ricci_harmonic && traj.alpha(0.0) < 0.0)
        record(r, traj.alpha(0.0), 0.0, 0);
      break;
    }
    case BandKind::ricf_upper: {
      if (params.records == nullptr) throw HypothesisError("ricf-upper needs frequency records");
      for (std::size_t k = 0; k < params.records->size(); ++k) {
        const auto& rec = (*params.records)[k];
        if (!present(rec.kappa) || !present(rec.s)) continue;
        record(r, rec.kappa / (2.0 * params.h(rec.t)) - rec.s, rec.t, k);
      }
      break;
    }
  }
  (void)ws;
  if (r.worst == kInf) r.worst = 0.0;
  r.pass = r.worst >= -params.tol;
  return r;
}

}  // namespace geoflow
