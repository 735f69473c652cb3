#include "geoflow/frequency.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geoflow/errors.hpp"
#include "geoflow/kernels.hpp"

namespace geoflow {

namespace {

constexpr std::size_t kDenseLimit = 1024;
constexpr int kBlock = 8;
constexpr double kShift = 1.0;
constexpr int kMaxIterations = 2000;

struct Edge {
  std::size_t p, q;
  double w;
};

// Edges of the weighted Dirichlet form Σ_e w_e δu δv.
std::vector<Edge> drift_edges(const ManifoldState& state, const WeightSnapshot& snap) {
  const auto c = detail::edge_coefficients(state, std::span<const double>(snap.K.samples));
  const auto n = static_cast<std::size_t>(state.resolution());
  std::vector<Edge> edges;
  if (state.backend() == Backend::conformal_torus) {
    edges.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t p = j * n + i;
        edges.push_back({p, j * n + (i + 1) % n, c.cx[p]});
        edges.push_back({p, ((j + 1) % n) * n + i, c.cy[p]});
      }
  } else {
    edges.reserve(n);
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, c.cx[i]});
  }
  return edges;
}

void require_aligned(const ManifoldState& state, const WeightSnapshot& w) {
  if (w.dV.backend != state.backend()) throw BackendMismatch("weight snapshot backend mismatch");
  if (state.backend() != Backend::sphere && w.dV.w.size() != state.samples())
    throw BackendMismatch("weight snapshot does not match the grid");
  if (std::abs(w.t - state.time) > 1e-12 * std::max(1.0, std::abs(state.time)))
    throw DomainError("weight snapshot time does not match the state time");
}

}  // namespace

double HSchedule::operator()(double t) const {
  switch (kind) {
    case HKind::constant:
      return c0;
    case HKind::backwards_time:
      return t - T;
    case HKind::linear:
      return c0 + c1 * t;
  }
  return c0;
}

double HSchedule::derivative(double) const {
  switch (kind) {
    case HKind::constant:
      return 0.0;
    case HKind::backwards_time:
      return 1.0;
    case HKind::linear:
      return c1;
  }
  return 0.0;
}

void HSchedule::validate(double t0, double t1) const {
  // h is affine in t, so the endpoints decide.
  const double a = (*this)(t0), b = (*this)(t1);
  if (a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0))
    throw DomainError("h vanishes or changes sign on [" + std::to_string(t0) + ", " +
                      std::to_string(t1) + "]");
}

IDPair compute_I_D(const ManifoldState& state, const WeightSnapshot& w, const ScalarField& u,
                   double h) {
  check_field(state, u);
  require_aligned(state, w);
  IDPair out;
  if (state.backend() == Backend::sphere) {
    out.I = inner(state, u, u, w.dV);
    out.D = h * weighted_dirichlet(state, w.K, u, w.dV);
    return out;
  }
  out.I = kernels::weighted_dot(u.samples, u.samples, w.dV.w);
  const auto lf = drift_laplacian_density(state, w.K, u);
  out.D = -h * kernels::weighted_dot(u.samples, lf.samples, w.dV.w);
  return out;
}

double choose_kappa(double s, double h) {
  if (h == 0.0 || !std::isfinite(h)) throw DomainError("h must be nonzero to choose kappa");
  return 2.0 * h * s;
}

void normalize_frequency_kappa(std::vector<FrequencyRecord>& records, const HSchedule& h,
                               double t0, const std::function<double(double)>& exact) {
  if (records.empty()) return;
  const double h0 = h(t0);
  double acc = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    auto& r = records[k];
    if (!present(r.kappa)) throw HypothesisError("kappa missing at t = " + std::to_string(r.t));
    if (exact) {
      acc = exact(r.t);
    } else if (k > 0) {
      const auto& prev = records[k - 1];
      acc += 0.5 * (r.t - prev.t) * (prev.kappa / h(prev.t) + r.kappa / h(r.t));
    }
    r.exponent3 = std::log(h(r.t) / h0) + acc;
    r.U3 = std::exp(-r.exponent3) * r.D / r.I;
  }
}

void normalize_frequency_harnack(std::vector<FrequencyRecord>& records, const HSchedule& h,
                                 double k_bound, int dim, double A, double eta, double t0) {
  if (!(eta > 0.0)) throw HypothesisError("positivity lower bound eta must be positive");
  if (!(A >= eta)) throw HypothesisError("upper bound A must be at least eta");
  if (!(t0 > 0.0)) throw HypothesisError("t0 must be positive for the Harnack normalization");
  const double N = std::log(A / eta);
  const double h0 = h(t0);
  for (auto& r : records) {
    r.exponent4 = std::log(h(r.t) / h0) + 2.0 * k_bound * dim * (r.t - t0) +
                  (0.5 * N * dim + dim) * std::log(r.t / t0);
    r.U4 = std::exp(-r.exponent4) * r.D / r.I;
  }
}

namespace detail {

double first_eigenvalue_dense(const ManifoldState& state, const WeightSnapshot& w) {
  const auto edges = drift_edges(state, w);
  const std::size_t n = state.samples();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  Eigen::VectorXd isq(static_cast<long>(n)), q(static_cast<long>(n));
  for (std::size_t p = 0; p < n; ++p) {
    isq[static_cast<long>(p)] = 1.0 / std::sqrt(w.dV.w[p]);
    q[static_cast<long>(p)] = std::sqrt(w.dV.w[p]);
  }
  for (const auto& e : edges) {
    const auto p = static_cast<long>(e.p), r = static_cast<long>(e.q);
    A(p, p) += e.w;
    A(r, r) += e.w;
    A(p, r) -= e.w;
    A(r, p) -= e.w;
  }
  A = isq.asDiagonal() * A * isq.asDiagonal();
  // Push the constant mode (W^{1/2}·1 after the similarity) above the spectrum.
  q.normalize();
  const double lift = A.trace() + 1.0;
  A += lift * q * q.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed");
  return eig.eigenvalues()[0];
}

double first_eigenvalue_sparse(const ManifoldState& state, const WeightSnapshot& w) {
  const auto edges = drift_edges(state, w);
  const auto n = static_cast<long>(state.samples());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * edges.size() + static_cast<std::size_t>(n));
  for (const auto& e : edges) {
    const auto p = static_cast<long>(e.p), r = static_cast<long>(e.q);
    trip.emplace_back(p, p, e.w);
    trip.emplace_back(r, r, e.w);
    trip.emplace_back(p, r, -e.w);
    trip.emplace_back(r, p, -e.w);
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd W(n);
  for (long p = 0; p < n; ++p) W[p] = w.dV.w[static_cast<std::size_t>(p)];
  Eigen::SparseMatrix<double> M = L;
  for (long p = 0; p < n; ++p) M.coeffRef(p, p) += kShift * W[p];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(M);
  if (solver.info() != Eigen::Success) throw ConvergenceError("shifted factorization failed");

  // Deterministic smooth starting block.
  const auto side = static_cast<long>(state.resolution());
  const bool two_d = state.backend() == Backend::conformal_torus;
  Eigen::MatrixXd Q(n, kBlock);
  for (long p = 0; p < n; ++p) {
    const double x = static_cast<double>(two_d ? p % side : p) / static_cast<double>(side);
    const double y = two_d ? static_cast<double>(p / side) / static_cast<double>(side) : 0.0;
    const double tp = 2.0 * std::numbers::pi;
    const double planar[4] = {x, y, x + y, x - y};
    const double axial[4] = {x, 2.0 * x, 3.0 * x, 4.0 * x};
    for (int b = 0; b < kBlock; ++b) {
      const double arg = tp * (two_d ? planar[b / 2] : axial[b / 2]);
      Q(p, b) = b % 2 == 0 ? std::cos(arg) : std::sin(arg);
    }
  }
  const double total = W.sum();
  auto deflate = [&](Eigen::MatrixXd& Y) {
    for (int b = 0; b < kBlock; ++b) {
      const double c = W.dot(Y.col(b)) / total;
      Y.col(b).array() -= c;
    }
  };
  auto w_orthonormalize = [&](Eigen::MatrixXd& Y) {
    Eigen::MatrixXd G = Y.transpose() * W.asDiagonal() * Y;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw ConvergenceError("subspace lost rank");
    Y = llt.matrixU().solve<Eigen::OnTheRight>(Y);
  };
  deflate(Q);
  w_orthonormalize(Q);
  double prev = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::MatrixXd Y = solver.solve(W.asDiagonal() * Q);
    deflate(Y);
    w_orthonormalize(Y);
    Eigen::MatrixXd H = Y.transpose() * (L * Y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()));
    Q = Y * eig.eigenvectors();
    const double lam = eig.eigenvalues()[0];
    if (it >= 2 && std::abs(lam - prev) <= 1e-13 * std::abs(lam)) {
      const Eigen::VectorXd r = L * Q.col(0) - lam * W.asDiagonal() * Q.col(0);
      const double res = std::sqrt((r.array().square() / W.array()).sum());
      if (res <= 1e-7 * std::abs(lam)) return lam;
    }
    prev = lam;
  }
  throw ConvergenceError("first eigenvalue iteration did not converge");
}

}  // namespace detail

double first_eigenvalue(const ManifoldState& state, const WeightSnapshot& w) {
  require_aligned(state, w);
  if (state.backend() == Backend::sphere) {
    const auto& s = state.sphere();
    return sphere_eigenvalue(s.dim, s.radius_sq, 1);
  }
  if (state.samples() <= kDenseLimit) return detail::first_eigenvalue_dense(state, w);
  return detail::first_eigenvalue_sparse(state, w);
}

RatioBound ratio_lower_bound(const std::vector<FrequencyRecord>& records, const HSchedule& h,
                             const Schedule& a, double t_prime, double t1) {
  if (records.size() < 2) throw DomainError("ratio bound needs at least two records");
  auto nearest = [&](double t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < records.size(); ++k)
      if (std::abs(records[k].t - t) < std::abs(records[best].t - t)) best = k;
    return best;
  };
  const std::size_t i0 = nearest(t_prime), i1 = nearest(t1);
  if (!(i0 < i1)) throw DomainError("ratio bound needs t' < t1 inside the record range");
  const double U0 = records.front().U3;
  if (!present(U0)) throw HypothesisError("ratio bound needs the normalized frequency");
  double integral = 0.0;
  for (std::size_t k = i0 + 1; k <= i1; ++k) {
    const auto& p = records[k - 1];
    const auto& r = records[k];
    integral += 0.5 * (r.t - p.t) * (std::exp(p.exponent3) / h(p.t) + std::exp(r.exponent3) / h(r.t));
  }
  RatioBound out;
  out.t_prime = records[i0].t;
  out.t1 = records[i1].t;
  out.bound = std::exp(-2.0 * U0 * integral + 2.0 * a.integral(out.t_prime, out.t1));
  out.actual = records[i1].I / records[i0].I;
  return out;
}

}  // namespace geoflow
