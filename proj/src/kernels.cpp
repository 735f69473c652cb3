#include "geoflow/kernels.hpp"

#include <algorithm>
#include <vector>

namespace geoflow::kernels {

namespace {

inline std::size_t wrap_prev(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }
inline std::size_t wrap_next(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }

// Row kernels shared by both variants so the arithmetic is identical.

inline void divergence_row(std::size_t n, std::size_t j, const double* cx, const double* cy,
                           const double* u, double* out) {
  const std::size_t jm = wrap_prev(j, n), jp = wrap_next(j, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = wrap_prev(i, n), ip = wrap_next(i, n);
    const std::size_t p = j * n + i;
    const double up = u[p];
    double acc = cx[p] * (u[j * n + ip] - up);
    acc -= cx[j * n + im] * (up - u[j * n + im]);
    acc += cy[p] * (u[jp * n + i] - up);
    acc -= cy[jm * n + i] * (up - u[jm * n + i]);
    out[p] = acc;
  }
}

inline double edge_form_row(std::size_t n, std::size_t j, const double* cx, const double* cy,
                            const double* u, const double* v) {
  const std::size_t jp = wrap_next(j, n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = wrap_next(i, n);
    const std::size_t p = j * n + i;
    acc += cx[p] * (u[j * n + ip] - u[p]) * (v[j * n + ip] - v[p]);
    acc += cy[p] * (u[jp * n + i] - u[p]) * (v[jp * n + i] - v[p]);
  }
  return acc;
}

inline void divergence_1d_block(std::size_t n, std::size_t lo, std::size_t hi, const double* c,
                                const double* u, double* out) {
  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t im = wrap_prev(i, n), ip = wrap_next(i, n);
    out[i] = c[i] * (u[ip] - u[i]) - c[im] * (u[i] - u[im]);
  }
}

inline double edge_form_1d_block(std::size_t n, std::size_t lo, std::size_t hi, const double* c,
                                 const double* u, const double* v) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t ip = wrap_next(i, n);
    acc += c[i] * (u[ip] - u[i]) * (v[ip] - v[i]);
  }
  return acc;
}

inline double dot_block(std::size_t lo, std::size_t hi, const double* u, const double* v,
                        const double* w) {
  double acc = 0.0;
  for (std::size_t p = lo; p < hi; ++p) acc += u[p] * v[p] * w[p];
  return acc;
}

inline double sum_block(std::size_t lo, std::size_t hi, const double* u, const double* w) {
  double acc = 0.0;
  for (std::size_t p = lo; p < hi; ++p) acc += u[p] * w[p];
  return acc;
}

inline void gradient_row(std::size_t n, std::size_t j, const double* u, double* gx, double* gy) {
  const std::size_t jm = wrap_prev(j, n), jp = wrap_next(j, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = wrap_prev(i, n), ip = wrap_next(i, n);
    const std::size_t p = j * n + i;
    gx[p] = 0.5 * (u[j * n + ip] - u[j * n + im]);
    gy[p] = 0.5 * (u[jp * n + i] - u[jm * n + i]);
  }
}

inline std::size_t block_count(std::size_t len) { return (len + kReduceBlock - 1) / kReduceBlock; }

inline double ordered_total(const std::vector<double>& partials) {
  double total = 0.0;
  for (double x : partials) total += x;
  return total;
}

}  // namespace

namespace serial {

void divergence_2d(int n, std::span<const double> cx, std::span<const double> cy,
                   std::span<const double> u, std::span<double> out) {
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < nn; ++j)
    divergence_row(nn, j, cx.data(), cy.data(), u.data(), out.data());
}

void divergence_1d(std::span<const double> c, std::span<const double> u, std::span<double> out) {
  const std::size_t n = u.size();
  for (std::size_t b = 0; b < block_count(n); ++b)
    divergence_1d_block(n, b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock), c.data(),
                        u.data(), out.data());
}

double edge_form_2d(int n, std::span<const double> cx, std::span<const double> cy,
                    std::span<const double> u, std::span<const double> v) {
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> partial(nn);
  for (std::size_t j = 0; j < nn; ++j)
    partial[j] = edge_form_row(nn, j, cx.data(), cy.data(), u.data(), v.data());
  return ordered_total(partial);
}

double edge_form_1d(std::span<const double> c, std::span<const double> u,
                    std::span<const double> v) {
  const std::size_t n = u.size();
  std::vector<double> partial(block_count(n));
  for (std::size_t b = 0; b < partial.size(); ++b)
    partial[b] = edge_form_1d_block(n, b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock),
                                    c.data(), u.data(), v.data());
  return ordered_total(partial);
}

double weighted_dot(std::span<const double> u, std::span<const double> v,
                    std::span<const double> w) {
  const std::size_t n = u.size();
  std::vector<double> partial(block_count(n));
  for (std::size_t b = 0; b < partial.size(); ++b)
    partial[b] = dot_block(b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock), u.data(),
                           v.data(), w.data());
  return ordered_total(partial);
}

double weighted_sum(std::span<const double> u, std::span<const double> w) {
  const std::size_t n = u.size();
  std::vector<double> partial(block_count(n));
  for (std::size_t b = 0; b < partial.size(); ++b)
    partial[b] = sum_block(b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock), u.data(),
                           w.data());
  return ordered_total(partial);
}

void centered_gradient_2d(int n, std::span<const double> u, std::span<double> gx,
                          std::span<double> gy) {
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < nn; ++j) gradient_row(nn, j, u.data(), gx.data(), gy.data());
}

}  // namespace serial

namespace parallel {

void divergence_2d(int n, std::span<const double> cx, std::span<const double> cy,
                   std::span<const double> u, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    divergence_row(static_cast<std::size_t>(n), static_cast<std::size_t>(j), cx.data(),
                   cy.data(), u.data(), out.data());
}

void divergence_1d(std::span<const double> c, std::span<const double> u, std::span<double> out) {
  const std::size_t n = u.size();
  const auto blocks = static_cast<long>(block_count(n));
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const auto lo = static_cast<std::size_t>(b) * kReduceBlock;
    divergence_1d_block(n, lo, std::min(n, lo + kReduceBlock), c.data(), u.data(), out.data());
  }
}

double edge_form_2d(int n, std::span<const double> cx, std::span<const double> cy,
                    std::span<const double> u, std::span<const double> v) {
  std::vector<double> partial(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    partial[static_cast<std::size_t>(j)] =
        edge_form_row(static_cast<std::size_t>(n), static_cast<std::size_t>(j), cx.data(),
                      cy.data(), u.data(), v.data());
  return ordered_total(partial);
}

double edge_form_1d(std::span<const double> c, std::span<const double> u,
                    std::span<const double> v) {
  const std::size_t n = u.size();
  std::vector<double> partial(block_count(n));
  const auto blocks = static_cast<long>(partial.size());
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const auto lo = static_cast<std::size_t>(b) * kReduceBlock;
    partial[static_cast<std::size_t>(b)] =
        edge_form_1d_block(n, lo, std::min(n, lo + kReduceBlock), c.data(), u.data(), v.data());
  }
  return ordered_total(partial);
}

double weighted_dot(std::span<const double> u, std::span<const double> v,
                    std::span<const double> w) {
  const std::size_t n = u.size();
  std::vector<double> partial(block_count(n));
  const auto blocks = static_cast<long>(partial.size());
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const auto lo = static_cast<std::size_t>(b) * kReduceBlock;
    partial[static_cast<std::size_t>(b)] =
        dot_block(lo, std::min(n, lo + kReduceBlock), u.data(), v.data(), w.data());
  }
  return ordered_total(partial);
}

double weighted_sum(std::span<const double> u, std::span<const double> w) {
  const std::size_t n = u.size();
  std::vector<double> partial(block_count(n));
  const auto blocks = static_cast<long>(partial.size());
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const auto lo = static_cast<std::size_t>(b) * kReduceBlock;
    partial[static_cast<std::size_t>(b)] =
        sum_block(lo, std::min(n, lo + kReduceBlock), u.data(), w.data());
  }
  return ordered_total(partial);
}

void centered_gradient_2d(int n, std::span<const double> u, std::span<double> gx,
                          std::span<double> gy) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    gradient_row(static_cast<std::size_t>(n), static_cast<std::size_t>(j), u.data(), gx.data(),
                 gy.data());
}

}  // namespace parallel

}  // namespace geoflow::kernels
