#pragma once

// Stencil and reduction kernels on periodic grids.
//
// Every kernel exists twice with identical signatures: `serial::` is the
// reference implementation, `parallel::` distributes the same arithmetic
// over OpenMP threads. Reductions are blocked with a fixed block layout
// (one grid row, or kReduceBlock samples) and the block partials are summed
// in order, so both variants agree bit for bit for any thread count.
//
// 2D grids are n×n, row-major with x fastest: p = j*n + i.

#include <cstddef>
#include <span>

namespace geoflow::kernels {

inline constexpr std::size_t kReduceBlock = 512;

namespace serial {

/// out[p] = Σ_dir c_e (u[q] - u[p]) over the four edges e = (p, q) of p.
/// cx[p] is the coefficient of edge (p, p+x̂), cy[p] of edge (p, p+ŷ).
void divergence_2d(int n, std::span<const double> cx, std::span<const double> cy,
                   std::span<const double> u, std::span<double> out);

/// 1D periodic analogue; c[i] is the coefficient of edge (i, i+1).
void divergence_1d(std::span<const double> c, std::span<const double> u,
                   std::span<double> out);

/// Σ_e c_e (u[q]-u[p]) (v[q]-v[p]) over all edges of the periodic grid.
double edge_form_2d(int n, std::span<const double> cx, std::span<const double> cy,
                    std::span<const double> u, std::span<const double> v);
double edge_form_1d(std::span<const double> c, std::span<const double> u,
                    std::span<const double> v);

/// Σ_p u[p] v[p] w[p].
double weighted_dot(std::span<const double> u, std::span<const double> v,
                    std::span<const double> w);

/// Σ_p u[p] w[p].
double weighted_sum(std::span<const double> u, std::span<const double> w);

/// Unscaled centered differences: gx[p] = (u[i+1,j] - u[i-1,j]) / 2, same for y.
void centered_gradient_2d(int n, std::span<const double> u, std::span<double> gx,
                          std::span<double> gy);

}  // namespace serial

namespace parallel {

void divergence_2d(int n, std::span<const double> cx, std::span<const double> cy,
                   std::span<const double> u, std::span<double> out);
void divergence_1d(std::span<const double> c, std::span<const double> u,
                   std::span<double> out);
double edge_form_2d(int n, std::span<const double> cx, std::span<const double> cy,
                    std::span<const double> u, std::span<const double> v);
double edge_form_1d(std::span<const double> c, std::span<const double> u,
                    std::span<const double> v);
double weighted_dot(std::span<const double> u, std::span<const double> v,
                    std::span<const double> w);
double weighted_sum(std::span<const double> u, std::span<const double> w);
void centered_gradient_2d(int n, std::span<const double> u, std::span<double> gx,
                          std::span<double> gy);

}  // namespace parallel

// The library itself runs on the parallel kernels.
using parallel::centered_gradient_2d;
using parallel::divergence_1d;
using parallel::divergence_2d;
using parallel::edge_form_1d;
using parallel::edge_form_2d;
using parallel::weighted_dot;
using parallel::weighted_sum;

}  // namespace geoflow::kernels
