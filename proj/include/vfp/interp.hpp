#pragma once

// Sliding Lagrange interpolation on uniform lattices. points = 2M nodes at
// integer offsets -(M-1)..M around the target cell; reads outside the
// lattice contribute zero.

#include <cstddef>
#include <cmath>

#include "vfp/errors.hpp"
#include "vfp/grid.hpp"

namespace vfp {

inline constexpr int kInterpHalfWidthMax = 5;

// weights for fraction t in [0,1); w must hold 2M doubles
inline void lagrange_weights(double t, int M, double* w) {
    const int lo = -(M - 1), hi = M;
    for (int a = lo; a <= hi; ++a) {
        double num = 1.0, den = 1.0;
        for (int b = lo; b <= hi; ++b) {
            if (b == a) continue;
            num *= t - double(b);
            den *= double(a - b);
        }
        w[a - lo] = num / den;
    }
}

// sample grid values at index-space point (gx, gy); zero outside [0,n-1]^2
inline double sample_grid(const PhaseGrid& g, double gx, double gy, int M) {
    const double nx1 = double(g.nx - 1), nv1 = double(g.nv - 1);
    if (!(gx >= 0.0 && gx <= nx1 && gy >= 0.0 && gy <= nv1)) return 0.0;
    int ix = int(std::floor(gx));
    int iy = int(std::floor(gy));
    if (ix >= int(g.nx) - 1) ix = int(g.nx) - 2;  // gx == nx-1 lands in last cell
    if (iy >= int(g.nv) - 1) iy = int(g.nv) - 2;
    const double tx = gx - double(ix);
    const double ty = gy - double(iy);
    double wx[2 * kInterpHalfWidthMax], wy[2 * kInterpHalfWidthMax];
    lagrange_weights(tx, M, wx);
    lagrange_weights(ty, M, wy);
    const int lo = -(M - 1);
    double acc = 0.0;
    for (int a = 0; a < 2 * M; ++a) {
        const int ia = ix + lo + a;
        if (ia < 0 || ia >= int(g.nx)) continue;
        const double* row = g.values.data() + std::size_t(ia) * g.nv;
        double racc = 0.0;
        for (int b = 0; b < 2 * M; ++b) {
            const int ib = iy + lo + b;
            if (ib < 0 || ib >= int(g.nv)) continue;
            racc += wy[b] * row[ib];
        }
        acc += wx[a] * racc;
    }
    return acc;
}

// 1D variant on a raw array of length n
inline double sample_line(const double* f, std::size_t n, double gy, int M) {
    const double n1 = double(n - 1);
    if (!(gy >= 0.0 && gy <= n1)) return 0.0;
    int iy = int(std::floor(gy));
    if (iy >= int(n) - 1) iy = int(n) - 2;
    const double ty = gy - double(iy);
    double wy[2 * kInterpHalfWidthMax];
    lagrange_weights(ty, M, wy);
    const int lo = -(M - 1);
    double acc = 0.0;
    for (int b = 0; b < 2 * M; ++b) {
        const int ib = iy + lo + b;
        if (ib < 0 || ib >= int(n)) continue;
        acc += wy[b] * f[ib];
    }
    return acc;
}

} // namespace vfp
