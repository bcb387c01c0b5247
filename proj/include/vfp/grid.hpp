#pragma once

// Parameter record, phase-space grid and line-profile containers, and the
// trapezoid quadrature they share. Containers are plain values; every
// operation here is a pure function.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "vfp/errors.hpp"

namespace vfp {

struct ModelParams {
    double alpha = 1.0;    // confinement strength
    double nu = 1.0;       // damping rate
    double theta = 1.0;    // diffusion level
    double current = 0.0;  // beam current I
    double mass = 1.0;     // total mass

    void validate() const {
        if (!(alpha > 0.0)) throw config_error("alpha > 0 required, got " + std::to_string(alpha));
        if (!(nu > 0.0)) throw config_error("nu > 0 required, got " + std::to_string(nu));
        if (!(theta > 0.0)) throw config_error("theta > 0 required, got " + std::to_string(theta));
        if (!(current >= 0.0)) throw config_error("current >= 0 required, got " + std::to_string(current));
        if (!(mass > 0.0)) throw config_error("mass > 0 required, got " + std::to_string(mass));
    }
};

// Trapezoid node weight on an endpoint-inclusive uniform lattice.
inline double trap_weight(std::size_t i, std::size_t n) {
    return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

struct Profile1D {
    double x_min = 0.0;
    double x_max = 1.0;
    std::vector<double> values;

    Profile1D() = default;
    Profile1D(double a, double b, std::size_t n) : x_min(a), x_max(b), values(n, 0.0) {}

    std::size_t n() const { return values.size(); }
    double dx() const { return (x_max - x_min) / double(n() - 1); }
    double x(std::size_t i) const { return x_min + dx() * double(i); }
};

// Samples of f on a uniform 2D lattice including both endpoints on each axis,
// row-major with x as the slow index.
struct PhaseGrid {
    double x_min = -8.0, x_max = 8.0;
    double v_min = -8.0, v_max = 8.0;
    std::size_t nx = 0, nv = 0;
    std::vector<double> values;

    PhaseGrid() = default;
    PhaseGrid(double xa, double xb, double va, double vb, std::size_t nx_, std::size_t nv_)
        : x_min(xa), x_max(xb), v_min(va), v_max(vb), nx(nx_), nv(nv_), values(nx_ * nv_, 0.0) {}

    double dx() const { return (x_max - x_min) / double(nx - 1); }
    double dv() const { return (v_max - v_min) / double(nv - 1); }
    double x(std::size_t i) const { return x_min + dx() * double(i); }
    double v(std::size_t j) const { return v_min + dv() * double(j); }
    double& at(std::size_t i, std::size_t j) { return values[i * nv + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * nv + j]; }
};

inline void check_finite(const Profile1D& p, const char* what) {
    for (std::size_t i = 0; i < p.n(); ++i)
        if (!std::isfinite(p.values[i]))
            throw solver_error(std::string(what) + ": non-finite sample at index " + std::to_string(i));
}

inline void check_finite(const PhaseGrid& g, const char* what) {
    for (std::size_t k = 0; k < g.values.size(); ++k)
        if (!std::isfinite(g.values[k]))
            throw solver_error(std::string(what) + ": non-finite sample at flat index " + std::to_string(k));
}

inline double trapezoid_1d(const Profile1D& p) {
    if (p.n() < 2) throw solver_error("trapezoid_1d: need at least 2 samples");
    check_finite(p, "trapezoid_1d");
    double s = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) s += trap_weight(i, p.n()) * p.values[i];
    return s * p.dx();
}

inline double grid_mass(const PhaseGrid& g) {
    check_finite(g, "grid_mass");
    double s = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < g.nv; ++j) row += trap_weight(j, g.nv) * g.at(i, j);
        s += trap_weight(i, g.nx) * row;
    }
    return s * g.dx() * g.dv();
}

// rho(x_i) = integral of f(x_i, .) over v
inline Profile1D marginal_density(const PhaseGrid& g) {
    Profile1D rho(g.x_min, g.x_max, g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.nv; ++j) s += trap_weight(j, g.nv) * g.at(i, j);
        rho.values[i] = s * g.dv();
    }
    return rho;
}

// j(x_i) = integral of v f(x_i, .) over v
inline Profile1D current_density(const PhaseGrid& g) {
    Profile1D j(g.x_min, g.x_max, g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (std::size_t jv = 0; jv < g.nv; ++jv) s += trap_weight(jv, g.nv) * g.v(jv) * g.at(i, jv);
        j.values[i] = s * g.dv();
    }
    return j;
}

struct Moments {
    double mass = 0.0;
    double mean_x = 0.0, mean_v = 0.0;
    double var_x = 0.0, var_v = 0.0, cov_xv = 0.0;
};

inline Moments grid_moments(const PhaseGrid& g) {
    Moments m;
    double sx = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double wi = trap_weight(i, g.nx);
        for (std::size_t j = 0; j < g.nv; ++j) {
            const double w = wi * trap_weight(j, g.nv) * g.at(i, j);
            m.mass += w;
            sx += w * g.x(i);
            sv += w * g.v(j);
        }
    }
    const double cell = g.dx() * g.dv();
    m.mass *= cell;
    m.mean_x = sx * cell / m.mass;
    m.mean_v = sv * cell / m.mass;
    double vx = 0.0, vv = 0.0, cxv = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double wi = trap_weight(i, g.nx);
        const double dxc = g.x(i) - m.mean_x;
        for (std::size_t j = 0; j < g.nv; ++j) {
            const double w = wi * trap_weight(j, g.nv) * g.at(i, j);
            const double dvc = g.v(j) - m.mean_v;
            vx += w * dxc * dxc;
            vv += w * dvc * dvc;
            cxv += w * dxc * dvc;
        }
    }
    m.var_x = vx * cell / m.mass;
    m.var_v = vv * cell / m.mass;
    m.cov_xv = cxv * cell / m.mass;
    return m;
}

struct LpNorms {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

inline LpNorms grid_norms(const PhaseGrid& g) {
    LpNorms r;
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double wi = trap_weight(i, g.nx);
        for (std::size_t j = 0; j < g.nv; ++j) {
            const double w = wi * trap_weight(j, g.nv);
            const double f = g.at(i, j);
            r.l1 += w * std::fabs(f);
            r.l2 += w * f * f;
            r.linf = std::max(r.linf, std::fabs(f));
        }
    }
    const double cell = g.dx() * g.dv();
    r.l1 *= cell;
    r.l2 = std::sqrt(r.l2 * cell);
    return r;
}

inline double l1_distance(const PhaseGrid& a, const PhaseGrid& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.nx; ++i) {
        const double wi = trap_weight(i, a.nx);
        for (std::size_t j = 0; j < a.nv; ++j)
            s += wi * trap_weight(j, a.nv) * std::fabs(a.at(i, j) - b.at(i, j));
    }
    return s * a.dx() * a.dv();
}

inline double l1_distance(const Profile1D& a, const Profile1D& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i)
        s += trap_weight(i, a.n()) * std::fabs(a.values[i] - b.values[i]);
    return s * a.dx();
}

// One row of the diagnostics time series.
struct DiagRecord {
    double t = 0.0;
    double mass = 0.0;
    double entropy = 0.0;
    double diss_lhs = 0.0;  // dE/dt + fisher
    double diss_rhs = 0.0;  // -I iint dK^o(x-y) j(x) rho(y)
    double mean_x = 0.0, mean_v = 0.0;
    double var_x = 0.0, var_v = 0.0, cov_xv = 0.0;
    double l2mu_dist = std::nan("");
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

} // namespace vfp
