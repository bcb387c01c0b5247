#pragma once

// Paper-facing functionals: free energy and its dissipation pieces, the
// weighted steady-state distance, the hydrodynamic projection split, and
// exponential-rate fitting.

#include <cmath>
#include <utility>
#include <vector>

#include "vfp/convolution.hpp"
#include "vfp/errors.hpp"
#include "vfp/grid.hpp"

namespace vfp {

struct EntropyReport {
    double entropy = 0.0;          // kinetic_entropy + energy + interaction
    double kinetic_entropy = 0.0;  // theta iint f log f
    double energy = 0.0;           // iint (v^2 + alpha x^2)/2 f
    double interaction = 0.0;      // (I/2) iint K^e(x-y) rho(x) rho(y)
    double fisher = 0.0;           // 2 nu iint (1/f) |v f + theta d_v f|^2
    double odd_flux = 0.0;         // -I iint d_x K^o(x-y) j(x) rho(y)
};

inline EntropyReport free_energy(const PhaseGrid& g, const ModelParams& p, const KernelTables& tabs) {
    EntropyReport r;
    const double cell = g.dx() * g.dv();
    const double maxf = grid_norms(g).linf;
    const double ffloor = 1e-14 * maxf;
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double wi = trap_weight(i, g.nx);
        const double x = g.x(i);
        for (std::size_t j = 0; j < g.nv; ++j) {
            const double w = wi * trap_weight(j, g.nv);
            const double v = g.v(j);
            const double f = g.at(i, j);
            const double fpos = f > 0.0 ? f : 0.0;  // 0 log 0 = 0
            if (fpos > 0.0) r.kinetic_entropy += w * fpos * std::log(fpos);
            r.energy += w * 0.5 * (v * v + p.alpha * x * x) * f;
            // fisher integrand with centered d_v f (one-sided at the edges)
            double dfdv;
            if (j == 0)
                dfdv = (g.at(i, 1) - g.at(i, 0)) / g.dv();
            else if (j + 1 == g.nv)
                dfdv = (g.at(i, g.nv - 1) - g.at(i, g.nv - 2)) / g.dv();
            else
                dfdv = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * g.dv());
            if (fpos > ffloor) {
                const double q = v * f + p.theta * dfdv;
                r.fisher += w * q * q / fpos;
            }
        }
    }
    r.kinetic_entropy *= p.theta * cell;
    r.energy *= cell;
    r.fisher *= 2.0 * p.nu * cell;

    const auto rho = marginal_density(g);
    const auto j = current_density(g);
    const auto ke_rho = convolve_direct(tabs.k_even, rho.values, rho.dx());
    const auto dko_rho = convolve_direct(tabs.dk_odd, rho.values, rho.dx());
    double inter = 0.0, odd = 0.0;
    for (std::size_t i = 0; i < rho.n(); ++i) {
        const double w = trap_weight(i, rho.n());
        inter += w * rho.values[i] * ke_rho[i];
        odd += w * j.values[i] * dko_rho[i];
    }
    r.interaction = 0.5 * p.current * inter * rho.dx();
    r.odd_flux = -p.current * odd * rho.dx();
    r.entropy = r.kinetic_entropy + r.energy + r.interaction;
    return r;
}

// Core region for the weighted distance: the superlevel set of f_inf at
// 1e-14 of its peak (hard-floored at 1e-300). Excluding the deep Gaussian
// tail keeps roundoff in f - f_inf from being amplified by 1/f_inf; the
// excluded mass must stay below 1e-10 of the total.
inline double l2mu_core_threshold(const PhaseGrid& f_inf) {
    double peak = 0.0;
    for (double v : f_inf.values) peak = std::max(peak, v);
    return std::max(1e-14 * peak, 1e-300);
}

// || (f - f_inf) / sqrt(f_inf) ||_{L^2} over the core region
inline double l2mu_distance(const PhaseGrid& f, const PhaseGrid& f_inf) {
    const double floor = l2mu_core_threshold(f_inf);
    double q = 0.0, core_mass = 0.0;
    for (std::size_t i = 0; i < f.nx; ++i) {
        const double wi = trap_weight(i, f.nx);
        for (std::size_t j = 0; j < f.nv; ++j) {
            const double w = wi * trap_weight(j, f.nv);
            const double fi = f_inf.at(i, j);
            if (fi > floor) {
                const double d = f.at(i, j) - fi;
                q += w * d * d / fi;
                core_mass += w * fi;
            } else if (fi < 0.0) {
                throw solver_error("l2mu_distance: reference state negative on core");
            }
        }
    }
    const double cell = f.dx() * f.dv();
    const double total = grid_mass(f_inf);
    if (core_mass * cell < (1.0 - 1e-10) * total)
        throw solver_error("l2mu_distance: core region carries less than 1 - 1e-10 of reference mass");
    return std::sqrt(q * cell);
}

// orthogonal split of g = f/f_inf - 1 into its velocity average and the
// rest, in the inner product weighted by f_inf; returns (pi_norm, complement_norm).
// Uses the same core region as l2mu_distance so the Pythagoras identity holds.
inline std::pair<double, double> hydro_projection(const PhaseGrid& f, const PhaseGrid& f_inf) {
    const double floor = l2mu_core_threshold(f_inf);
    const std::size_t nx = f.nx, nv = f.nv;
    std::vector<double> pi(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double w = trap_weight(j, nv);
            const double fi = f_inf.at(i, j);
            if (fi > floor) {
                num += w * (f.at(i, j) / fi - 1.0) * fi;
                den += w * fi;
            }
        }
        pi[i] = den > 0.0 ? num / den : 0.0;
    }
    double pi2 = 0.0, comp2 = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        const double wi = trap_weight(i, nx);
        for (std::size_t j = 0; j < nv; ++j) {
            const double w = wi * trap_weight(j, nv);
            const double fi = f_inf.at(i, j);
            if (fi > floor) {
                const double gg = f.at(i, j) / fi - 1.0;
                pi2 += w * pi[i] * pi[i] * fi;
                const double c = gg - pi[i];
                comp2 += w * c * c * fi;
            }
        }
    }
    const double cell = f.dx() * f.dv();
    return {std::sqrt(pi2 * cell), std::sqrt(comp2 * cell)};
}

struct DecayFit {
    double lambda = 0.0;
    double r_squared = 0.0;
};

// least-squares slope of log(value) vs t over the tail half of the series
inline DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 10) throw solver_error("fit_decay_rate: need at least 10 samples");
    const std::size_t n0 = series.size() / 2;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
    const double m = double(series.size() - n0);
    for (std::size_t i = n0; i < series.size(); ++i) {
        const double v = series[i].second;
        if (!(v > 0.0)) throw solver_error("fit_decay_rate: non-positive value at sample " + std::to_string(i));
        const double t = series[i].first, y = std::log(v);
        st += t; sy += y; stt += t * t; sty += t * y; syy += y * y;
    }
    const double denom = m * stt - st * st;
    if (denom == 0.0) throw solver_error("fit_decay_rate: degenerate abscissae");
    const double slope = (m * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / m;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / m;
    for (std::size_t i = n0; i < series.size(); ++i) {
        const double y = std::log(series[i].second);
        const double yh = slope * series[i].first + intercept;
        ss_res += (y - yh) * (y - yh);
        ss_tot += (y - ybar) * (y - ybar);
    }
    DecayFit fit;
    fit.lambda = -slope;
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace vfp
