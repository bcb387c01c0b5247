#pragma once

// Steady-state machinery: the normalized self-consistency map T, its damped
// fixed-point iteration, the small-current uniqueness threshold, and the
// explicit stability constants.

#include <cmath>
#include <string>
#include <vector>

#include "vfp/convolution.hpp"
#include "vfp/errors.hpp"
#include "vfp/grid.hpp"
#include "vfp/wakefield.hpp"

namespace vfp {

// solves w e^w = target by Newton from w = 0.7
inline double lambert_w(double target) {
    double w = 0.7;
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - target;
        const double fp = ew * (1.0 + w);
        const double next = w - f / fp;
        if (std::fabs(next - w) < 1e-15 * std::fabs(next) + 1e-300) return next;
        w = next;
    }
    return w;
}

// I_thres = C theta / (M ||K||_inf), C = (1/3) W(3/2)
inline double uniqueness_threshold(const ModelParams& p, const Kernel& k) {
    if (!(k.k_inf_norm > 0.0)) throw solver_error("uniqueness_threshold: ||K||_inf must be positive");
    const double C = lambert_w(1.5) / 3.0;
    return C * p.theta / (p.mass * k.k_inf_norm);
}

struct StabilityConstants {
    double lambda_m = 0.0;
    double lambda_M = 0.0;
    double c_m = 0.0;
    double c_inf = 0.0;
    double i_thres = 0.0;
};

inline StabilityConstants stability_constants(const ModelParams& p, const Kernel& k) {
    StabilityConstants c;
    const double im_th = p.current * p.mass / p.theta;
    c.lambda_m = 2.0 * p.nu;
    c.lambda_M = p.alpha / p.theta * std::exp(-4.0 * im_th * k.k_inf_norm);
    c.c_m = p.nu + 4.0 * p.theta * p.theta + 4.0 * p.alpha * p.theta
            + 2.0 * (p.current * p.mass * k.dk_inf_norm) * (p.current * p.mass * k.dk_inf_norm);
    c.c_inf = 2.0 * p.alpha / p.theta + im_th * im_th * k.dk_inf_norm * k.dk_inf_norm;
    c.i_thres = uniqueness_threshold(p, k);
    return c;
}

// T(sigma)(x) = exp(-alpha x^2/(2 theta) - (I M/theta) K*sigma(x)) / (its own integral)
inline Profile1D apply_T(const Profile1D& sigma, const ModelParams& p, const KernelTables& tabs) {
    const std::size_t n = sigma.n();
    Profile1D out(sigma.x_min, sigma.x_max, n);
    std::vector<double> ks;
    if (p.current > 0.0)
        ks = convolve_direct(tabs.k, sigma.values, sigma.dx());
    else
        ks.assign(n, 0.0);
    const double im_th = p.current * p.mass / p.theta;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sigma.x(i);
        out.values[i] = std::exp(-p.alpha * x * x / (2.0 * p.theta) - im_th * ks[i]);
    }
    const double z = trapezoid_1d(out);
    if (!(z > 0.0)) throw solver_error("apply_T: normalization integral underflowed to zero");
    for (auto& v : out.values) v /= z;
    return out;
}

inline Profile1D apply_T(const Profile1D& sigma, const ModelParams& p, const Kernel& k) {
    return apply_T(sigma, p, KernelTables::build(k, sigma.n(), sigma.dx()));
}

struct HaissinskiSolution {
    Profile1D sigma;
    double residual_l1 = 0.0;
    int iterations = 0;
    double contraction_estimate = 0.0;  // max observed per-step L1 ratio
    ModelParams params;
};

// Gaussian start restricted to the box, normalized
inline Profile1D gaussian_start(const ModelParams& p, double x_min, double x_max, std::size_t n) {
    Profile1D s(x_min, x_max, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = s.x(i);
        s.values[i] = std::exp(-p.alpha * x * x / (2.0 * p.theta));
    }
    const double z = trapezoid_1d(s);
    for (auto& v : s.values) v /= z;
    return s;
}

inline HaissinskiSolution solve_haissinski(const ModelParams& p, const Kernel& k,
                                           double x_min, double x_max, std::size_t n,
                                           double tol = 1e-10, int max_iter = 200,
                                           double mixing = 1.0,
                                           const Profile1D* start = nullptr) {
    if (!(tol > 0.0)) throw config_error("solve_haissinski: tol > 0 required");
    if (!(mixing > 0.0 && mixing <= 1.0)) throw config_error("solve_haissinski: mixing in (0,1] required");
    const auto tabs = KernelTables::build(k, n, (x_max - x_min) / double(n - 1));
    Profile1D sigma = start ? *start : gaussian_start(p, x_min, x_max, n);
    HaissinskiSolution sol;
    sol.params = p;
    double prev_diff = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        Profile1D t = apply_T(sigma, p, tabs);
        const double diff = l1_distance(t, sigma);
        if (prev_diff > 0.0 && it > 1)
            sol.contraction_estimate = std::max(sol.contraction_estimate, diff / prev_diff);
        prev_diff = diff;
        if (mixing == 1.0) {
            sigma = std::move(t);
        } else {
            for (std::size_t i = 0; i < sigma.n(); ++i)
                sigma.values[i] = (1.0 - mixing) * sigma.values[i] + mixing * t.values[i];
        }
        sol.iterations = it + 1;
        sol.residual_l1 = diff;
        if (diff < tol) {
            sol.sigma = std::move(sigma);
            return sol;
        }
    }
    throw solver_error("solve_haissinski: no convergence after " + std::to_string(max_iter) +
                       " iterations, last residual " + std::to_string(sol.residual_l1));
}

// f_inf(x,v) = M / sqrt(2 pi theta) e^{-v^2/(2 theta)} sigma_inf(x)
inline PhaseGrid steady_state_2d(const HaissinskiSolution& sol, double v_min, double v_max,
                                 std::size_t nv) {
    const auto& s = sol.sigma;
    PhaseGrid g(s.x_min, s.x_max, v_min, v_max, s.n(), nv);
    const double th = sol.params.theta;
    const double amp = sol.params.mass / std::sqrt(2.0 * 3.14159265358979323846 * th);
    for (std::size_t j = 0; j < nv; ++j) {
        const double v = g.v(j);
        const double mv = amp * std::exp(-v * v / (2.0 * th));
        for (std::size_t i = 0; i < g.nx; ++i) g.at(i, j) = mv * s.values[i];
    }
    return g;
}

} // namespace vfp
