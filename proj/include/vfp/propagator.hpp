#pragma once

// Closed-form transition of the linear kinetic Fokker-Planck flow with
// quadratic confinement: mean map B(tau), covariance Sigma(tau), and the
// Gaussian transition density G built from them.
//
// All regimes (under/critical/over-damped) are evaluated through
// ec = e^{-nu tau} c(tau) and es = e^{-nu tau} s(tau), which stay bounded
// for any tau; the overdamped branch never forms sinh/cosh of large
// arguments directly.

#include <cmath>

#include "vfp/errors.hpp"
#include "vfp/grid.hpp"

namespace vfp {

struct Mat2 {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    double det() const { return a11 * a22 - a12 * a21; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    void apply(double x, double v, double& ox, double& ov) const {
        ox = a11 * x + a12 * v;
        ov = a21 * x + a22 * v;
    }
};

struct Sym2 {
    double xx = 0.0, xv = 0.0, vv = 0.0;
    double det() const { return xx * vv - xv * xv; }
};

namespace detail {

// ec = e^{-nu tau} c(tau), es = e^{-nu tau} s(tau) with
// s = sin(w tau)/w, c = cos(w tau), w^2 = alpha - nu^2 (hyperbolic when < 0)
inline void damped_sc(double alpha, double nu, double tau, double& ec, double& es) {
    const double w2 = alpha - nu * nu;
    const double e = std::exp(-nu * tau);
    if (std::fabs(w2) < 1e-12) {
        es = e * tau * (1.0 + w2 * tau * tau / 6.0);
        ec = e * (1.0 + w2 * tau * tau / 2.0);
    } else if (w2 > 0.0) {
        const double w = std::sqrt(w2);
        es = e * std::sin(w * tau) / w;
        ec = e * std::cos(w * tau);
    } else {
        const double wb = std::sqrt(-w2);
        // e^{-nu tau} sinh/cosh(wb tau) via shifted exponentials; wb < nu
        const double ep = std::exp((wb - nu) * tau);
        const double em = std::exp(-(wb + nu) * tau);
        es = (ep - em) / (2.0 * wb);
        ec = (ep + em) / 2.0;
    }
}

} // namespace detail

inline Mat2 eval_B(const ModelParams& p, double tau) {
    double ec, es;
    detail::damped_sc(p.alpha, p.nu, tau, ec, es);
    return {ec + p.nu * es, es, -p.alpha * es, ec - p.nu * es};
}

inline Sym2 eval_Sigma(const ModelParams& p, double tau) {
    double ec, es;
    detail::damped_sc(p.alpha, p.nu, tau, ec, es);
    const double th = p.theta;
    Sym2 s;
    s.xx = th / p.alpha - th * (es * es + (p.nu * es + ec) * (p.nu * es + ec) / p.alpha);
    s.xv = 2.0 * th * p.nu * es * es;
    s.vv = th - th * (p.alpha * es * es + (p.nu * es - ec) * (p.nu * es - ec));
    return s;
}

// (4 theta^2/alpha) e^{-2 nu tau} (sinh^2(nu tau) - nu^2 s^2(tau)),
// with e^{-2x} sinh^2 x = ((1 - e^{-2x})/2)^2 kept in damped form
inline double sigma_det_closed(const ModelParams& p, double tau) {
    double ec, es;
    detail::damped_sc(p.alpha, p.nu, tau, ec, es);
    const double h = 0.5 * (1.0 - std::exp(-2.0 * p.nu * tau));  // e^{-nu tau} sinh(nu tau)
    return 4.0 * p.theta * p.theta / p.alpha * (h * h - p.nu * p.nu * es * es);
}

struct Propagator {
    double tau = 0.0;
    Mat2 b;
    Sym2 sigma;
    double det_sigma = 0.0;

    static Propagator make(const ModelParams& p, double tau) {
        if (!(tau >= 0.0)) throw solver_error("Propagator: tau must be >= 0");
        Propagator pr;
        pr.tau = tau;
        pr.b = eval_B(p, tau);
        pr.sigma = eval_Sigma(p, tau);
        pr.det_sigma = sigma_det_closed(p, tau);
        return pr;
    }
};

// transition density value G(tau, x, y, v, w)
inline double eval_G(const Propagator& pr, double x, double y, double v, double w) {
    const double d = pr.sigma.det();
    if (!(pr.tau > 0.0) || !(d > 0.0))
        throw solver_error("eval_G: requires tau > 0 (Sigma must be positive definite)");
    double bx, bv;
    pr.b.apply(y, w, bx, bv);
    const double mx = x - bx;
    const double mv = v - bv;
    const double q = (pr.sigma.vv * mx * mx - 2.0 * pr.sigma.xv * mx * mv + pr.sigma.xx * mv * mv) / d;
    return std::exp(-0.5 * q) / (2.0 * 3.14159265358979323846 * std::sqrt(d));
}

// lower-triangular factor L with L L^T = Sigma
struct Chol2 {
    double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

inline Chol2 cholesky(const Sym2& s) {
    Chol2 c;
    if (s.xx <= 0.0) {
        if (s.xx < 0.0 || s.xv != 0.0) throw solver_error("cholesky: matrix not PSD");
        c.l22 = std::sqrt(std::max(s.vv, 0.0));
        return c;
    }
    c.l11 = std::sqrt(s.xx);
    c.l21 = s.xv / c.l11;
    const double r = s.vv - c.l21 * c.l21;
    c.l22 = std::sqrt(std::max(r, 0.0));
    return c;
}

} // namespace vfp
