#pragma once

// Interaction kernels: the ultrarelativistic free-space wakefield K^fs, the
// exact on-orbit potential it approximates, generic tabulated/analytic
// kernels, and the mean-field force assembly.

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vfp/errors.hpp"
#include "vfp/grid.hpp"

namespace vfp {

inline constexpr double kKfsSeriesCut = 1e-4;

// K^fs(mu) = 2 (cosh(5u/3) - cosh u)/sinh(2u), u = asinh(mu), supported on mu > 0.
// The cosh difference is formed as 2 sinh(4u/3) sinh(u/3), which does not cancel.
inline double kfs_eval(double mu) {
    if (!(mu > 0.0)) return 0.0;
    if (mu < kKfsSeriesCut) {
        const double m2 = mu * mu;
        return mu * (8.0 / 9.0 + m2 * (-112.0 / 243.0 + m2 * (2240.0 / 6561.0)));
    }
    const double u = std::asinh(mu);
    return 4.0 * std::sinh(4.0 * u / 3.0) * std::sinh(u / 3.0) / std::sinh(2.0 * u);
}

inline double kfs_deriv(double mu) {
    if (mu < 0.0) return 0.0;
    if (mu < kKfsSeriesCut) {
        const double m2 = mu * mu;
        return 8.0 / 9.0 + m2 * (-112.0 / 81.0 + m2 * (11200.0 / 6561.0));
    }
    const double u = std::asinh(mu);
    const double s43 = std::sinh(4.0 * u / 3.0), c43 = std::cosh(4.0 * u / 3.0);
    const double s13 = std::sinh(u / 3.0), c13 = std::cosh(u / 3.0);
    const double s2 = std::sinh(2.0 * u), c2 = std::cosh(2.0 * u);
    const double dKdu = 4.0 * ((4.0 / 3.0) * c43 * s13 + (1.0 / 3.0) * s43 * c13) / s2
                        - 8.0 * s43 * s13 * c2 / (s2 * s2);
    return dKdu / std::sqrt(1.0 + mu * mu);
}

// sup of K^fs and its location, solved once from dK^fs = 0 on (1, 4)
inline double kfs_argmax() {
    static const double mu_star = [] {
        double lo = 1.0, hi = 4.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (kfs_deriv(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return mu_star;
}

inline double kfs_sup() {
    static const double v = kfs_eval(kfs_argmax());
    return v;
}

// unique alpha in (-pi, pi) with sign(alpha) = sign(xi) solving
// xi = alpha - beta |sin alpha|; safeguarded Newton per sign branch
inline double retarded_angle(double xi, double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw solver_error("retarded_angle: beta must be in [0,1)");
    if (xi == 0.0) return 0.0;
    const bool pos = xi > 0.0;
    const double target = std::fabs(xi);
    double lo = 0.0, hi = 3.14159265358979323846;
    // branch equations: pos: a - beta sin a = target; neg: a + beta sin a = target
    double a = pos ? std::cbrt(6.0 * target) : target / (1.0 + beta);
    if (!(a > lo && a < hi)) a = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const double sn = std::sin(a), cs = std::cos(a);
        const double g = pos ? (a - beta * sn - target) : (a + beta * sn - target);
        const double gp = pos ? (1.0 - beta * cs) : (1.0 + beta * cs);
        if (g > 0.0) hi = a; else lo = a;
        double next = a - g / gp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - a) <= 4e-17 * a) { a = next; break; }
        a = next;
        if (it == 199) throw solver_error("retarded_angle: no convergence");
    }
    return pos ? a : -a;
}

struct ExactOrbitPotential {
    double beta = 0.0;
    double gamma = 1.0;

    static ExactOrbitPotential from_gamma(double gamma) {
        if (!(gamma >= 1.0)) throw solver_error("ExactOrbitPotential: gamma >= 1 required");
        ExactOrbitPotential p;
        p.gamma = gamma;
        p.beta = std::sqrt(1.0 - 1.0 / (gamma * gamma));
        return p;
    }
    static ExactOrbitPotential from_beta(double beta) {
        if (!(beta >= 0.0 && beta < 1.0)) throw solver_error("ExactOrbitPotential: beta in [0,1) required");
        ExactOrbitPotential p;
        p.beta = beta;
        p.gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
        return p;
    }
    // 1 - beta^2 without cancellation
    double inv_gamma_sq() const { return 1.0 / (gamma * gamma); }
};

struct PotentialParts {
    double total = 0.0;
    double coulomb = 0.0;
    double synchrotron = 0.0;
};

// V = V^C + V^S at observation angle xi (0 < |xi| < pi/2).
// The stable pieces: 1 - beta^2 = gamma^-2, and
// 1 - beta cos a = beta (1 - cos a) + (1 - beta) with 1 - cos a = 2 sin^2(a/2).
inline PotentialParts potential_exact(const ExactOrbitPotential& pot, double xi) {
    if (xi == 0.0) throw solver_error("potential_exact: on-particle singularity at xi = 0");
    if (!(std::fabs(xi) < 1.5707963267948966))
        throw solver_error("potential_exact: |xi| < pi/2 required");
    const double inv_g2 = pot.inv_gamma_sq();
    const double beta = pot.beta;
    const double a = retarded_angle(xi, beta);
    const double sa = std::sin(a), ca = std::cos(a);
    const double abs_sxi = std::fabs(std::sin(xi));
    const double abs_sa = std::fabs(sa);
    const double one_m_beta = inv_g2 / (1.0 + beta);
    double dpiece;  // |sin a| - beta sin a cos a
    if (a >= 0.0) {
        const double h = std::sin(0.5 * a);
        const double one_m_bca = beta * 2.0 * h * h + one_m_beta;
        dpiece = abs_sa * one_m_bca;
    } else {
        dpiece = abs_sa * (1.0 + beta * ca);
    }
    PotentialParts r;
    r.coulomb = inv_g2 / (2.0 * abs_sxi);
    const double num = inv_g2 * (abs_sxi - dpiece) + 2.0 * beta * beta * sa * sa * abs_sxi;
    r.synchrotron = num / (2.0 * abs_sxi * dpiece);
    r.total = r.coulomb + r.synchrotron;
    return r;
}

// Interaction potential K with value/derivative evaluation and metadata.
struct Kernel {
    enum class Kind { free_space, tabulated, analytic_even };

    Kind kind = Kind::free_space;
    double scale_amp = 1.0;  // A
    double scale_len = 1.0;  // l
    std::string analytic_name;
    Profile1D table_k;   // tabulated kind: K samples
    Profile1D table_dk;  // tabulated kind: dK/dx samples
    double k_inf_norm = 0.0;
    double dk_inf_norm = 0.0;
    bool is_even = false;

    static Kernel free_space(double amp = 1.0, double len = 1.0) {
        if (!(amp > 0.0 && len > 0.0)) throw config_error("free_space kernel: A > 0 and l > 0 required");
        Kernel k;
        k.kind = Kind::free_space;
        k.scale_amp = amp;
        k.scale_len = len;
        k.k_inf_norm = amp * kfs_sup();
        k.dk_inf_norm = amp / len * (8.0 / 9.0);
        k.is_even = false;
        return k;
    }

    static Kernel gaussian_well() {
        Kernel k;
        k.kind = Kind::analytic_even;
        k.analytic_name = "gaussian_well";
        k.k_inf_norm = 1.0;                       // max of e^{-x^2}
        k.dk_inf_norm = std::sqrt(2.0 / std::exp(1.0));  // max |2x e^{-x^2}| at x = 1/sqrt(2)
        k.is_even = true;
        return k;
    }

    static Kernel tabulated(Profile1D k_samples, Profile1D dk_samples, bool even) {
        check_finite(k_samples, "tabulated kernel K");
        check_finite(dk_samples, "tabulated kernel dK");
        if (k_samples.x_min != dk_samples.x_min || k_samples.x_max != dk_samples.x_max)
            throw config_error("tabulated kernel: K and dK tables must share extents");
        Kernel k;
        k.kind = Kind::tabulated;
        k.table_k = std::move(k_samples);
        k.table_dk = std::move(dk_samples);
        k.is_even = even;
        for (double v : k.table_k.values) k.k_inf_norm = std::max(k.k_inf_norm, std::fabs(v));
        for (double v : k.table_dk.values) k.dk_inf_norm = std::max(k.dk_inf_norm, std::fabs(v));
        return k;
    }
};

namespace detail {

inline double table_lookup(const Profile1D& t, double x) {
    if (x < t.x_min || x > t.x_max) return 0.0;  // wake decays; outside table -> 0
    const double g = (x - t.x_min) / t.dx();
    std::size_t i = std::size_t(g);
    if (i >= t.n() - 1) i = t.n() - 2;
    const double s = g - double(i);
    return (1.0 - s) * t.values[i] + s * t.values[i + 1];
}

} // namespace detail

inline double kernel_eval(const Kernel& k, double x) {
    switch (k.kind) {
        case Kernel::Kind::free_space:
            return k.scale_amp * kfs_eval(x / k.scale_len);
        case Kernel::Kind::tabulated:
            return detail::table_lookup(k.table_k, x);
        case Kernel::Kind::analytic_even:
            return std::exp(-x * x);
    }
    return 0.0;
}

inline double kernel_deriv(const Kernel& k, double x) {
    switch (k.kind) {
        case Kernel::Kind::free_space:
            return k.scale_amp / k.scale_len * kfs_deriv(x / k.scale_len);
        case Kernel::Kind::tabulated:
            return detail::table_lookup(k.table_dk, x);
        case Kernel::Kind::analytic_even:
            return -2.0 * x * std::exp(-x * x);
    }
    return 0.0;
}

// quadrature value of dK at displacement 0: mean of the one-sided limits
// (dK^fs jumps 0 -> 8/9 across the origin)
inline double kernel_deriv_mean0(const Kernel& k) {
    if (k.kind == Kernel::Kind::free_space)
        return 0.5 * k.scale_amp / k.scale_len * (8.0 / 9.0);
    return kernel_deriv(k, 0.0);
}

inline std::pair<double, double> even_odd_split(const Kernel& k, double x) {
    const double kp = kernel_eval(k, x);
    const double km = kernel_eval(k, -x);
    return {0.5 * (kp + km), 0.5 * (kp - km)};
}

// F(x_i) = -I * trapezoid_y dK(x_i - y) rho(y); direct quadrature path.
// The displacement-zero node uses the jump mean so that kernels with a
// discontinuous derivative keep second-order quadrature.
inline Profile1D force_field(const Profile1D& rho, const Kernel& k, double current) {
    const std::size_t n = rho.n();
    Profile1D F(rho.x_min, rho.x_max, n);
    if (current == 0.0) return F;
    const double dx = rho.dx();
    std::vector<double> dk(2 * n - 1);
    for (std::size_t d = 0; d < 2 * n - 1; ++d) {
        const double disp = (double(d) - double(n - 1)) * dx;
        dk[d] = (d == n - 1) ? kernel_deriv_mean0(k) : kernel_deriv(k, disp);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += dk[i - j + n - 1] * trap_weight(j, n) * rho.values[j];
        F.values[i] = -current * dx * s;
    }
    return F;
}

} // namespace vfp
