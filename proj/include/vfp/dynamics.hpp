#pragma once

// Time integration of the full nonlinear system: Strang-split grid solver
// (exact linear transition + mean-field kick) and the Langevin particle twin.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vfp/convolution.hpp"
#include "vfp/diagnostics.hpp"
#include "vfp/errors.hpp"
#include "vfp/fft.hpp"
#include "vfp/grid.hpp"
#include "vfp/haissinski.hpp"
#include "vfp/interp.hpp"
#include "vfp/io.hpp"
#include "vfp/propagator.hpp"
#include "vfp/rng.hpp"
#include "vfp/wakefield.hpp"

namespace vfp {

inline constexpr int kDefaultInterpHalfWidth = 5;  // 10-point Lagrange

// clamp interpolation undershoot: values in (-tol, 0) are zeroed and counted,
// anything below -tol is a solver fault
inline std::size_t clamp_negativity(PhaseGrid& g, const char* where) {
    double maxf = 0.0;
    for (double v : g.values) maxf = std::max(maxf, std::fabs(v));
    const double tol = 1e-12 * maxf;
    std::size_t zeroed = 0;
    for (double& v : g.values) {
        if (std::isnan(v)) throw solver_error(std::string(where) + ": NaN in grid values");
        if (v < 0.0) {
            if (v < -tol)
                throw solver_error(std::string(where) + ": negativity " + std::to_string(v) +
                                   " beyond tolerance " + std::to_string(-tol));
            v = 0.0;
            ++zeroed;
        }
    }
    return zeroed;
}

// Exact linear transition applied to a grid: pushforward along B(tau)
// followed by the Sigma(tau) Gaussian blur as a Fourier multiplier on the
// periodic extension of the box.
class LinearStepper {
  public:
    LinearStepper(const ModelParams& p, double tau, const PhaseGrid& geom, int half_width = kDefaultInterpHalfWidth)
        : prop_(Propagator::make(p, tau)),
          half_width_(half_width),
          nx_(geom.nx),
          nv_(geom.nv),
          fft_(geom.nx, geom.nv),
          scratch_(geom.nx * geom.nv) {
        if (half_width_ < 2 || half_width_ > kInterpHalfWidthMax)
            throw config_error("interp half width must be in [2,5]");
        binv_ = prop_.b.inverse();
        growth_ = std::exp(2.0 * p.nu * tau);
        mult_.resize(nx_ * nv_);
        const double lx = double(nx_) * geom.dx();
        const double lv = double(nv_) * geom.dv();
        const double two_pi = 2.0 * 3.14159265358979323846;
        for (std::size_t i = 0; i < nx_; ++i) {
            const double mi = (i <= nx_ / 2) ? double(i) : double(i) - double(nx_);
            const double kx = two_pi * mi / lx;
            for (std::size_t j = 0; j < nv_; ++j) {
                const double mj = (j <= nv_ / 2) ? double(j) : double(j) - double(nv_);
                const double kv = two_pi * mj / lv;
                mult_[i * nv_ + j] = std::exp(
                    -0.5 * (prop_.sigma.xx * kx * kx + 2.0 * prop_.sigma.xv * kx * kv + prop_.sigma.vv * kv * kv));
            }
        }
    }

    const Propagator& propagator() const { return prop_; }

    // returns number of negative values zeroed
    std::size_t apply(PhaseGrid& g) {
        PhaseGrid pushed = g;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long ii = 0; ii < (long long)nx_; ++ii) {
            const std::size_t i = std::size_t(ii);
            const double x = g.x(i);
            for (std::size_t j = 0; j < nv_; ++j) {
                const double v = g.v(j);
                double yx, yv;
                binv_.apply(x, v, yx, yv);
                const double gx = (yx - g.x_min) / g.dx();
                const double gy = (yv - g.v_min) / g.dv();
                pushed.at(i, j) = growth_ * sample_grid(g, gx, gy, half_width_);
            }
        }
        for (std::size_t k = 0; k < scratch_.size(); ++k) scratch_[k] = pushed.values[k];
        fft_.forward(scratch_.data());
        for (std::size_t k = 0; k < scratch_.size(); ++k) scratch_[k] *= mult_[k];
        fft_.inverse(scratch_.data());
        for (std::size_t k = 0; k < scratch_.size(); ++k) g.values[k] = scratch_[k].real();
        return clamp_negativity(g, "linear_step_grid");
    }

  private:
    Propagator prop_;
    int half_width_;
    std::size_t nx_, nv_;
    Mat2 binv_;
    double growth_ = 1.0;
    std::vector<double> mult_;
    Fft2 fft_;
    std::vector<std::complex<double>> scratch_;
};

// one-off convenience form
inline PhaseGrid linear_step_grid(const PhaseGrid& g, const ModelParams& p, double tau,
                                  int half_width = kDefaultInterpHalfWidth) {
    PhaseGrid out = g;
    LinearStepper stepper(p, tau, g, half_width);
    stepper.apply(out);
    return out;
}

// shift each x-column in v by +F(x) dt (zero inflow at the v-boundaries)
inline PhaseGrid vlasov_kick(const PhaseGrid& g, const Profile1D& F, double dt,
                             int half_width = kDefaultInterpHalfWidth) {
    if (F.n() != g.nx) throw solver_error("vlasov_kick: force profile must live on the grid x-lattice");
    const double vext = g.v_max - g.v_min;
    PhaseGrid out = g;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long ii = 0; ii < (long long)g.nx; ++ii) {
        const std::size_t i = std::size_t(ii);
        const double shift = F.values[i] * dt;
        if (std::fabs(shift) > 0.25 * vext)
            throw solver_error("vlasov_kick: kick CFL violated, |F dt| = " + std::to_string(std::fabs(shift)));
        const double cells = shift / g.dv();
        const double* col = g.values.data() + i * g.nv;
        double* outcol = out.values.data() + i * g.nv;
        for (std::size_t j = 0; j < g.nv; ++j)
            outcol[j] = sample_line(col, g.nv, double(j) - cells, half_width);
    }
    clamp_negativity(out, "vlasov_kick");
    return out;
}

struct GridSolverState {
    PhaseGrid grid;
    double t = 0.0;
    ModelParams params;
    Kernel kernel;
    KernelTables tables;
    double dt = 0.0;
    int interp_half_width = kDefaultInterpHalfWidth;
    std::uint64_t step_count = 0;
    std::size_t zeroed_total = 0;
    std::size_t boundary_warnings = 0;

    // lazily built half-step propagator bound to the grid geometry
    std::shared_ptr<LinearStepper> half_step;

    static GridSolverState make(PhaseGrid g, const ModelParams& p, const Kernel& k, double dt,
                                int half_width = kDefaultInterpHalfWidth) {
        p.validate();
        if (!(dt > 0.0)) throw config_error("dt > 0 required");
        GridSolverState st;
        st.tables = KernelTables::build(k, g.nx, g.dx());
        st.grid = std::move(g);
        st.params = p;
        st.kernel = k;
        st.dt = dt;
        st.interp_half_width = half_width;
        st.half_step = std::make_shared<LinearStepper>(p, 0.5 * dt, st.grid, half_width);
        return st;
    }
};

inline void strang_step(GridSolverState& st) {
    st.zeroed_total += st.half_step->apply(st.grid);
    if (st.params.current != 0.0) {
        const auto rho = marginal_density(st.grid);
        const auto F = force_field_fft(rho, st.tables, st.params.current);
        st.grid = vlasov_kick(st.grid, F, st.dt, st.interp_half_width);
    }
    st.zeroed_total += st.half_step->apply(st.grid);
    st.t += st.dt;
    ++st.step_count;
}

// mass carried by the outermost node ring, relative to the total
inline double boundary_mass_fraction(const PhaseGrid& g) {
    double edge = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double wi = trap_weight(i, g.nx);
        for (std::size_t j = 0; j < g.nv; ++j) {
            const double w = wi * trap_weight(j, g.nv) * std::fabs(g.at(i, j));
            tot += w;
            if (i == 0 || i + 1 == g.nx || j == 0 || j + 1 == g.nv) edge += w;
        }
    }
    return tot > 0.0 ? edge / tot : 0.0;
}

inline DiagRecord sample_diagnostics(const GridSolverState& st, const PhaseGrid* f_inf) {
    DiagRecord r;
    r.t = st.t;
    const auto m = grid_moments(st.grid);
    r.mass = m.mass;
    r.mean_x = m.mean_x;
    r.mean_v = m.mean_v;
    r.var_x = m.var_x;
    r.var_v = m.var_v;
    r.cov_xv = m.cov_xv;
    const auto e = free_energy(st.grid, st.params, st.tables);
    r.entropy = e.entropy;
    r.diss_lhs = e.fisher;  // dE/dt added after the run, when neighbors exist
    r.diss_rhs = e.odd_flux;
    const auto n = grid_norms(st.grid);
    r.l1 = n.l1;
    r.l2 = n.l2;
    r.linf = n.linf;
    if (f_inf) r.l2mu_dist = l2mu_distance(st.grid, *f_inf);
    return r;
}

// diss_lhs currently holds fisher; add the finite-difference dE/dt
inline void finish_dissipation_lhs(std::vector<DiagRecord>& recs) {
    const std::size_t n = recs.size();
    if (n < 2) return;
    std::vector<double> dEdt(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0)
            dEdt[k] = (recs[1].entropy - recs[0].entropy) / (recs[1].t - recs[0].t);
        else if (k + 1 == n)
            dEdt[k] = (recs[n - 1].entropy - recs[n - 2].entropy) / (recs[n - 1].t - recs[n - 2].t);
        else
            dEdt[k] = (recs[k + 1].entropy - recs[k - 1].entropy) / (recs[k + 1].t - recs[k - 1].t);
    }
    for (std::size_t k = 0; k < n; ++k) recs[k].diss_lhs += dEdt[k];
}

// advance to t_end, sampling diagnostics every diag_every steps (and at the
// start); records already gathered survive a mid-run fault because the
// caller's vector is filled in place
inline void run_grid(GridSolverState& st, double t_end, std::uint64_t diag_every,
                     std::vector<DiagRecord>& records, const PhaseGrid* f_inf = nullptr,
                     const std::string& dump_dir = "", std::uint64_t dump_every = 0) {
    if (!(t_end > st.t)) throw config_error("run_grid: t_end must exceed current time");
    if (diag_every == 0) diag_every = 1;
    const auto n_steps = std::uint64_t(std::llround((t_end - st.t) / st.dt));
    records.push_back(sample_diagnostics(st, f_inf));
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        strang_step(st);
        if (boundary_mass_fraction(st.grid) > 1e-10) ++st.boundary_warnings;
        if ((s + 1) % diag_every == 0 || s + 1 == n_steps)
            records.push_back(sample_diagnostics(st, f_inf));
        if (dump_every > 0 && ((s + 1) % dump_every == 0)) {
            char name[64];
            std::snprintf(name, sizeof name, "frame_%06llu.vfpg", (unsigned long long)(s + 1));
            write_grid(dump_dir + "/" + name, st.grid);
        }
    }
    finish_dissipation_lhs(records);
}

// ---------------------------------------------------------------------------
// particle twin

struct Ensemble {
    std::vector<double> xs, vs;
    std::uint64_t seed = 0;
    double weight = 0.0;  // mass / N

    std::size_t size() const { return xs.size(); }
};

inline Ensemble sample_gaussian_ensemble(std::size_t n, double mean_x, double mean_v, double var_x,
                                         double var_v, double total_mass, std::uint64_t seed) {
    Ensemble e;
    e.seed = seed;
    e.weight = total_mass / double(n);
    e.xs.resize(n);
    e.vs.resize(n);
    const CounterRng rng{seed};
    const double sx = std::sqrt(var_x), sv = std::sqrt(var_v);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < (long long)n; ++i) {
        double z0, z1;
        rng.normal_pair(std::uint64_t(i), ~std::uint64_t(0), z0, z1);  // init stream
        e.xs[i] = mean_x + sx * z0;
        e.vs[i] = mean_v + sv * z1;
    }
    return e;
}

// exact linear transition with additive N(0, Sigma(tau)) noise; noise_stream
// must differ between the two half steps of one time step
inline void linear_step_particles(Ensemble& e, const Propagator& prop, std::uint64_t noise_stream,
                                  bool with_noise = true) {
    const Chol2 L = cholesky(prop.sigma);
    const Mat2 B = prop.b;
    const CounterRng rng{e.seed};
    const std::size_t n = e.size();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < (long long)n; ++i) {
        double zx = 0.0, zv = 0.0;
        if (with_noise) {
            double z0, z1;
            rng.normal_pair(std::uint64_t(i), noise_stream, z0, z1);
            zx = L.l11 * z0;
            zv = L.l21 * z0 + L.l22 * z1;
        }
        const double x = e.xs[i], v = e.vs[i];
        e.xs[i] = B.a11 * x + B.a12 * v + zx;
        e.vs[i] = B.a21 * x + B.a22 * v + zv;
    }
}

struct Deposit {
    Profile1D rho;
    double overflow_mass = 0.0;
};

// cloud-in-cell deposition onto the x node lattice; chunked fixed-order
// accumulation keeps the result independent of thread count
inline Deposit deposit_density(const Ensemble& e, double x_min, double x_max, std::size_t nx) {
    Deposit d;
    d.rho = Profile1D(x_min, x_max, nx);
    const double dx = d.rho.dx();
    const std::size_t chunk = 8192;
    const std::size_t nchunks = (e.size() + chunk - 1) / chunk;
    std::vector<std::vector<double>> partial(nchunks);
    std::vector<double> overflow(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long c = 0; c < (long long)nchunks; ++c) {
        auto& h = partial[c];
        h.assign(nx, 0.0);
        const std::size_t lo = std::size_t(c) * chunk;
        const std::size_t hi = std::min(e.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const double g = (e.xs[i] - x_min) / dx;
            if (g < 0.0 || g > double(nx - 1)) {
                overflow[c] += e.weight;
                continue;
            }
            std::size_t ix = std::size_t(g);
            if (ix >= nx - 1) ix = nx - 2;
            const double t = g - double(ix);
            h[ix] += (1.0 - t) * e.weight;
            h[ix + 1] += t * e.weight;
        }
    }
    for (std::size_t c = 0; c < nchunks; ++c) {
        for (std::size_t i = 0; i < nx; ++i) d.rho.values[i] += partial[c][i];
        d.overflow_mass += overflow[c];
    }
    for (auto& v : d.rho.values) v /= dx;
    return d;
}

struct EnsembleMoments {
    double mean_x = 0.0, mean_v = 0.0;
    double var_x = 0.0, var_v = 0.0, cov_xv = 0.0;
};

inline EnsembleMoments ensemble_moments(const Ensemble& e) {
    const std::size_t n = e.size();
    const std::size_t chunk = 8192;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> sx(nchunks, 0.0), sv(nchunks, 0.0), sxx(nchunks, 0.0), svv(nchunks, 0.0),
        sxv(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long c = 0; c < (long long)nchunks; ++c) {
        const std::size_t lo = std::size_t(c) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            a += e.xs[i];
            b += e.vs[i];
            aa += e.xs[i] * e.xs[i];
            bb += e.vs[i] * e.vs[i];
            ab += e.xs[i] * e.vs[i];
        }
        sx[c] = a; sv[c] = b; sxx[c] = aa; svv[c] = bb; sxv[c] = ab;
    }
    double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
    for (std::size_t c = 0; c < nchunks; ++c) {
        a += sx[c]; b += sv[c]; aa += sxx[c]; bb += svv[c]; ab += sxv[c];
    }
    EnsembleMoments m;
    m.mean_x = a / double(n);
    m.mean_v = b / double(n);
    m.var_x = aa / double(n) - m.mean_x * m.mean_x;
    m.var_v = bb / double(n) - m.mean_v * m.mean_v;
    m.cov_xv = ab / double(n) - m.mean_x * m.mean_v;
    return m;
}

struct ParticleSolverState {
    Ensemble ens;
    double t = 0.0;
    ModelParams params;
    KernelTables tables;
    double dt = 0.0;
    double x_min = 0.0, x_max = 0.0;
    std::size_t nx = 0;
    double box_x = 0.0, box_v = 0.0;  // blow-up sentinel = 10x these half-widths
    std::uint64_t step_count = 0;
    double overflow_warn_total = 0.0;
    Propagator prop_half;
};

// Strang arrangement mirroring the grid: half transition, density deposit,
// force kick, half transition
inline void langevin_step(ParticleSolverState& st, bool with_noise = true) {
    linear_step_particles(st.ens, st.prop_half, 2 * st.step_count, with_noise);
    if (st.params.current != 0.0) {
        auto dep = deposit_density(st.ens, st.x_min, st.x_max, st.nx);
        if (dep.overflow_mass > 1e-6 * st.params.mass) st.overflow_warn_total += dep.overflow_mass;
        const auto F = force_field_fft(dep.rho, st.tables, st.params.current);
        const double dx = dep.rho.dx();
        const std::size_t n = st.ens.size();
        const double dt = st.dt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long i = 0; i < (long long)n; ++i) {
            double g = (st.ens.xs[i] - st.x_min) / dx;
            g = std::clamp(g, 0.0, double(st.nx - 1));
            std::size_t ix = std::size_t(g);
            if (ix >= st.nx - 1) ix = st.nx - 2;
            const double t = g - double(ix);
            const double f = (1.0 - t) * F.values[ix] + t * F.values[ix + 1];
            st.ens.vs[i] += f * dt;
        }
    }
    linear_step_particles(st.ens, st.prop_half, 2 * st.step_count + 1, with_noise);
    st.t += st.dt;
    ++st.step_count;
    const double bx = 10.0 * st.box_x, bv = 10.0 * st.box_v;
    for (std::size_t i = 0; i < st.ens.size(); ++i) {
        if (!std::isfinite(st.ens.xs[i]) || !std::isfinite(st.ens.vs[i]) ||
            std::fabs(st.ens.xs[i]) > bx || std::fabs(st.ens.vs[i]) > bv)
            throw solver_error("langevin_step: particle " + std::to_string(i) +
                               " escaped the 10x simulation box (blow-up sentinel)");
    }
}

} // namespace vfp
