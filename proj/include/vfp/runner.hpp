#pragma once

// Subcommand pipelines behind the CLI: reproducible run orchestration and
// artifact emission. Nothing here writes outside config.output_dir.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vfp/config.hpp"
#include "vfp/diagnostics.hpp"
#include "vfp/dynamics.hpp"
#include "vfp/haissinski.hpp"
#include "vfp/io.hpp"
#include "vfp/version.hpp"
#include "vfp/wakefield.hpp"

namespace vfp {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

namespace detail {

inline void write_manifest(const RunConfig& c, double wall_seconds) {
    std::ofstream os(c.output_dir + "/manifest.csv", std::ios::binary);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", (unsigned long long)fnv1a(echo_config(c)));
    os << "key,value\n";
    os << "config_hash," << hash << "\n";
    os << "version," << kVersion << "\n";
    os << "seed," << c.seed << "\n";
    os << "wall_time_s," << format_g17(wall_seconds) << "\n";
}

inline void write_run_log(const RunConfig& c) {
    const std::string echo = echo_config(c);
    std::ofstream os(c.output_dir + "/run.log", std::ios::binary);
    os << echo;
    std::cout << echo;
}

inline PhaseGrid initial_grid(const RunConfig& c, const Kernel& kernel) {
    const double bx = c.x_half_width(), bv = c.v_half_width();
    if (c.init_kind == "file") return read_grid(c.init_file);
    if (c.init_kind == "haissinski") {
        const double mix = c.effective_mixing(uniqueness_threshold(c.params, kernel));
        auto sol = solve_haissinski(c.params, kernel, -bx, bx, c.nx, c.tol, int(c.max_iter), mix);
        return steady_state_2d(sol, -bv, bv, c.nv);
    }
    PhaseGrid g(-bx, bx, -bv, bv, c.nx, c.nv);
    const double vx = c.init_varx_eff(), vv = c.init_varv_eff();
    const double amp = c.params.mass / (2.0 * 3.14159265358979323846 * std::sqrt(vx * vv));
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double dxc = g.x(i) - c.init_x0;
        for (std::size_t j = 0; j < g.nv; ++j) {
            const double dvc = g.v(j) - c.init_v0;
            g.at(i, j) = amp * std::exp(-0.5 * (dxc * dxc / vx + dvc * dvc / vv));
        }
    }
    return g;
}

inline int run_wake(const RunConfig& c) {
    // K^fs and its derivative on the mu lattice
    {
        std::ofstream os(c.output_dir + "/wake_kfs.csv", std::ios::binary);
        os << "mu,kfs,dkfs\n";
        const double dmu = (c.wake_mu_max - c.wake_mu_min) / double(c.wake_samples - 1);
        for (std::uint64_t i = 0; i < c.wake_samples; ++i) {
            const double mu = c.wake_mu_min + dmu * double(i);
            os << format_g17(mu) << ',' << format_g17(kfs_eval(mu)) << ',' << format_g17(kfs_deriv(mu))
               << "\n";
        }
    }
    // exact on-orbit potential on the matching xi lattice (xi = mu / (3 gamma^3))
    {
        std::ofstream os(c.output_dir + "/wake_potential.csv", std::ios::binary);
        os << "xi,V,VC,VS\n";
        const auto pot = ExactOrbitPotential::from_gamma(c.wake_gamma);
        const double g3 = 3.0 * c.wake_gamma * c.wake_gamma * c.wake_gamma;
        const double dmu = (c.wake_mu_max - c.wake_mu_min) / double(c.wake_samples - 1);
        for (std::uint64_t i = 0; i < c.wake_samples; ++i) {
            const double mu = c.wake_mu_min + dmu * double(i);
            const double xi = mu / g3;
            if (xi == 0.0) continue;  // on-particle singularity
            const auto parts = potential_exact(pot, xi);
            os << format_g17(xi) << ',' << format_g17(parts.total) << ',' << format_g17(parts.coulomb)
               << ',' << format_g17(parts.synchrotron) << "\n";
        }
    }
    return 0;
}

inline int run_haissinski(const RunConfig& c) {
    const auto kernel = c.make_kernel();
    const double bx = c.x_half_width();
    const double i_thres = uniqueness_threshold(c.params, kernel);
    const auto sol = solve_haissinski(c.params, kernel, -bx, bx, c.nx, c.tol, int(c.max_iter),
                                      c.effective_mixing(i_thres));
    write_profile(c.output_dir + "/sigma.vfpp", sol.sigma);
    const auto sc = stability_constants(c.params, kernel);
    std::ostringstream os;
    os << "key,value\n";
    os << "lambda_m," << format_g17(sc.lambda_m) << "\n";
    os << "lambda_M," << format_g17(sc.lambda_M) << "\n";
    os << "C_M," << format_g17(sc.c_m) << "\n";
    os << "C_inf," << format_g17(sc.c_inf) << "\n";
    os << "I_thres," << format_g17(sc.i_thres) << "\n";
    os << "iterations," << sol.iterations << "\n";
    os << "residual_l1," << format_g17(sol.residual_l1) << "\n";
    os << "contraction_estimate," << format_g17(sol.contraction_estimate) << "\n";
    std::cout << os.str();
    std::ofstream f(c.output_dir + "/haissinski.csv", std::ios::binary);
    f << os.str();
    return 0;
}

inline int run_evolve(const RunConfig& c) {
    const auto kernel = c.make_kernel();
    auto st = GridSolverState::make(initial_grid(c, kernel), c.params, kernel, c.effective_dt());
    std::vector<DiagRecord> recs;
    run_grid(st, c.t_end, c.diag_every, recs, nullptr, c.output_dir, c.dump_every);
    write_diag_csv(c.output_dir + "/diag.csv", recs);
    write_grid(c.output_dir + "/final.vfpg", st.grid);
    if (st.boundary_warnings > 0)
        std::cerr << "warning: boundary mass exceeded 1e-10 of total on " << st.boundary_warnings
                  << " steps; enlarge box_x/box_v\n";
    return 0;
}

inline int run_particles(const RunConfig& c) {
    const auto kernel = c.make_kernel();
    ParticleSolverState st;
    st.params = c.params;
    st.dt = c.effective_dt();
    st.x_min = -c.x_half_width();
    st.x_max = c.x_half_width();
    st.nx = c.nx;
    st.box_x = c.x_half_width();
    st.box_v = c.v_half_width();
    st.tables = KernelTables::build(kernel, c.nx, (st.x_max - st.x_min) / double(c.nx - 1));
    st.prop_half = Propagator::make(c.params, 0.5 * st.dt);
    st.ens = sample_gaussian_ensemble(c.n_particles, c.init_x0, c.init_v0, c.init_varx_eff(),
                                      c.init_varv_eff(), c.params.mass, c.seed);
    const auto n_steps = std::uint64_t(std::llround(c.t_end / st.dt));
    std::vector<DiagRecord> recs;
    auto sample = [&](double t) {
        DiagRecord r;
        r.t = t;
        r.mass = c.params.mass - st.overflow_warn_total;
        const auto m = ensemble_moments(st.ens);
        r.mean_x = m.mean_x;
        r.mean_v = m.mean_v;
        r.var_x = m.var_x;
        r.var_v = m.var_v;
        r.cov_xv = m.cov_xv;
        r.entropy = r.diss_lhs = r.diss_rhs = r.l2mu_dist = r.l1 = r.l2 = r.linf = std::nan("");
        return r;
    };
    recs.push_back(sample(0.0));
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        langevin_step(st);
        if ((s + 1) % std::max<std::uint64_t>(c.diag_every, 1) == 0 || s + 1 == n_steps)
            recs.push_back(sample(st.t));
    }
    write_diag_csv(c.output_dir + "/diag.csv", recs);
    const auto dep = deposit_density(st.ens, st.x_min, st.x_max, c.nx);
    write_profile(c.output_dir + "/rho.vfpp", dep.rho);
    return 0;
}

// columns of diag.csv by header name
inline std::vector<std::vector<double>> read_csv_columns(const std::string& path,
                                                         std::vector<std::string>& names) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw config_error("empty csv: " + path);
    names.clear();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(cell);
    std::vector<std::vector<double>> cols(names.size());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        for (std::size_t k = 0; k < names.size(); ++k) {
            std::getline(ls, cell, ',');
            cols[k].push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    return cols;
}

inline int run_stability(const RunConfig& c) {
    const auto kernel = c.make_kernel();
    const auto sc = stability_constants(c.params, kernel);
    std::vector<std::string> names;
    const auto cols = read_csv_columns(c.output_dir + "/diag.csv", names);
    std::size_t t_col = names.size(), d_col = names.size();
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == "t") t_col = k;
        if (names[k] == "l2mu_dist") d_col = k;
    }
    if (t_col == names.size() || d_col == names.size())
        throw config_error("diag.csv lacks t/l2mu_dist columns: " + c.output_dir + "/diag.csv");
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < cols[t_col].size(); ++i)
        if (std::isfinite(cols[d_col][i]) && cols[d_col][i] > 0.0)
            series.emplace_back(cols[t_col][i], cols[d_col][i]);
    const auto fit = fit_decay_rate(series);
    std::ostringstream os;
    os << "key,value\n";
    os << "lambda_m," << format_g17(sc.lambda_m) << "\n";
    os << "lambda_M," << format_g17(sc.lambda_M) << "\n";
    os << "C_M," << format_g17(sc.c_m) << "\n";
    os << "C_inf," << format_g17(sc.c_inf) << "\n";
    os << "I_thres," << format_g17(sc.i_thres) << "\n";
    os << "lambda_fit," << format_g17(fit.lambda) << "\n";
    os << "r_squared," << format_g17(fit.r_squared) << "\n";
    std::cout << os.str();
    std::ofstream f(c.output_dir + "/stability.csv", std::ios::binary);
    f << os.str();
    return 0;
}

} // namespace detail

// dispatch; exit 0 = success, 1 = solver fault, 2 = config error
inline int run(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(c.output_dir);
    detail::write_run_log(c);
    int rc = 0;
    if (c.subcommand == "wake") rc = detail::run_wake(c);
    else if (c.subcommand == "haissinski") rc = detail::run_haissinski(c);
    else if (c.subcommand == "evolve") rc = detail::run_evolve(c);
    else if (c.subcommand == "particles") rc = detail::run_particles(c);
    else if (c.subcommand == "stability") rc = detail::run_stability(c);
    else throw config_error("unknown subcommand: " + c.subcommand);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(c, wall);
    return rc;
}

} // namespace vfp
