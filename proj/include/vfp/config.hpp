#pragma once

// Run configuration: flat key = value text files plus command-line overrides
// (--key value). Flags win over file values; every effective value can be
// echoed back in a form that re-parses identically.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vfp/errors.hpp"
#include "vfp/fft.hpp"
#include "vfp/grid.hpp"
#include "vfp/io.hpp"
#include "vfp/wakefield.hpp"

namespace vfp {

struct RunConfig {
    std::string subcommand;  // wake | haissinski | evolve | particles | stability

    ModelParams params;

    // kernel spec
    std::string kernel_kind = "free_space";  // free_space | gaussian_well | tabulated
    double kernel_scale_amp = 1.0;
    double kernel_scale_len = 1.0;
    std::string kernel_table;        // VFPP path with K samples (tabulated)
    std::string kernel_table_deriv;  // VFPP path with dK samples (tabulated)
    bool kernel_even = false;        // evenness flag for tabulated kernels

    // numerics
    double dt = 0.0;  // 0 = default min(0.01/nu, 0.1/sqrt(alpha))
    double t_end = 5.0;
    std::uint64_t nx = 256, nv = 256;
    double box_x = 8.0, box_v = 8.0;  // half-widths in thermal units
    std::uint64_t n_particles = 100000;
    std::uint64_t seed = 12345;
    std::uint64_t diag_every = 10;
    std::uint64_t dump_every = 0;
    double tol = 1e-10;
    std::uint64_t max_iter = 200;
    double mixing = 0.0;  // 0 = auto: 1 below I_thres, 0.2 above

    // initial condition for evolve/particles
    std::string init_kind = "gaussian";  // gaussian | haissinski | file
    double init_x0 = 0.0, init_v0 = 0.0;
    double init_var_x = 0.0, init_var_v = 0.0;  // 0 = thermal (theta/alpha, theta)
    std::string init_file;

    // wake table emission
    double wake_gamma = 100.0;
    double wake_mu_min = -2.0;
    double wake_mu_max = 8.5;
    std::uint64_t wake_samples = 673;

    std::string output_dir = "out";

    double effective_dt() const {
        if (dt > 0.0) return dt;
        return std::min(0.01 / params.nu, 0.1 / std::sqrt(params.alpha));
    }
    double effective_mixing(double i_thres) const {
        if (mixing > 0.0) return mixing;
        return params.current < i_thres ? 1.0 : 0.2;
    }
    double x_half_width() const { return box_x * std::sqrt(params.theta / params.alpha); }
    double v_half_width() const { return box_v * std::sqrt(params.theta); }
    double init_varx_eff() const { return init_var_x > 0.0 ? init_var_x : params.theta / params.alpha; }
    double init_varv_eff() const { return init_var_v > 0.0 ? init_var_v : params.theta; }

    Kernel make_kernel() const {
        if (kernel_kind == "free_space") return Kernel::free_space(kernel_scale_amp, kernel_scale_len);
        if (kernel_kind == "gaussian_well") return Kernel::gaussian_well();
        if (kernel_kind == "tabulated") {
            if (kernel_table.empty() || kernel_table_deriv.empty())
                throw config_error("tabulated kernel requires kernel.table and kernel.table_deriv paths");
            return Kernel::tabulated(read_profile(kernel_table), read_profile(kernel_table_deriv), kernel_even);
        }
        throw config_error("unknown kernel.kind '" + kernel_kind +
                           "' (expected free_space | gaussian_well | tabulated)");
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw config_error("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size() || d < 0) throw std::invalid_argument("neg");
        return std::uint64_t(d);
    } catch (...) {
        throw config_error("key '" + key + "': cannot parse '" + v + "' as a non-negative integer");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw config_error("key '" + key + "': cannot parse '" + v + "' as a boolean");
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace detail

inline void apply_key(RunConfig& c, const std::string& key, const std::string& val) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_u64;
    if (key == "subcommand") c.subcommand = val;
    else if (key == "alpha") c.params.alpha = parse_double(key, val);
    else if (key == "nu") c.params.nu = parse_double(key, val);
    else if (key == "theta") c.params.theta = parse_double(key, val);
    else if (key == "current") c.params.current = parse_double(key, val);
    else if (key == "mass") c.params.mass = parse_double(key, val);
    else if (key == "kernel.kind") c.kernel_kind = val;
    else if (key == "kernel.scale_amp") c.kernel_scale_amp = parse_double(key, val);
    else if (key == "kernel.scale_len") c.kernel_scale_len = parse_double(key, val);
    else if (key == "kernel.table") c.kernel_table = val;
    else if (key == "kernel.table_deriv") c.kernel_table_deriv = val;
    else if (key == "kernel.even") c.kernel_even = parse_bool(key, val);
    else if (key == "dt") c.dt = parse_double(key, val);
    else if (key == "t_end") c.t_end = parse_double(key, val);
    else if (key == "nx") c.nx = parse_u64(key, val);
    else if (key == "nv") c.nv = parse_u64(key, val);
    else if (key == "box_x") c.box_x = parse_double(key, val);
    else if (key == "box_v") c.box_v = parse_double(key, val);
    else if (key == "n_particles") c.n_particles = parse_u64(key, val);
    else if (key == "seed") c.seed = parse_u64(key, val);
    else if (key == "diag_every") c.diag_every = parse_u64(key, val);
    else if (key == "dump_every") c.dump_every = parse_u64(key, val);
    else if (key == "tol") c.tol = parse_double(key, val);
    else if (key == "max_iter") c.max_iter = parse_u64(key, val);
    else if (key == "mixing") c.mixing = parse_double(key, val);
    else if (key == "init.kind") c.init_kind = val;
    else if (key == "init.x0") c.init_x0 = parse_double(key, val);
    else if (key == "init.v0") c.init_v0 = parse_double(key, val);
    else if (key == "init.var_x") c.init_var_x = parse_double(key, val);
    else if (key == "init.var_v") c.init_var_v = parse_double(key, val);
    else if (key == "init.file") c.init_file = val;
    else if (key == "wake.gamma") c.wake_gamma = parse_double(key, val);
    else if (key == "wake.mu_min") c.wake_mu_min = parse_double(key, val);
    else if (key == "wake.mu_max") c.wake_mu_max = parse_double(key, val);
    else if (key == "wake.samples") c.wake_samples = parse_u64(key, val);
    else if (key == "output_dir") c.output_dir = val;
    else throw config_error("unknown config key '" + key + "'");
}

inline void load_config_file(RunConfig& c, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        apply_key(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

inline void validate_config(RunConfig& c) {
    static const char* subcommands[] = {"wake", "haissinski", "evolve", "particles", "stability"};
    bool ok = false;
    for (auto s : subcommands) ok = ok || c.subcommand == s;
    if (!ok)
        throw config_error("subcommand must be one of wake | haissinski | evolve | particles | stability, got '" +
                           c.subcommand + "'");
    c.params.validate();
    if (c.kernel_kind != "free_space" && c.kernel_kind != "gaussian_well" && c.kernel_kind != "tabulated")
        throw config_error("kernel.kind must be free_space | gaussian_well | tabulated");
    if (c.kernel_kind == "tabulated") {
        for (const auto& p : {c.kernel_table, c.kernel_table_deriv})
            if (!std::ifstream(p)) throw config_error("kernel table path does not exist: " + p);
    }
    if (c.dt < 0.0) throw config_error("dt must be >= 0 (0 selects the default)");
    if (!(c.t_end > 0.0)) throw config_error("t_end > 0 required");
    if (c.nx < 8 || c.nv < 8) throw config_error("nx, nv >= 8 required");
    if ((c.subcommand == "evolve" || c.subcommand == "particles") && (!is_pow2(c.nx) || !is_pow2(c.nv)))
        throw config_error("nx and nv must be powers of two for the spectral solver");
    if (!(c.box_x > 0.0 && c.box_v > 0.0)) throw config_error("box_x, box_v > 0 required");
    if (c.n_particles < 1) throw config_error("n_particles >= 1 required");
    if (!(c.tol > 0.0)) throw config_error("tol > 0 required");
    if (c.max_iter < 1) throw config_error("max_iter >= 1 required");
    if (c.mixing < 0.0 || c.mixing > 1.0) throw config_error("mixing must be in (0,1], or 0 for auto");
    if (c.init_kind != "gaussian" && c.init_kind != "haissinski" && c.init_kind != "file")
        throw config_error("init.kind must be gaussian | haissinski | file");
    if (c.init_kind == "file" && !std::ifstream(c.init_file))
        throw config_error("init.file does not exist: " + c.init_file);
    if (!(c.wake_gamma > 1.0)) throw config_error("wake.gamma > 1 required");
    if (c.wake_samples < 2) throw config_error("wake.samples >= 2 required");
}

// canonical echo: one key = value per line, every field, re-parseable
inline std::string echo_config(const RunConfig& c) {
    std::ostringstream os;
    auto num = [](double v) { return format_g17(v); };
    os << "subcommand = " << c.subcommand << "\n";
    os << "alpha = " << num(c.params.alpha) << "\n";
    os << "nu = " << num(c.params.nu) << "\n";
    os << "theta = " << num(c.params.theta) << "\n";
    os << "current = " << num(c.params.current) << "\n";
    os << "mass = " << num(c.params.mass) << "\n";
    os << "kernel.kind = " << c.kernel_kind << "\n";
    os << "kernel.scale_amp = " << num(c.kernel_scale_amp) << "\n";
    os << "kernel.scale_len = " << num(c.kernel_scale_len) << "\n";
    if (!c.kernel_table.empty()) os << "kernel.table = " << c.kernel_table << "\n";
    if (!c.kernel_table_deriv.empty()) os << "kernel.table_deriv = " << c.kernel_table_deriv << "\n";
    os << "kernel.even = " << (c.kernel_even ? 1 : 0) << "\n";
    os << "dt = " << num(c.dt) << "\n";
    os << "t_end = " << num(c.t_end) << "\n";
    os << "nx = " << c.nx << "\n";
    os << "nv = " << c.nv << "\n";
    os << "box_x = " << num(c.box_x) << "\n";
    os << "box_v = " << num(c.box_v) << "\n";
    os << "n_particles = " << c.n_particles << "\n";
    os << "seed = " << c.seed << "\n";
    os << "diag_every = " << c.diag_every << "\n";
    os << "dump_every = " << c.dump_every << "\n";
    os << "tol = " << num(c.tol) << "\n";
    os << "max_iter = " << c.max_iter << "\n";
    os << "mixing = " << num(c.mixing) << "\n";
    os << "init.kind = " << c.init_kind << "\n";
    os << "init.x0 = " << num(c.init_x0) << "\n";
    os << "init.v0 = " << num(c.init_v0) << "\n";
    os << "init.var_x = " << num(c.init_var_x) << "\n";
    os << "init.var_v = " << num(c.init_var_v) << "\n";
    if (!c.init_file.empty()) os << "init.file = " << c.init_file << "\n";
    os << "wake.gamma = " << num(c.wake_gamma) << "\n";
    os << "wake.mu_min = " << num(c.wake_mu_min) << "\n";
    os << "wake.mu_max = " << num(c.wake_mu_max) << "\n";
    os << "wake.samples = " << c.wake_samples << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    return os.str();
}

// args: everything after the program name; an optional leading positional is
// the subcommand, then --config <path> and --key <value> overrides
inline RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig c;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string config_path;
    std::size_t i = 0;
    if (!args.empty() && args[0].rfind("--", 0) != 0) {
        c.subcommand = args[0];
        i = 1;
    }
    for (; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) throw config_error("expected --key value, got '" + a + "'");
        const std::string key = a.substr(2);
        if (i + 1 >= args.size()) throw config_error("missing value for --" + key);
        const std::string val = args[++i];
        if (key == "config")
            config_path = val;
        else
            overrides.emplace_back(key, val);
    }
    if (!config_path.empty()) load_config_file(c, config_path);
    for (const auto& [k, v] : overrides) apply_key(c, k, v);
    validate_config(c);
    return c;
}

} // namespace vfp
