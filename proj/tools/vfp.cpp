// Command-line front end. Usage:
//   vfp <subcommand> [--config file] [--key value ...]
// Subcommands: wake | haissinski | evolve | particles | stability.
// Exit codes: 0 success, 1 solver fault, 2 configuration error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vfp/config.hpp"
#include "vfp/runner.hpp"
#include "vfp/version.hpp"

namespace {

void print_usage() {
    std::cout <<
        "vfp " << vfp::kVersion << " - synchrotron Vlasov-Fokker-Planck toolkit\n"
        "\n"
        "usage: vfp <subcommand> [--config FILE] [--key value ...]\n"
        "\n"
        "subcommands:\n"
        "  wake        emit K^fs and exact on-orbit potential tables\n"
        "  haissinski  solve the equilibrium fixed point, print stability constants\n"
        "  evolve      grid solver run with diagnostics CSV and grid dumps\n"
        "  particles   Langevin ensemble run with diagnostics CSV\n"
        "  stability   fit the decay rate of a completed run in output_dir\n"
        "\n"
        "keys (defaults in parentheses): alpha(1) nu(1) theta(1) current(0) mass(1)\n"
        "  kernel.kind(free_space) kernel.scale_amp(1) kernel.scale_len(1)\n"
        "  kernel.table kernel.table_deriv kernel.even(0)\n"
        "  dt(0=auto) t_end(5) nx(256) nv(256) box_x(8) box_v(8) n_particles(100000)\n"
        "  seed(12345) diag_every(10) dump_every(0) tol(1e-10) max_iter(200)\n"
        "  mixing(0=auto) init.kind(gaussian) init.x0(0) init.v0(0)\n"
        "  init.var_x(0=thermal) init.var_v(0=thermal) init.file\n"
        "  wake.gamma(100) wake.mu_min(-2) wake.mu_max(8.5) wake.samples(673)\n"
        "  output_dir(out)\n"
        "\n"
        "Config files are flat 'key = value' lines; command-line flags win.\n"
        "VFP_THREADS caps worker parallelism (results do not depend on it).\n";
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        print_usage();
        return args.empty() ? 2 : 0;
    }
#ifdef _OPENMP
    if (const char* t = std::getenv("VFP_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    try {
        const vfp::RunConfig config = vfp::parse_config(args);
        return vfp::run(config);
    } catch (const vfp::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vfp::solver_error& e) {
        std::cerr << "solver fault: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
