#pragma once

// Displacement-lattice convolutions against kernel tables, with a direct
// O(n^2) summation route and an FFT-accelerated route (zero-padded linear
// convolution). Both apply the same trapezoid weights, so they agree to
// rounding; the acceptance tests compare them.

#include <complex>
#include <vector>

#include "vfp/fft.hpp"
#include "vfp/grid.hpp"
#include "vfp/wakefield.hpp"

namespace vfp {

// kernel samples on the displacement lattice of an n-node profile:
// tab[d] = fun((d - (n-1)) * dx), d = 0 .. 2n-2
struct KernelTables {
    std::size_t n = 0;
    double dx = 0.0;
    std::vector<double> k;      // K
    std::vector<double> dk;     // dK/dx (jump mean at displacement 0)
    std::vector<double> k_even; // K^e
    std::vector<double> dk_odd; // d/dx K^o (jump mean at displacement 0)

    static KernelTables build(const Kernel& kern, std::size_t n, double dx) {
        KernelTables t;
        t.n = n;
        t.dx = dx;
        const std::size_t m = 2 * n - 1;
        t.k.resize(m);
        t.dk.resize(m);
        t.k_even.resize(m);
        t.dk_odd.resize(m);
        for (std::size_t d = 0; d < m; ++d) {
            const double disp = (double(d) - double(n - 1)) * dx;
            t.k[d] = kernel_eval(kern, disp);
            t.k_even[d] = 0.5 * (kernel_eval(kern, disp) + kernel_eval(kern, -disp));
            if (d == n - 1) {
                t.dk[d] = kernel_deriv_mean0(kern);
                t.dk_odd[d] = kernel_deriv_mean0(kern);  // (dK(0+)+dK(0-))/2 either way
            } else {
                t.dk[d] = kernel_deriv(kern, disp);
                t.dk_odd[d] = 0.5 * (kernel_deriv(kern, disp) + kernel_deriv(kern, -disp));
            }
        }
        return t;
    }
};

// out[i] = dx * sum_j tab[i - j + n - 1] * w_j * arr[j]
inline std::vector<double> convolve_direct(const std::vector<double>& tab,
                                           const std::vector<double>& arr, double dx) {
    const std::size_t n = arr.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += tab[i - j + n - 1] * trap_weight(j, n) * arr[j];
        out[i] = s * dx;
    }
    return out;
}

inline std::vector<double> convolve_fft(const std::vector<double>& tab,
                                        const std::vector<double>& arr, double dx) {
    const std::size_t n = arr.size();
    std::size_t m = 1;
    while (m < 3 * n) m <<= 1;  // >= (2n-1) + n - 1 to keep the linear convolution aliasing-free
    std::vector<std::complex<double>> A(m, 0.0), B(m, 0.0);
    for (std::size_t d = 0; d < 2 * n - 1; ++d) A[d] = tab[d];
    for (std::size_t j = 0; j < n; ++j) B[j] = trap_weight(j, n) * arr[j];
    Fft fft(m);
    fft.forward(A.data());
    fft.forward(B.data());
    for (std::size_t i = 0; i < m; ++i) A[i] *= B[i];
    fft.inverse(A.data());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = A[i + n - 1].real() * dx;
    return out;
}

// FFT-accelerated mean-field force from a prebuilt table
inline Profile1D force_field_fft(const Profile1D& rho, const KernelTables& t, double current) {
    Profile1D F(rho.x_min, rho.x_max, rho.n());
    if (current == 0.0) return F;
    auto conv = convolve_fft(t.dk, rho.values, t.dx);
    for (std::size_t i = 0; i < rho.n(); ++i) F.values[i] = -current * conv[i];
    return F;
}

} // namespace vfp
