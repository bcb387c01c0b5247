#pragma once

// Radix-2 complex FFT, fully deterministic. Sizes must be powers of two.

#include <complex>
#include <cstddef>
#include <vector>

#include "vfp/errors.hpp"

namespace vfp {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        if (!is_pow2(n)) throw config_error("FFT size must be a power of two, got " + std::to_string(n));
        tw_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * 3.14159265358979323846 * double(k) / double(n);
            tw_[k] = {std::cos(ang), std::sin(ang)};
        }
        rev_.resize(n);
        std::size_t bits = 0;
        while ((std::size_t(1) << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (bits - 1 - b);
            rev_[i] = r;
        }
    }

    std::size_t size() const { return n_; }

    // in-place transform; inverse = conjugate transform scaled by 1/n
    void forward(std::complex<double>* a) const { run(a, false); }
    void inverse(std::complex<double>* a) const {
        run(a, true);
        const double s = 1.0 / double(n_);
        for (std::size_t i = 0; i < n_; ++i) a[i] *= s;
    }

  private:
    void run(std::complex<double>* a, bool inv) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (rev_[i] > i) std::swap(a[i], a[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    std::complex<double> w = tw_[k * step];
                    if (inv) w = std::conj(w);
                    const auto u = a[start + k];
                    const auto t = a[start + k + half] * w;
                    a[start + k] = u + t;
                    a[start + k + half] = u - t;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::complex<double>> tw_;
    std::vector<std::size_t> rev_;
};

// 2D transform on row-major data (nx slow, nv fast).
class Fft2 {
  public:
    Fft2(std::size_t nx, std::size_t nv) : nx_(nx), nv_(nv), fx_(nx), fv_(nv) {}

    void forward(std::complex<double>* a) const { run(a, false); }
    void inverse(std::complex<double>* a) const { run(a, true); }

  private:
    void run(std::complex<double>* a, bool inv) const {
        for (std::size_t i = 0; i < nx_; ++i) {
            auto* row = a + i * nv_;
            inv ? fv_.inverse(row) : fv_.forward(row);
        }
        std::vector<std::complex<double>> col(nx_);
        for (std::size_t j = 0; j < nv_; ++j) {
            for (std::size_t i = 0; i < nx_; ++i) col[i] = a[i * nv_ + j];
            inv ? fx_.inverse(col.data()) : fx_.forward(col.data());
            for (std::size_t i = 0; i < nx_; ++i) a[i * nv_ + j] = col[i];
        }
    }

    std::size_t nx_, nv_;
    Fft fx_, fv_;
};

} // namespace vfp
