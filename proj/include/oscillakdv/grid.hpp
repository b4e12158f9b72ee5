#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "oscillakdv/errors.hpp"

namespace oscillakdv {

class Grid1D;
using GridPtr = std::shared_ptr<const Grid1D>;

namespace detail {

// Per-thread FFT scratch. fftw_malloc'd so the alignment matches the arrays
// the plans were created with, which lets every thread reuse one plan pair
// through fftw_execute_dft.
struct FftScratch {
    int n = 0;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;

    void ensure(int n_req) {
        if (n_req == n) return;
        release();
        in = fftw_alloc_complex(static_cast<size_t>(n_req));
        out = fftw_alloc_complex(static_cast<size_t>(n_req));
        n = n_req;
    }
    void release() {
        if (in) fftw_free(in);
        if (out) fftw_free(out);
        in = out = nullptr;
        n = 0;
    }
    ~FftScratch() { release(); }
};

inline FftScratch& fft_scratch() {
    thread_local FftScratch s;
    return s;
}

// The FFTW planner is not thread-safe; executing plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace detail

// Periodic collocation grid on [-L/2, L/2) with n points and cached c2c FFTW
// plans. Immutable after construction and safe to share across threads.
//
// Spectral convention: u_hat[m] = (sqrt(L)/n) * sum_j u_j exp(-i kappa_m x_j),
// so sum_m |u_hat[m]|^2 == sum_j u_j^2 dx (the discrete L^2 quadrature) and
// the coefficients approximate the continuum transform times sqrt(2*pi/L).
class Grid1D {
public:
    ~Grid1D() {
        // planner calls (create AND destroy) are the non-thread-safe part of FFTW
        std::lock_guard<std::mutex> lock(detail::planner_mutex());
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
    }
    Grid1D(const Grid1D&) = delete;
    Grid1D& operator=(const Grid1D&) = delete;

    int size() const { return n_; }
    double domain_length() const { return length_; }
    double dx() const { return dx_; }
    const std::vector<double>& wavenumbers() const { return kappa_; }
    double x(int j) const { return -0.5 * length_ + dx_ * j; }

    std::vector<double> coordinates() const {
        std::vector<double> xs(static_cast<size_t>(n_));
        for (int j = 0; j < n_; ++j) xs[static_cast<size_t>(j)] = x(j);
        return xs;
    }

    // physical samples -> spectral modes
    void forward(const double* in, std::complex<double>* out) const {
        auto& s = detail::fft_scratch();
        s.ensure(n_);
        for (int j = 0; j < n_; ++j) {
            s.in[j][0] = in[j];
            s.in[j][1] = 0.0;
        }
        fftw_execute_dft(fwd_, s.in, s.out);
        const double scale = fwd_scale_;
        for (int m = 0; m < n_; ++m)
            out[m] = std::complex<double>(s.out[m][0] * scale, s.out[m][1] * scale);
    }

    // spectral modes -> physical samples (real part; imaginary residue of a
    // conjugate-symmetric spectrum is rounding-level)
    void backward(const std::complex<double>* in, double* out) const {
        auto& s = detail::fft_scratch();
        s.ensure(n_);
        for (int m = 0; m < n_; ++m) {
            s.in[m][0] = in[m].real();
            s.in[m][1] = in[m].imag();
        }
        fftw_execute_dft(bwd_, s.in, s.out);
        const double scale = bwd_scale_;
        for (int j = 0; j < n_; ++j) out[j] = s.out[j][0] * scale;
    }

private:
    friend GridPtr make_grid(int n, double domain_length);

    Grid1D(int n, double domain_length)
        : n_(n), length_(domain_length), dx_(domain_length / n) {
        kappa_.resize(static_cast<size_t>(n));
        const double k1 = 2.0 * M_PI / domain_length;
        for (int m = 0; m < n; ++m) {
            const int j_signed = (m < n / 2) ? m : m - n;
            kappa_[static_cast<size_t>(m)] = k1 * j_signed;
        }
        fwd_scale_ = std::sqrt(length_) / n_;
        bwd_scale_ = 1.0 / std::sqrt(length_);

        fftw_complex* a = fftw_alloc_complex(static_cast<size_t>(n));
        fftw_complex* b = fftw_alloc_complex(static_cast<size_t>(n));
        {
            std::lock_guard<std::mutex> lock(detail::planner_mutex());
            fwd_ = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        fftw_free(a);
        fftw_free(b);
    }

    int n_;
    double length_;
    double dx_;
    double fwd_scale_, bwd_scale_;
    std::vector<double> kappa_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

inline GridPtr make_grid(int n, double domain_length) {
    if (!detail::is_power_of_two(n) || n < 2)
        throw ConfigError("make_grid: n must be a power of two >= 2, got " + std::to_string(n));
    if (!(domain_length > 0.0))
        throw ConfigError("make_grid: domain_length must be positive, got " +
                          std::to_string(domain_length));
    return GridPtr(new Grid1D(n, domain_length));
}

inline bool same_grid(const Grid1D& a, const Grid1D& b) {
    return a.size() == b.size() && a.domain_length() == b.domain_length();
}

} // namespace oscillakdv
