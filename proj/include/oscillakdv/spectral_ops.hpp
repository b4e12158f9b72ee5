#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "oscillakdv/field.hpp"

namespace oscillakdv {

enum class DerivativeKind { integer, riesz };

namespace detail {

// Largest retained signed index given the policy bound; modes with a larger
// |index| are zeroed. "Strictly below the bound" keeps an exact(k) product of
// degree k+1 alias-free even when (k+2) divides n.
inline int cutoff_index(int n, int denom) { return (n - 1) / denom; }

inline int signed_index(int m, int n) { return (m < n / 2) ? m : m - n; }

// exp(i kappa^3 t) for every mode, mirror-symmetrized so real fields keep
// exactly conjugate-symmetric spectra (Nyquist is self-paired and left as is).
inline void airy_phase(const Grid1D& g, double t, std::complex<double>* out) {
    const int n = g.size();
    const auto& kappa = g.wavenumbers();
    for (int m = 0; m <= n / 2; ++m) {
        const double k = kappa[static_cast<size_t>(m)];
        const double theta = k * k * k * t;
        out[m] = std::complex<double>(std::cos(theta), std::sin(theta));
    }
    for (int m = 1; m < n / 2; ++m) out[n - m] = std::conj(out[m]);
}

} // namespace detail

// Dealiasing mask selection. exact(k) is alias-free for the degree-(k+1)
// pointwise power; two_thirds is the classical speed-oriented rule and is NOT
// alias-free for k >= 2.
struct DealiasPolicy {
    enum class Rule { exact, two_thirds };
    Rule rule = Rule::exact;
    int power = 5; // k in exact(k)

    static DealiasPolicy exact(int k) {
        if (k < 1) throw ConfigError("DealiasPolicy::exact: k must be >= 1");
        return DealiasPolicy{Rule::exact, k};
    }
    static DealiasPolicy two_thirds() { return DealiasPolicy{Rule::two_thirds, 0}; }

    bool operator==(const DealiasPolicy&) const = default;
};

inline int dealias_cutoff(const DealiasPolicy& p, int n) {
    return p.rule == DealiasPolicy::Rule::exact ? detail::cutoff_index(n, p.power + 2)
                                                : detail::cutoff_index(n, 3);
}

inline Field dealias(const Field& f, const DealiasPolicy& p) {
    Field s = to_spectral(f);
    const int n = s.grid()->size();
    const int cut = dealias_cutoff(p, n);
    std::vector<std::complex<double>> modes = s.modes();
    for (int m = 0; m < n; ++m)
        if (std::abs(detail::signed_index(m, n)) > cut) modes[static_cast<size_t>(m)] = 0.0;
    return Field::from_modes(s.grid(), std::move(modes));
}

// D^s with multiplier (i kappa)^s for integer orders or |kappa|^s (Riesz,
// zero mode annihilated). The Nyquist mode is zeroed after differentiation.
inline Field spectral_derivative(const Field& f, double order,
                                 DerivativeKind kind = DerivativeKind::integer) {
    if (order < 0.0) throw UsageError("spectral_derivative: order must be >= 0");
    Field s = to_spectral(f);
    const auto& g = *s.grid();
    const int n = g.size();
    const auto& kappa = g.wavenumbers();
    std::vector<std::complex<double>> modes = s.modes();

    if (kind == DerivativeKind::integer) {
        if (order != std::floor(order))
            throw UsageError("spectral_derivative: integer kind needs an integer order");
        const int p = static_cast<int>(order);
        if (p == 0) return s;
        // i^p cycles with period 4
        static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const std::complex<double> rot = ipow[p % 4];
        for (int m = 0; m < n; ++m) {
            const double k = kappa[static_cast<size_t>(m)];
            modes[static_cast<size_t>(m)] *= rot * std::pow(k, p);
        }
    } else {
        if (order == 0.0) return s;
        for (int m = 0; m < n; ++m) {
            const double k = std::abs(kappa[static_cast<size_t>(m)]);
            modes[static_cast<size_t>(m)] *= (k == 0.0) ? 0.0 : std::pow(k, order);
        }
    }
    modes[static_cast<size_t>(n / 2)] = 0.0; // odd orders are ill-defined there
    return Field::from_modes(s.grid(), std::move(modes));
}

// Exact propagator of u_t + u_xxx = 0: multiply each mode by exp(i kappa^3 t).
// Unitary for every t; a group in t.
inline Field airy_propagate(const Field& f, double t) {
    Field s = to_spectral(f);
    const auto& g = *s.grid();
    const int n = g.size();
    std::vector<std::complex<double>> phase(static_cast<size_t>(n));
    detail::airy_phase(g, t, phase.data());
    std::vector<std::complex<double>> modes = s.modes();
    for (int m = 0; m < n; ++m) modes[static_cast<size_t>(m)] *= phase[static_cast<size_t>(m)];
    return Field::from_modes(s.grid(), std::move(modes));
}

} // namespace oscillakdv
