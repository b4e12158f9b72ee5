#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oscillakdv/spectral_ops.hpp"
#include "oscillakdv/trajectory.hpp"

namespace oscillakdv {

inline constexpr double inf = std::numeric_limits<double>::infinity();

namespace detail {

inline double pow_int(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Field-level quantities
// ---------------------------------------------------------------------------

// sum u(x_j)^2 dx
inline double mass(const Field& u) {
    const Field p = to_physical(u);
    const double dx = p.grid()->dx();
    double acc = 0.0;
    for (double v : p.samples()) acc += v * v;
    return acc * dx;
}

// (1/2) sum u_x^2 dx - lambda * sum u^{k+2}/(k+2) dx, derivative spectral
inline double energy(const Field& u, double lambda, int k) {
    const Field p = to_physical(u);
    const double dx = p.grid()->dx();
    const Field ux = to_physical(spectral_derivative(u, 1));
    double grad = 0.0;
    for (double v : ux.samples()) grad += v * v;
    double pot = 0.0;
    for (double v : p.samples()) pot += detail::pow_int(v, k + 2);
    return 0.5 * grad * dx - lambda * pot * dx / (k + 2);
}

// (sum_kappa (1 + kappa^2)^s |u_hat|^2)^(1/2)
inline double sobolev_norm(const Field& u, double s) {
    const Field f = to_spectral(u);
    const auto& kappa = f.grid()->wavenumbers();
    double acc = 0.0;
    for (size_t m = 0; m < kappa.size(); ++m) {
        const double w = std::pow(1.0 + kappa[m] * kappa[m], s);
        acc += w * std::norm(f.modes()[m]);
    }
    return std::sqrt(acc);
}

inline double linf(const Field& u) {
    const Field p = to_physical(u);
    double m = 0.0;
    for (double v : p.samples()) m = std::max(m, std::abs(v));
    return m;
}

inline double l2_norm(const Field& u) { return std::sqrt(mass(u)); }

// ---------------------------------------------------------------------------
// Trajectory-level norms
// ---------------------------------------------------------------------------

struct NormSpec {
    enum class Kind { h_s, mixed, xt_full, yt_full, l2, strichartz_5_10 };
    Kind kind = Kind::l2;
    double s = 0.0;              // h_s
    double p = 2.0, q = 2.0;     // mixed (inf encoded as infinity)
    int derivative_order = 0;    // mixed

    static NormSpec h_s(double s) { return {Kind::h_s, s, 0, 0, 0}; }
    static NormSpec mixed(double p, double q, int d = 0) { return {Kind::mixed, 0, p, q, d}; }
    static NormSpec xt_full() { return {Kind::xt_full, 0, 0, 0, 0}; }
    static NormSpec yt_full() { return {Kind::yt_full, 0, 0, 0, 0}; }
    static NormSpec l2() { return {Kind::l2, 0, 0, 0, 0}; }
    static NormSpec strichartz_5_10() { return {Kind::strichartz_5_10, 0, 0, 0, 0}; }
};

namespace detail {

inline void require_snapshots(const Trajectory& traj, size_t min_count) {
    if (traj.snapshots.size() < min_count)
        throw InsufficientDataError("trajectory has " + std::to_string(traj.snapshots.size()) +
                                    " snapshots, need at least " + std::to_string(min_count));
}

} // namespace detail

// Mixed L_x^p L_T^q norm over the snapshot mesh: trapezoid in time (max for
// q = inf) at each grid point, then the p-quadrature (max for p = inf) in x.
// The optional integer derivative is applied spectrally per snapshot first.
inline double mixed_norm(const Trajectory& traj, double p, double q, int derivative_order = 0) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw UsageError("mixed_norm: p, q must be in [1, inf]");
    const bool q_inf = std::isinf(q);
    detail::require_snapshots(traj, q_inf ? 1 : 2);

    const auto& grid = *traj.snapshots.front().field.grid();
    const int n = grid.size();
    const size_t S = traj.snapshots.size();

    // values[i] = |derivative of snapshot i| at every grid point
    std::vector<std::vector<double>> values(S);
    for (size_t i = 0; i < S; ++i) {
        const Field& f = traj.snapshots[i].field;
        values[i] = derivative_order == 0
                        ? to_physical(f).samples()
                        : to_physical(spectral_derivative(f, derivative_order)).samples();
    }

    // trapezoid weights on the snapshot times
    std::vector<double> w(S, 0.0);
    if (!q_inf) {
        for (size_t i = 0; i + 1 < S; ++i) {
            const double h = traj.snapshots[i + 1].t - traj.snapshots[i].t;
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
    }

    const bool p_inf = std::isinf(p);
    double outer = 0.0;
    for (int j = 0; j < n; ++j) {
        double inner;
        if (q_inf) {
            inner = 0.0;
            for (size_t i = 0; i < S; ++i)
                inner = std::max(inner, std::abs(values[i][static_cast<size_t>(j)]));
        } else {
            double acc = 0.0;
            for (size_t i = 0; i < S; ++i)
                acc += w[i] * std::pow(std::abs(values[i][static_cast<size_t>(j)]), q);
            inner = std::pow(acc, 1.0 / q);
        }
        if (p_inf)
            outer = std::max(outer, inner);
        else
            outer += std::pow(inner, p);
    }
    return p_inf ? outer : std::pow(outer * grid.dx(), 1.0 / p);
}

// sup over snapshots of the H^s norm (the discrete L_T^inf H^s reduction)
inline double sup_sobolev(const Trajectory& traj, double s) {
    detail::require_snapshots(traj, 1);
    double m = 0.0;
    for (const auto& snap : traj.snapshots) m = std::max(m, sobolev_norm(snap.field, s));
    return m;
}

// Seven-component space-time norm:
//   sup_T H^1 + |d_x .|_{Lx^inf LT^2} + |d_x^2 .|_{Lx^inf LT^2}
//   + |.|_{Lx^5 LT^10} + |d_x .|_{Lx^5 LT^10}
//   + |d_x .|_{Lx^20 LT^{5/2}} + |.|_{Lx^4 LT^inf}
inline double xt_norm(const Trajectory& traj) {
    return sup_sobolev(traj, 1.0) + mixed_norm(traj, inf, 2, 1) + mixed_norm(traj, inf, 2, 2) +
           mixed_norm(traj, 5, 10, 0) + mixed_norm(traj, 5, 10, 1) +
           mixed_norm(traj, 20, 2.5, 1) + mixed_norm(traj, 4, inf, 0);
}

// |d_x .|_{Lx^2 LT^2} + |.|_{Lx^2 LT^2}
inline double yt_norm(const Trajectory& traj) {
    return mixed_norm(traj, 2, 2, 1) + mixed_norm(traj, 2, 2, 0);
}

inline double traj_norm(const Trajectory& traj, const NormSpec& spec) {
    switch (spec.kind) {
        case NormSpec::Kind::h_s: return sup_sobolev(traj, spec.s);
        case NormSpec::Kind::mixed: return mixed_norm(traj, spec.p, spec.q, spec.derivative_order);
        case NormSpec::Kind::xt_full: return xt_norm(traj);
        case NormSpec::Kind::yt_full: return yt_norm(traj);
        case NormSpec::Kind::l2: return sup_sobolev(traj, 0.0);
        case NormSpec::Kind::strichartz_5_10: return mixed_norm(traj, 5, 10, 0);
    }
    return 0.0;
}

// Norm of the snapshot-wise difference of two trajectories on one mesh.
inline double traj_diff(const Trajectory& a, const Trajectory& b, const NormSpec& spec) {
    if (a.snapshots.size() != b.snapshots.size())
        throw ConfigError("traj_diff: snapshot counts differ");
    detail::require_snapshots(a, 1);
    if (!same_grid(*a.snapshots.front().field.grid(), *b.snapshots.front().field.grid()))
        throw ConfigError("traj_diff: grids differ");
    Trajectory diff;
    diff.snapshots.reserve(a.snapshots.size());
    for (size_t i = 0; i < a.snapshots.size(); ++i) {
        if (a.snapshots[i].t != b.snapshots[i].t)
            throw ConfigError("traj_diff: snapshot times differ");
        diff.snapshots.push_back(
            {a.snapshots[i].t, field_sub(a.snapshots[i].field, b.snapshots[i].field)});
    }
    return traj_norm(diff, spec);
}

// L_x^5 L^10_{(T, horizon)} norm of the free flow of phi. The time mesh is
// anchored at multiples of horizon/mesh_points, so raising T removes leading
// cells from the same quadrature and the result is monotone in T.
inline double strichartz_tail(const Field& phi, double T, double horizon, int mesh_points = 2048) {
    if (!(horizon > T)) throw UsageError("strichartz_tail: horizon must exceed T");
    if (mesh_points < 2) throw UsageError("strichartz_tail: mesh_points must be >= 2");
    const double dt0 = horizon / mesh_points;
    std::vector<double> ts;
    ts.push_back(T);
    for (int j = 1; j <= mesh_points; ++j) {
        const double t = j * dt0;
        if (t > T && t < horizon) ts.push_back(t);
    }
    ts.push_back(horizon);

    Trajectory flow;
    flow.snapshots.reserve(ts.size());
    const Field spec_phi = to_spectral(phi);
    for (double t : ts) flow.snapshots.push_back({t, to_physical(airy_propagate(spec_phi, t))});
    return mixed_norm(flow, 5, 10, 0);
}

} // namespace oscillakdv
