#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "oscillakdv/diagnostics.hpp"
#include "oscillakdv/forcing.hpp"
#include "oscillakdv/spectral_ops.hpp"
#include "oscillakdv/trajectory.hpp"

namespace oscillakdv {

enum class Scheme { if_rk4, etdrk4 };

inline std::string to_string(Scheme s) {
    return s == Scheme::if_rk4 ? "if_rk4" : "etdrk4";
}

struct SolverConfig {
    int k = 5;                       // nonlinearity power (>= 1; >= 5 is the regime of interest)
    Scheme scheme = Scheme::if_rk4;
    double dt = 1e-3;
    double t_end = 1.0;
    DealiasPolicy dealias = DealiasPolicy::exact(5);
    std::vector<double> snapshot_times;   // 0 and t_end are always included
    double blowup_h1_factor = 10.0;
    double blowup_amp_max = 1e6;
    int conserve_check_every = 10;
    double min_steps_per_g_period = 20.0; // dt cap so the stepper never aliases g

    SolverConfig with_scheme(Scheme s) const { SolverConfig c = *this; c.scheme = s; return c; }
};

// Local-existence horizon heuristic T = C / (A^2 |phi|_{H^1}^{2k}), C = 1.
inline double existence_time_heuristic(double sup_g, double h1_phi, int k) {
    if (!(sup_g > 0.0) || !(h1_phi > 0.0)) return 1.0;
    return 1.0 / (sup_g * sup_g * std::pow(h1_phi, 2.0 * k));
}

// dt capped so each oscillation period of g is sampled by >= min_steps steps.
inline double effective_dt(const SolverConfig& cfg, const CoefficientSpec& g) {
    double dt = cfg.dt;
    if (g.variant() != CoefficientSpec::Variant::constant && g.omega() != 0.0) {
        const double t_period = g.period() / std::abs(g.omega());
        dt = std::min(dt, t_period / cfg.min_steps_per_g_period);
    }
    return dt;
}

namespace detail {

// Step boundaries from 0 to t_end. Each segment between consecutive snapshot
// targets is divided uniformly with h <= dt, so every snapshot time is hit
// exactly; no interpolation ever happens.
struct StepSchedule {
    std::vector<double> boundaries;  // boundaries[0] = 0, boundaries.back() = t_end
    std::vector<char> is_snapshot;   // parallel to boundaries

    static StepSchedule build(const SolverConfig& cfg, double dt_eff) {
        std::vector<double> targets = cfg.snapshot_times;
        targets.push_back(cfg.t_end);
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

        StepSchedule s;
        s.boundaries.push_back(0.0);
        s.is_snapshot.push_back(1);
        double prev = 0.0;
        for (double target : targets) {
            if (target <= prev) continue;
            const double len = target - prev;
            const int m = std::max(1, static_cast<int>(std::ceil(len / dt_eff - 1e-9)));
            for (int j = 1; j < m; ++j) {
                s.boundaries.push_back(prev + len * j / m);
                s.is_snapshot.push_back(0);
            }
            s.boundaries.push_back(target);
            s.is_snapshot.push_back(1);
            prev = target;
        }
        return s;
    }

    int steps() const { return static_cast<int>(boundaries.size()) - 1; }
};

// Multiplier tables for one (grid, h) pair.
struct StepperTables {
    // integrating factor
    std::vector<std::complex<double>> e_full, e_half;
    // etdrk4 phi-function coefficients (Cox-Matthews weights evaluated by a
    // 32-point circular contour mean around each i*kappa^3*h)
    std::vector<std::complex<double>> q, f1, f2, f3;

    static StepperTables build(const Grid1D& grid, double h, Scheme scheme) {
        const int n = grid.size();
        StepperTables t;
        t.e_full.resize(static_cast<size_t>(n));
        t.e_half.resize(static_cast<size_t>(n));
        airy_phase(grid, h, t.e_full.data());
        airy_phase(grid, 0.5 * h, t.e_half.data());
        if (scheme != Scheme::etdrk4) return t;

        t.q.resize(static_cast<size_t>(n));
        t.f1.resize(static_cast<size_t>(n));
        t.f2.resize(static_cast<size_t>(n));
        t.f3.resize(static_cast<size_t>(n));
        constexpr int M = 32;
        std::complex<double> roots[M];
        for (int j = 0; j < M; ++j) {
            const double th = 2.0 * M_PI * (j + 0.5) / M;
            roots[j] = std::complex<double>(std::cos(th), std::sin(th));
        }
        const auto& kappa = grid.wavenumbers();
        for (int m = 0; m <= n / 2; ++m) {
            const double k = kappa[static_cast<size_t>(m)];
            const std::complex<double> z0(0.0, k * k * k * h);
            std::complex<double> sq = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            for (int j = 0; j < M; ++j) {
                const std::complex<double> z = z0 + roots[j];
                const std::complex<double> ez = std::exp(z);
                const std::complex<double> z2 = z * z;
                const std::complex<double> z3 = z2 * z;
                sq += (std::exp(0.5 * z) - 1.0) / z;
                s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
                s2 += (2.0 + z + ez * (-2.0 + z)) / z3;
                s3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
            }
            t.q[static_cast<size_t>(m)] = h * sq / static_cast<double>(M);
            t.f1[static_cast<size_t>(m)] = h * s1 / static_cast<double>(M);
            t.f2[static_cast<size_t>(m)] = h * s2 / static_cast<double>(M);
            t.f3[static_cast<size_t>(m)] = h * s3 / static_cast<double>(M);
        }
        // mirror so the tables are exactly conjugate-symmetric
        for (int m = 1; m < n / 2; ++m) {
            const size_t lo = static_cast<size_t>(m), hi = static_cast<size_t>(n - m);
            t.q[hi] = std::conj(t.q[lo]);
            t.f1[hi] = std::conj(t.f1[lo]);
            t.f2[hi] = std::conj(t.f2[lo]);
            t.f3[hi] = std::conj(t.f3[lo]);
        }
        return t;
    }
};

using cvec = std::vector<std::complex<double>>;

// One time integrator instance: owns scratch buffers and the table cache.
// Strictly sequential; distinct instances share nothing mutable.
class Stepper {
public:
    Stepper(GridPtr grid, const CoefficientSpec& g, const SolverConfig& cfg)
        : grid_(std::move(grid)), g_(g), cfg_(cfg),
          cutoff_(dealias_cutoff(cfg.dealias, grid_->size())) {
        const int n = grid_->size();
        const auto& kappa = grid_->wavenumbers();
        dkappa_.assign(static_cast<size_t>(n), 0.0);
        for (int m = 0; m < n; ++m)
            if (std::abs(signed_index(m, n)) <= cutoff_) dkappa_[static_cast<size_t>(m)] = kappa[static_cast<size_t>(m)];
        // Nyquist is above every cutoff (< n/3), so it is already masked.
        const auto sn = static_cast<size_t>(n);
        phys_.resize(sn);
        for (cvec* b : {&nv_, &na_, &nb_, &nc_, &sa_, &sb_, &sc_, &tmp_}) b->resize(sn);
    }

    // Advance u_hat (spectral state) from t by h.
    void advance(cvec& u, double t, double h) {
        const StepperTables& tb = tables(h);
        const int n = grid_->size();
        if (cfg_.scheme == Scheme::if_rk4) {
            // classical RK4 on w(tau) = S(-tau) u(tau); all propagator
            // applications below are exact multipliers
            nonlinear(u, t, nv_); // k1
            for (int m = 0; m < n; ++m)
                tmp_[m] = tb.e_half[m] * (u[m] + 0.5 * h * nv_[m]);
            nonlinear(tmp_, t + 0.5 * h, na_); // k2
            for (int m = 0; m < n; ++m)
                tmp_[m] = tb.e_half[m] * u[m] + 0.5 * h * na_[m];
            nonlinear(tmp_, t + 0.5 * h, nb_); // k3
            for (int m = 0; m < n; ++m)
                tmp_[m] = tb.e_full[m] * u[m] + h * tb.e_half[m] * nb_[m];
            nonlinear(tmp_, t + h, nc_); // k4
            const double w = h / 6.0;
            for (int m = 0; m < n; ++m)
                u[m] = tb.e_full[m] * u[m] +
                       w * (tb.e_full[m] * nv_[m] + 2.0 * tb.e_half[m] * (na_[m] + nb_[m]) +
                            nc_[m]);
        } else {
            nonlinear(u, t, nv_);
            for (int m = 0; m < n; ++m) sa_[m] = tb.e_half[m] * u[m] + tb.q[m] * nv_[m];
            nonlinear(sa_, t + 0.5 * h, na_);
            for (int m = 0; m < n; ++m) sb_[m] = tb.e_half[m] * u[m] + tb.q[m] * na_[m];
            nonlinear(sb_, t + 0.5 * h, nb_);
            for (int m = 0; m < n; ++m)
                sc_[m] = tb.e_half[m] * sa_[m] + tb.q[m] * (2.0 * nb_[m] - nv_[m]);
            nonlinear(sc_, t + h, nc_);
            for (int m = 0; m < n; ++m)
                u[m] = tb.e_full[m] * u[m] + tb.f1[m] * nv_[m] + 2.0 * tb.f2[m] * (na_[m] + nb_[m]) +
                       tb.f3[m] * nc_[m];
        }
    }

    // N(u, t) = -g(omega(t+t0)) d_x(u^{k+1}), alias-free: the input is masked
    // to the retained band, the power is formed pointwise, and the derivative
    // is masked again. Exactly zero when the coefficient vanishes.
    void nonlinear(const cvec& u, double t, cvec& out) {
        const int n = grid_->size();
        const double gv = g_.eval(t);
        if (gv == 0.0) {
            std::fill(out.begin(), out.end(), std::complex<double>(0.0, 0.0));
            return;
        }
        for (int m = 0; m < n; ++m)
            tmp_[m] = (dkappa_[static_cast<size_t>(m)] == 0.0 &&
                       signed_index(m, n) != 0)
                          ? std::complex<double>(0.0, 0.0)
                          : u[m];
        grid_->backward(tmp_.data(), phys_.data());
        const int p = cfg_.k + 1;
        for (int j = 0; j < n; ++j) phys_[static_cast<size_t>(j)] = pow_int(phys_[static_cast<size_t>(j)], p);
        grid_->forward(phys_.data(), out.data());
        for (int m = 0; m < n; ++m) {
            const double dk = dkappa_[static_cast<size_t>(m)];
            // i * kappa * (-gv) applied on the retained band only
            out[m] = (dk == 0.0) ? std::complex<double>(0.0, 0.0)
                                 : std::complex<double>(gv * dk * out[m].imag(),
                                                        -gv * dk * out[m].real());
        }
    }

    int cutoff() const { return cutoff_; }

private:
    const StepperTables& tables(double h) {
        const uint64_t key = std::bit_cast<uint64_t>(h);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, StepperTables::build(*grid_, h, cfg_.scheme)).first;
        return it->second;
    }

    GridPtr grid_;
    CoefficientSpec g_;
    SolverConfig cfg_;
    int cutoff_;
    std::vector<double> dkappa_; // kappa on the retained band, 0 elsewhere
    std::vector<double> phys_;
    cvec nv_, na_, nb_, nc_, sa_, sb_, sc_, tmp_;
    std::map<uint64_t, StepperTables> cache_;
};

inline bool all_finite(const cvec& u) {
    for (const auto& z : u)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

} // namespace detail

// -- public single-step operations ------------------------------------------

inline Field nonlinear_tendency(const Field& u, double t, const CoefficientSpec& g,
                                const SolverConfig& cfg) {
    detail::Stepper st(u.grid(), g, cfg);
    const Field s = to_spectral(u);
    detail::cvec out(s.modes().size());
    st.nonlinear(s.modes(), t, out);
    return Field::from_modes(u.grid(), std::move(out));
}

inline Field step(const Field& u, double t, const CoefficientSpec& g, const SolverConfig& cfg) {
    detail::Stepper st(u.grid(), g, cfg);
    detail::cvec state = to_spectral(u).modes();
    st.advance(state, t, cfg.dt);
    return Field::from_modes(u.grid(), std::move(state));
}

// Growth/overflow detector: H^1 factor, amplitude cap, or non-finite values.
// A numerical proxy only; it reports growth, it does not prove blow-up.
inline std::optional<RunStatus> detect_blowup(const Field& u, double initial_h1,
                                              const SolverConfig& cfg) {
    const Field p = to_physical(u);
    double amp = 0.0;
    for (double v : p.samples()) {
        if (!std::isfinite(v)) return RunStatus::nan_detected;
        amp = std::max(amp, std::abs(v));
    }
    if (amp > cfg.blowup_amp_max) return RunStatus::blowup_detected;
    if (initial_h1 > 0.0 && sobolev_norm(u, 1.0) > cfg.blowup_h1_factor * initial_h1)
        return RunStatus::blowup_detected;
    return std::nullopt;
}

// -- evolve ------------------------------------------------------------------

// Resume/interruption controls (used by the CLI runner and the tests; plain
// evolve(phi, g, cfg) is the ordinary entry point).
struct EvolveControl {
    // called after every completed step with the spectral state and the
    // trajectory accumulated so far (for checkpoint bookkeeping)
    std::function<void(int step_index, double t, const detail::cvec& state,
                       const Trajectory& so_far)>
        after_step;
    // called whenever a scalar record / snapshot is appended, including at t=0
    std::function<void(const ScalarRecord&)> on_scalar;
    std::function<void(int ordinal_in_run, const Snapshot&)> on_snapshot;
    int stop_after_steps = -1;          // < 0: run to completion
    const detail::cvec* resume_state = nullptr;
    int resume_step = 0;
    double resume_initial_h1 = -1.0;    // detector baseline of the original run
};

inline Trajectory evolve(const Field& phi, const CoefficientSpec& g, const SolverConfig& cfg,
                         const EvolveControl& ctl = {}) {
    if (!(cfg.dt > 0.0)) throw ConfigError("evolve: dt must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigError("evolve: t_end must be positive");
    if (cfg.dt > cfg.t_end) throw ConfigError("evolve: dt must not exceed t_end");
    if (cfg.k < 1) throw ConfigError("evolve: k must be >= 1");
    if (cfg.conserve_check_every < 1) throw ConfigError("evolve: conserve_check_every must be >= 1");
    for (double ts : cfg.snapshot_times)
        if (ts < 0.0 || ts > cfg.t_end)
            throw ConfigError("evolve: snapshot time outside [0, t_end]");

    const GridPtr& grid = phi.grid();
    const int n = grid->size();
    Trajectory traj;

    const Field phi_p = to_physical(phi);
    {
        const auto& s = phi_p.samples();
        const double edge = std::max(std::abs(s.front()), std::abs(s.back()));
        if (edge > 1e-10)
            traj.warnings.push_back("initial datum magnitude " + std::to_string(edge) +
                                    " at the box edge; periodization error may be material");
    }

    const double dt_eff = effective_dt(cfg, g);
    const auto schedule = detail::StepSchedule::build(cfg, dt_eff);
    const double lambda = g.mean();

    detail::Stepper stepper(grid, g, cfg);
    detail::cvec state;
    int start_step = 0;
    if (ctl.resume_state) {
        state = *ctl.resume_state;
        start_step = ctl.resume_step;
        if (static_cast<int>(state.size()) != n)
            throw ConfigError("evolve: resume state size does not match grid");
        if (start_step < 0 || start_step > schedule.steps())
            throw ConfigError("evolve: resume step outside the schedule");
    } else {
        state = to_spectral(phi).modes();
    }

    const double initial_h1 = ctl.resume_initial_h1 >= 0.0
                                  ? ctl.resume_initial_h1
                                  : sobolev_norm(Field::from_modes(grid, state), 1.0);
    traj.initial_h1 = initial_h1;

    auto snapshot_field = [&](const detail::cvec& u) {
        std::vector<double> ph(static_cast<size_t>(n));
        grid->backward(u.data(), ph.data());
        return Field::from_samples(grid, std::move(ph));
    };
    auto record_scalars = [&](double t, const detail::cvec& u) {
        const Field f = snapshot_field(u);
        traj.scalars.push_back({t, mass(f), energy(f, lambda, cfg.k), sobolev_norm(f, 1.0),
                                g.eval(t)});
        if (ctl.on_scalar) ctl.on_scalar(traj.scalars.back());
    };
    auto push_snapshot = [&](double t, Field f) {
        traj.snapshots.push_back({t, std::move(f)});
        if (ctl.on_snapshot)
            ctl.on_snapshot(static_cast<int>(traj.snapshots.size()) - 1, traj.snapshots.back());
    };

    if (start_step == 0) {
        push_snapshot(0.0, phi_p);
        record_scalars(0.0, state);
    }

    for (int i = start_step; i < schedule.steps(); ++i) {
        const double t = schedule.boundaries[static_cast<size_t>(i)];
        const double t_next = schedule.boundaries[static_cast<size_t>(i) + 1];
        stepper.advance(state, t, t_next - t);
        const int step_index = i + 1;
        const bool at_end = step_index == schedule.steps();
        const bool check_now = (step_index % cfg.conserve_check_every == 0) || at_end ||
                               schedule.is_snapshot[static_cast<size_t>(step_index)];

        if (check_now) {
            if (!detail::all_finite(state)) {
                traj.status = RunStatus::nan_detected;
                traj.event_time = t_next;
                push_snapshot(t_next, snapshot_field(state));
                return traj;
            }
            record_scalars(t_next, state);
            const auto trigger =
                detect_blowup(Field::from_modes(grid, state), initial_h1, cfg);
            if (trigger) {
                traj.status = *trigger;
                traj.event_time = t_next;
                push_snapshot(t_next, snapshot_field(state));
                return traj;
            }
        }
        if (schedule.is_snapshot[static_cast<size_t>(step_index)])
            push_snapshot(t_next, snapshot_field(state));
        if (ctl.after_step) ctl.after_step(step_index, t_next, state, traj);
        if (ctl.stop_after_steps >= 0 && step_index >= ctl.stop_after_steps && !at_end) {
            // interrupted by the caller; trajectory holds the portion so far
            traj.status = RunStatus::completed;
            traj.event_time = t_next;
            return traj;
        }
    }
    traj.status = RunStatus::completed;
    return traj;
}

} // namespace oscillakdv
