#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oscillakdv/errors.hpp"

namespace oscillakdv {

// Periodic coefficient g, its frequency omega and phase t0. eval(t) returns
// g(omega*(t + t0)) with the argument reduced modulo the period.
//
// step_example is a piecewise-constant profile fixed to 1 near 0 (one-sided
// copies of |s| <= eps after period reduction), 0 on [1, 1+eps], and a
// constant filler value on the rest chosen so the mean is exactly zero.
class CoefficientSpec {
public:
    enum class Variant { constant, cosine, cos_squared, step_example, tabulated };

    static CoefficientSpec constant(double c) {
        CoefficientSpec s;
        s.variant_ = Variant::constant;
        s.c_ = c;
        s.period_ = 1.0;
        s.mean_ = c;
        s.sup_ = std::abs(c);
        return s;
    }

    static CoefficientSpec cosine(double omega, double t0 = 0.0, double period = 2.0 * M_PI) {
        CoefficientSpec s;
        s.variant_ = Variant::cosine;
        s.omega_ = omega;
        s.t0_ = t0;
        s.set_period(period);
        s.mean_ = 0.0;
        s.sup_ = 1.0;
        return s;
    }

    static CoefficientSpec cos_squared(double omega, double t0 = 0.0, double period = 2.0 * M_PI) {
        CoefficientSpec s;
        s.variant_ = Variant::cos_squared;
        s.omega_ = omega;
        s.t0_ = t0;
        s.set_period(period);
        s.mean_ = 0.5;
        s.sup_ = 1.0;
        return s;
    }

    static CoefficientSpec step_example(double eps, double period, double omega,
                                        double t0 = 0.0) {
        CoefficientSpec s;
        s.variant_ = Variant::step_example;
        s.omega_ = omega;
        s.t0_ = t0;
        if (!(period > 1.0))
            throw ConfigError("step_example: period must exceed 1");
        s.set_period(period);
        if (!(eps > 0.0 && eps < 0.5 * (period - 1.0)))
            throw ConfigError("step_example: need 0 < eps < (period-1)/2");
        if (!(eps < 1.0))
            throw ConfigError("step_example: eps must be < 1 so the 1-plateau and 0-plateau "
                              "do not overlap");
        s.eps_ = eps;
        s.filler_ = -2.0 * eps / (period - 3.0 * eps);
        s.mean_ = 0.0; // by construction of the filler value
        s.sup_ = std::max(1.0, std::abs(s.filler_));
        return s;
    }

    static CoefficientSpec tabulated(std::vector<double> samples, double period, double omega,
                                     double t0 = 0.0) {
        CoefficientSpec s;
        s.variant_ = Variant::tabulated;
        s.omega_ = omega;
        s.t0_ = t0;
        s.set_period(period);
        if (samples.size() < 2)
            throw ConfigError("tabulated: need at least 2 samples");
        s.samples_ = std::move(samples);
        s.sup_ = 0.0;
        for (double v : s.samples_) s.sup_ = std::max(s.sup_, std::abs(v));
        // trapezoid over one period; the nodes include every sample point, so
        // this integrates the linear interpolant exactly
        const size_t nsub = std::max<size_t>(1, 10000 / s.samples_.size() + 1);
        const size_t nodes = s.samples_.size() * nsub;
        double acc = 0.0;
        for (size_t i = 0; i < nodes; ++i)
            acc += s.eval_phase(period * static_cast<double>(i) / static_cast<double>(nodes));
        s.mean_ = acc / static_cast<double>(nodes);
        return s;
    }

    Variant variant() const { return variant_; }
    double omega() const { return omega_; }
    double t0() const { return t0_; }
    double period() const { return period_; }
    double mean() const { return mean_; }
    double sup_bound() const { return sup_; }
    double constant_value() const { return c_; }
    double eps() const { return eps_; }
    const std::vector<double>& samples() const { return samples_; }

    // Returns a copy with a different (omega, t0); used by the sweep harness.
    CoefficientSpec with_phase(double omega, double t0) const {
        CoefficientSpec s = *this;
        s.omega_ = omega;
        s.t0_ = t0;
        return s;
    }

    double eval(double t) const {
        if (variant_ == Variant::constant) return c_;
        double s = std::fmod(omega_ * (t + t0_), period_);
        if (s < 0.0) s += period_;
        return eval_phase(s);
    }

    // g at phase s in [0, period)
    double eval_phase(double s) const {
        switch (variant_) {
            case Variant::constant:
                return c_;
            case Variant::cosine:
                return std::cos(2.0 * M_PI * s / period_);
            case Variant::cos_squared: {
                const double c = std::cos(2.0 * M_PI * s / period_);
                return c * c;
            }
            case Variant::step_example:
                if (s <= eps_ || s >= period_ - eps_) return 1.0;
                if (s >= 1.0 && s <= 1.0 + eps_) return 0.0;
                return filler_;
            case Variant::tabulated: {
                const size_t n = samples_.size();
                const double pos = s / period_ * static_cast<double>(n);
                size_t i = static_cast<size_t>(pos);
                if (i >= n) i = n - 1;
                const double frac = pos - static_cast<double>(i);
                const double a = samples_[i];
                const double b = samples_[(i + 1) % n]; // periodic wrap
                return a + frac * (b - a);
            }
        }
        return 0.0;
    }

    // Discontinuity locations within [0, period); empty for smooth variants.
    std::vector<double> breakpoints() const {
        if (variant_ != Variant::step_example) return {};
        return {0.0, eps_, 1.0, 1.0 + eps_, period_ - eps_};
    }

    std::string variant_name() const {
        switch (variant_) {
            case Variant::constant: return "constant";
            case Variant::cosine: return "cosine";
            case Variant::cos_squared: return "cos_squared";
            case Variant::step_example: return "step_example";
            case Variant::tabulated: return "tabulated";
        }
        return "?";
    }

private:
    CoefficientSpec() = default;

    void set_period(double period) {
        if (!(period > 0.0)) throw ConfigError("CoefficientSpec: period must be positive");
        period_ = period;
    }

    Variant variant_ = Variant::constant;
    double c_ = 0.0;
    double omega_ = 0.0;
    double t0_ = 0.0;
    double period_ = 1.0;
    double eps_ = 0.0;
    double filler_ = 0.0;
    double mean_ = 0.0;
    double sup_ = 0.0;
    std::vector<double> samples_;
};

inline double mean(const CoefficientSpec& s) { return s.mean(); }

} // namespace oscillakdv
