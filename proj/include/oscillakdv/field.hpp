#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "oscillakdv/grid.hpp"

namespace oscillakdv {

enum class Representation { physical, spectral };

// One time slice of the solution: n real samples or n complex modes, tagged.
class Field {
public:
    Field() = default;

    static Field from_samples(GridPtr grid, std::vector<double> samples) {
        if (!grid) throw UsageError("Field: null grid");
        if (static_cast<int>(samples.size()) != grid->size())
            throw UsageError("Field: sample count does not match grid");
        Field f;
        f.grid_ = std::move(grid);
        f.samples_ = std::move(samples);
        f.repr_ = Representation::physical;
        return f;
    }

    static Field from_modes(GridPtr grid, std::vector<std::complex<double>> modes) {
        if (!grid) throw UsageError("Field: null grid");
        if (static_cast<int>(modes.size()) != grid->size())
            throw UsageError("Field: mode count does not match grid");
        Field f;
        f.grid_ = std::move(grid);
        f.modes_ = std::move(modes);
        f.repr_ = Representation::spectral;
        return f;
    }

    static Field zeros(GridPtr grid) {
        if (!grid) throw UsageError("Field: null grid");
        const auto n = static_cast<size_t>(grid->size());
        return from_samples(std::move(grid), std::vector<double>(n, 0.0));
    }

    Representation representation() const { return repr_; }
    bool is_physical() const { return repr_ == Representation::physical; }
    bool is_spectral() const { return repr_ == Representation::spectral; }
    const GridPtr& grid() const { return grid_; }

    const std::vector<double>& samples() const {
        if (!is_physical()) throw UsageError("Field: not in physical representation");
        return samples_;
    }
    const std::vector<std::complex<double>>& modes() const {
        if (!is_spectral()) throw UsageError("Field: not in spectral representation");
        return modes_;
    }

private:
    GridPtr grid_;
    std::vector<double> samples_;
    std::vector<std::complex<double>> modes_;
    Representation repr_ = Representation::physical;
};

inline Field to_spectral(const Field& f) {
    if (f.is_spectral()) return f;
    const auto& g = *f.grid();
    std::vector<std::complex<double>> modes(static_cast<size_t>(g.size()));
    g.forward(f.samples().data(), modes.data());
    return Field::from_modes(f.grid(), std::move(modes));
}

inline Field to_physical(const Field& f) {
    if (f.is_physical()) return f;
    const auto& g = *f.grid();
    std::vector<double> samples(static_cast<size_t>(g.size()));
    g.backward(f.modes().data(), samples.data());
    return Field::from_samples(f.grid(), std::move(samples));
}

// Snapshot-wise linear algebra used by the difference norms.
inline Field field_sub(const Field& a, const Field& b) {
    if (!same_grid(*a.grid(), *b.grid()))
        throw ConfigError("field_sub: mismatched grids");
    Field ap = to_physical(a), bp = to_physical(b);
    std::vector<double> d(ap.samples().size());
    for (size_t j = 0; j < d.size(); ++j) d[j] = ap.samples()[j] - bp.samples()[j];
    return Field::from_samples(a.grid(), std::move(d));
}

inline Field field_scale(const Field& a, double alpha) {
    if (a.is_physical()) {
        std::vector<double> v = a.samples();
        for (double& x : v) x *= alpha;
        return Field::from_samples(a.grid(), std::move(v));
    }
    std::vector<std::complex<double>> v = a.modes();
    for (auto& x : v) x *= alpha;
    return Field::from_modes(a.grid(), std::move(v));
}

} // namespace oscillakdv
