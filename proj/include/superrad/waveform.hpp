// waveform.hpp - uniform time grids and sampled real waveforms
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "superrad/errors.hpp"

namespace superrad {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t n_samples = 2;

    void validate() const {
        if (!(t_start < t_end) || !std::isfinite(t_start) || !std::isfinite(t_end))
            throw DomainError("TimeGrid: need finite t_start < t_end");
        if (n_samples < 2) throw DomainError("TimeGrid: need at least two samples");
    }

    double step() const { return (t_end - t_start) / static_cast<double>(n_samples - 1); }
    double at(std::size_t i) const { return i + 1 == n_samples ? t_end : t_start + step() * static_cast<double>(i); }

    /// Index of the node nearest to t (clamped to the grid).
    std::size_t nearest(double t) const {
        const double x = std::round((t - t_start) / step());
        if (x <= 0.0) return 0;
        if (x >= static_cast<double>(n_samples - 1)) return n_samples - 1;
        return static_cast<std::size_t>(x);
    }

    /// Grid on [t_start, t_start + (n_samples-1) h] that keeps the same spacing
    /// but starts at node `first` of this grid.
    TimeGrid tail_from(std::size_t first) const {
        return {at(first), t_end, n_samples - first};
    }
};

/// Grid on [0, >= t_end] whose spacing divides t_node exactly, with at least
/// samples_per_unit nodes per unit time. t_node lands on a node.
inline TimeGrid grid_through(double t_node, double t_end, double samples_per_unit) {
    if (!(t_node > 0.0) || !(t_end > 0.0) || !(samples_per_unit > 0.0))
        throw DomainError("grid_through: arguments must be positive");
    const double steps_to_node = std::max(1.0, std::ceil(t_node * samples_per_unit));
    const double h = t_node / steps_to_node;
    const double total_steps = std::max(steps_to_node, std::ceil(t_end / h - 1e-9));
    return {0.0, total_steps * h, static_cast<std::size_t>(total_steps) + 1};
}

/// Field samples in units of the input amplitude. Causal convention: the
/// waveform is zero before grid.t_start, and the sample at a jump holds the
/// right-hand limit.
struct Waveform {
    TimeGrid grid;
    std::vector<double> amplitude;

    void validate() const {
        grid.validate();
        if (amplitude.size() != grid.n_samples) throw DomainError("Waveform: amplitude length differs from grid");
        for (double v : amplitude)
            if (!std::isfinite(v)) throw DomainError("Waveform: non-finite sample");
    }

    static Waveform constant(const TimeGrid& grid, double value) {
        return {grid, std::vector<double>(grid.n_samples, value)};
    }

    template <class F>
    static Waveform sample(const TimeGrid& grid, F&& f) {
        Waveform w{grid, std::vector<double>(grid.n_samples)};
        for (std::size_t i = 0; i < grid.n_samples; ++i) w.amplitude[i] = f(grid.at(i));
        return w;
    }
};

/// Imaginary part of the slowly varying coherence, in units of amplitude x time.
struct CoherenceSeries {
    TimeGrid grid;
    std::vector<double> im_sigma;
};

} // namespace superrad
