// optimize.hpp - bounded Nelder-Mead and the slice-stack tuner built on it
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "superrad/cascade.hpp"
#include "superrad/domains.hpp"
#include "superrad/errors.hpp"
#include "superrad/specfun.hpp"
#include "superrad/waveform.hpp"

namespace superrad {

struct NelderMeadOptions {
    int budget = 200;                ///< maximum objective evaluations
    double initial_step = 0.1;       ///< simplex edge as a fraction of each coordinate (or of the box width if zero)
    double f_tol = 1e-10;            ///< spread of simplex values
    double x_tol = 1e-7;             ///< relative simplex diameter
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f over the box [lower, upper]. Trial points are clamped to the box,
/// so the search is deterministic and never leaves it. x0 is a vertex of the
/// starting simplex.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const std::vector<double>& lower,
                                    const std::vector<double>& upper, const NelderMeadOptions& opt = {}) {
    const std::size_t dim = x0.size();
    if (dim == 0 || lower.size() != dim || upper.size() != dim)
        throw DomainError("nelder_mead: dimension mismatch");
    if (opt.budget < static_cast<int>(dim) + 1) throw DomainError("nelder_mead: budget smaller than the simplex");
    for (std::size_t i = 0; i < dim; ++i)
        if (!(lower[i] < upper[i])) throw DomainError("nelder_mead: empty box");

    const auto clamp = [&](std::vector<double> x) {
        for (std::size_t i = 0; i < dim; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
        return x;
    };

    NelderMeadResult best;
    int evals = 0;
    const auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        if (!std::isfinite(v)) v = std::numeric_limits<double>::max();
        if (v < best.value) {
            best.value = v;
            best.x = x;
        }
        return v;
    };

    std::vector<std::vector<double>> simplex(dim + 1);
    std::vector<double> values(dim + 1);
    simplex[0] = clamp(std::move(x0));
    values[0] = eval(simplex[0]);
    for (std::size_t i = 0; i < dim; ++i) {
        auto v = simplex[0];
        double h = opt.initial_step * std::abs(v[i]);
        if (h == 0.0) h = opt.initial_step * (upper[i] - lower[i]);
        v[i] = (v[i] + h <= upper[i]) ? v[i] + h : v[i] - h;
        simplex[i + 1] = clamp(std::move(v));
        values[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(dim + 1);
    while (evals < opt.budget) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t lo = order.front(), hi = order.back(), second = order[dim - 1];

        double diameter = 0.0, scale = 0.0;
        for (std::size_t j = 0; j <= dim; ++j)
            for (std::size_t i = 0; i < dim; ++i) {
                diameter = std::max(diameter, std::abs(simplex[j][i] - simplex[lo][i]));
                scale = std::max(scale, std::abs(simplex[lo][i]));
            }
        if (values[hi] - values[lo] <= opt.f_tol && diameter <= opt.x_tol * std::max(scale, 1e-300)) {
            best.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t j = 0; j <= dim; ++j)
            if (j != hi)
                for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[j][i] / static_cast<double>(dim);
        const auto along = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t i = 0; i < dim; ++i) x[i] = centroid[i] + coef * (simplex[hi][i] - centroid[i]);
            return clamp(std::move(x));
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < values[lo]) {
            if (evals >= opt.budget) {
                simplex[hi] = xr;
                values[hi] = fr;
                break;
            }
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[hi] = std::move(xe);
                values[hi] = fe;
            } else {
                simplex[hi] = std::move(xr);
                values[hi] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[hi] = std::move(xr);
            values[hi] = fr;
            continue;
        }
        if (evals >= opt.budget) break;
        const bool outside = fr < values[hi];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < std::min(fr, values[hi])) {
            simplex[hi] = std::move(xc);
            values[hi] = fc;
            continue;
        }
        for (std::size_t j = 0; j <= dim && evals < opt.budget; ++j) {
            if (j == lo) continue;
            for (std::size_t i = 0; i < dim; ++i) simplex[j][i] = simplex[lo][i] + 0.5 * (simplex[j][i] - simplex[lo][i]);
            simplex[j] = clamp(simplex[j]);
            values[j] = eval(simplex[j]);
        }
    }
    best.evaluations = evals;
    return best;
}

struct OptimizationResult {
    SliceStack best_stack;
    PulseMetrics best_metrics;
    int evaluations = 0;
    bool converged = false;
    SliceStack baseline_stack;
    double baseline_gain = 0.0;
};

/// Stack whose last coherence zero (the n-th in depth) sits at the far face:
/// t_p solves zero_n(gamma, t_p) = b_total t_p, and the interior boundaries are
/// the first n-1 zeros at that t_p.
inline SliceStack prescribed_stack(int n_slices, double b_total, double gamma) {
    if (n_slices < 1) throw DomainError("prescribed_stack: need at least one slice");
    if (!(b_total > 0.0) || !(gamma > 0.0)) throw DomainError("prescribed_stack: b_total and gamma must be > 0");
    const double jz = specfun::j1_zero(n_slices);
    double t_p = 0.25 * jz * jz / b_total;
    DomainDecomposition dec;
    for (int it = 0; it < 50; ++it) {
        dec = domain_boundaries(1.5 * b_total, gamma, t_p);
        if (dec.boundaries_bt.size() < static_cast<std::size_t>(n_slices))
            throw NumericalError("prescribed_stack: coherence zero not found", t_p, 0.0);
        const double next = dec.boundaries_bt[static_cast<std::size_t>(n_slices) - 1] / b_total;
        const bool done = std::abs(next - t_p) <= 1e-12 * t_p;
        t_p = next;
        if (done) break;
    }
    dec = domain_boundaries(1.5 * b_total, gamma, t_p);
    SliceStack s;
    s.t_p = t_p;
    s.gamma = gamma;
    double prev = 0.0;
    for (int k = 0; k + 1 < n_slices; ++k) {
        const double z = dec.boundaries_bt[static_cast<std::size_t>(k)] / t_p;
        s.slice_b.push_back(z - prev);
        prev = z;
    }
    s.slice_b.push_back(b_total - prev);
    s.validate();
    return s;
}

/// Peak of the numeric cascade for a unit step on a grid through t_p with the
/// given sample density, ending one reference time after t_p.
inline PulseMetrics stack_peak_metrics(const SliceStack& stack, double b_ref) {
    const TimeGrid grid = grid_through(stack.t_p, stack.t_p + 1.0 / b_ref, 128.0 * b_ref);
    return pulse_metrics(cascade_numeric(stack, Waveform::constant(grid, 1.0)));
}

/// Maximizes the peak intensity over (t_p, b_1 .. b_{n-1}) with b_n = b_total - sum,
/// starting from prescribed_stack. Infeasible points (b_n <= 0 or an unresolvable
/// grid) score zero gain.
inline OptimizationResult optimize_stack(int n_slices, double b_total, double gamma, int budget) {
    if (n_slices < 1 || n_slices > 8) throw DomainError("optimize_stack: n_slices must be in 1..8");
    if (budget < 50) throw DomainError("optimize_stack: budget must be >= 50");
    const SliceStack seed = prescribed_stack(n_slices, b_total, gamma);
    const double b_ref = seed.slice_b[0];

    const auto to_stack = [&](const std::vector<double>& x) -> std::optional<SliceStack> {
        SliceStack s;
        s.t_p = x[0];
        s.gamma = gamma;
        double used = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            s.slice_b.push_back(x[i]);
            used += x[i];
        }
        const double last = b_total - used;
        if (!(last > 1e-9 * b_total)) return std::nullopt;
        s.slice_b.push_back(last);
        return s;
    };
    const auto objective = [&](const std::vector<double>& x) {
        const auto s = to_stack(x);
        if (!s) return 0.0;
        try {
            return -stack_peak_metrics(*s, b_ref).peak_intensity_gain;
        } catch (const ResolutionError&) {
            return 0.0;
        }
    };

    std::vector<double> x0{seed.t_p}, lower{0.5 * seed.t_p}, upper{2.0 * seed.t_p};
    for (std::size_t k = 0; k + 1 < seed.size(); ++k) {
        x0.push_back(seed.slice_b[k]);
        lower.push_back(1e-3 * b_total);
        upper.push_back(b_total);
    }
    NelderMeadOptions opt;
    opt.budget = budget;
    const auto nm = nelder_mead(objective, x0, lower, upper, opt);

    OptimizationResult r;
    r.baseline_stack = seed;
    r.baseline_gain = stack_peak_metrics(seed, b_ref).peak_intensity_gain;
    r.best_stack = *to_stack(nm.x);
    r.best_metrics = stack_peak_metrics(r.best_stack, b_ref);
    r.evaluations = nm.evaluations;
    r.converged = nm.converged;
    return r;
}

} // namespace superrad
