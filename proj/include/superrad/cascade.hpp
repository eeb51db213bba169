// cascade.hpp - phase-shifter cascades: closed-form outputs for one to three
// slices, a numeric N-slice cascade, burst metrics and the pulse-stacking peak
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "superrad/domains.hpp"
#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"
#include "superrad/propagation.hpp"
#include "superrad/quadrature.hpp"
#include "superrad/specfun.hpp"
#include "superrad/waveform.hpp"

namespace superrad {

struct PulseMetrics {
    double peak_amplitude = 0.0;       ///< signed, units of the input amplitude
    double peak_intensity_gain = 0.0;  ///< peak_amplitude^2
    double t_peak = 0.0;
    double width = 0.0;                ///< FWHM of the intensity around the peak
};

/// Metrics of the largest-|amplitude| sample. The half-maximum crossings are
/// interpolated linearly; a side without a crossing ends at the grid edge.
inline PulseMetrics pulse_metrics(const Waveform& w) {
    w.validate();
    const auto& a = w.amplitude;
    std::size_t ip = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (std::abs(a[i]) > std::abs(a[ip])) ip = i;
    PulseMetrics m;
    m.peak_amplitude = a[ip];
    m.peak_intensity_gain = a[ip] * a[ip];
    m.t_peak = w.grid.at(ip);
    const double half = 0.5 * m.peak_intensity_gain;
    if (half == 0.0) return m;
    const auto intensity = [&](std::size_t i) { return a[i] * a[i]; };
    double left = w.grid.t_start, right = w.grid.t_end;
    for (std::size_t i = ip; i > 0; --i) {
        if (intensity(i - 1) < half) {
            const double f = (intensity(i) - half) / (intensity(i) - intensity(i - 1));
            left = w.grid.at(i) - f * w.grid.step();
            break;
        }
    }
    for (std::size_t i = ip; i + 1 < a.size(); ++i) {
        if (intensity(i + 1) < half) {
            const double f = (intensity(i) - half) / (intensity(i) - intensity(i + 1));
            right = w.grid.at(i) + f * w.grid.step();
            break;
        }
    }
    m.width = right - left;
    return m;
}

namespace detail {

inline constexpr double kMinSamplesPerRateUnit = 64.0;
inline constexpr double kCascadeQuadTol = 1e-11;

// Step response that vanishes before the step.
inline double causal_step(double b, double gamma, double t) {
    if (t < 0.0) return 0.0;
    return step_response_series({b, gamma}, t);
}

// Index of the grid node taken as t_p, after checking the grid resolves 1/b1.
inline std::size_t switch_index(const TimeGrid& grid, double t_p, double b1) {
    grid.validate();
    if (!(t_p > 0.0)) throw DomainError("cascade: t_p must be > 0");
    if (t_p < grid.t_start || t_p > grid.t_end) throw DomainError("cascade: grid must cover t_p");
    if (grid.step() * b1 > (1.0 + 1e-9) / kMinSamplesPerRateUnit)
        throw ResolutionError("cascade: grid needs at least 64 samples per 1/b1");
    return grid.nearest(t_p);
}

// int_0^{t - t_p} f(t - tau) K_b(tau) dtau for t > t_p.
template <class F>
double kernel_tail_integral(const F& f, double b, double gamma, double t, double t_p) {
    const double upper = t - t_p;
    if (upper <= 0.0) return 0.0;
    const AbsorberSpec spec{b, gamma};
    const auto integrand = [&](double tau) { return f(t - tau) * greens_kernel_smooth(spec, tau); };
    const auto pts = quadrature::uniform_breakpoints(0.0, upper, 2.0 / b);
    const auto r = quadrature::integrate_adaptive(integrand, pts, kCascadeQuadTol);
    if (!r.converged && r.error > 1e-8)
        throw NumericalError("cascade: kernel integral did not converge", r.value, r.error);
    return r.value;
}

inline void require_slices(const SliceStack& stack, std::size_t n, const char* who) {
    stack.validate();
    if (stack.size() != n) throw DomainError(std::string(who) + ": wrong number of slices");
}

} // namespace detail

/// Output of one slice whose input is phase-flipped at t_p:
/// S(b1, t) - 2 S(b1, t - t_p).
inline Waveform one_slice_output(double b1, double gamma, double t_p, const TimeGrid& grid) {
    AbsorberSpec{b1, gamma}.validate();
    const std::size_t p = detail::switch_index(grid, t_p, b1);
    const double tp = grid.at(p);
    Waveform w{grid, std::vector<double>(grid.n_samples)};
    parallel_for(grid.n_samples, [&](std::size_t i) {
        const double t = grid.at(i);
        double v = detail::causal_step(b1, gamma, t);
        if (i >= p) v -= 2.0 * detail::causal_step(b1, gamma, t - tp);
        w.amplitude[i] = v;
    });
    return w;
}

/// Field at the exit of slice 1 after traversing slice 2 for the input
/// Theta(t - t_p) S(b1, t): S(b1, t) - int_0^{t-t_p} S(b1, t - tau) K2(tau) dtau.
inline double two_slice_inner(double b1, double b2, double gamma, double t_p, double t) {
    if (t < t_p) return 0.0;
    const auto s1 = [&](double s) { return detail::causal_step(b1, gamma, s); };
    return s1(t) - detail::kernel_tail_integral(s1, b2, gamma, t, t_p);
}

/// Two slices, each preceded by a phase flip at t_p:
/// S(b_l, t) + 2 S(b_l, t - t_p) - 2 Theta(t - t_p) Omega_12(t), b_l = b1 + b2.
inline Waveform two_slice_output(const SliceStack& stack, const TimeGrid& grid) {
    detail::require_slices(stack, 2, "two_slice_output");
    const double b1 = stack.slice_b[0], b2 = stack.slice_b[1], g = stack.gamma, bl = b1 + b2;
    const std::size_t p = detail::switch_index(grid, stack.t_p, b1);
    const double tp = grid.at(p);
    Waveform w{grid, std::vector<double>(grid.n_samples)};
    parallel_for(grid.n_samples, [&](std::size_t i) {
        const double t = grid.at(i);
        double v = detail::causal_step(bl, g, t);
        if (i >= p) v += 2.0 * detail::causal_step(bl, g, t - tp) - 2.0 * two_slice_inner(b1, b2, g, tp, t);
        w.amplitude[i] = v;
    });
    return w;
}

/// Three slices: S(z3, t) + 2 Theta(t - t_p) [A + B + C + D] with
///   A = S1(t) - S2(t) - S3(t - t_p),
///   B = -int_0^{t-t_p} S1(t - tau) K2(tau) dtau,
///   C = -int_0^{t-t_p} [S1 - S2](t - tau) K3(tau) dtau,
///   D = -int_0^{t-t_p} K3(tau) B(t - tau) dtau,
/// where S_k is the step response of the first k slices together. B and C are
/// integrated per sample; D is the grid convolution of B with slice 3's kernel.
inline Waveform three_slice_output(const SliceStack& stack, const TimeGrid& grid) {
    detail::require_slices(stack, 3, "three_slice_output");
    const double b1 = stack.slice_b[0], b2 = stack.slice_b[1], b3 = stack.slice_b[2], g = stack.gamma;
    const double z2 = b1 + b2, z3 = z2 + b3;
    const std::size_t p = detail::switch_index(grid, stack.t_p, b1);
    const double tp = grid.at(p);
    const std::size_t n = grid.n_samples;

    const auto s1 = [&](double s) { return detail::causal_step(b1, g, s); };
    const auto s1_minus_s2 = [&](double s) { return detail::causal_step(b1, g, s) - detail::causal_step(z2, g, s); };

    std::vector<double> a(n, 0.0), bc(n, 0.0), b_term(n - p, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const double t = grid.at(i);
        if (i < p) {
            a[i] = detail::causal_step(z3, g, t);
            return;
        }
        const double bt = -detail::kernel_tail_integral(s1, b2, g, t, tp);
        const double ct = -detail::kernel_tail_integral(s1_minus_s2, b3, g, t, tp);
        b_term[i - p] = bt;
        bc[i] = bt + ct;
        a[i] = detail::causal_step(z3, g, t) +
               2.0 * (s1(t) - detail::causal_step(z2, g, t) - detail::causal_step(z3, g, t - tp));
    });

    std::vector<double> d(n - p, 0.0);
    if (n - p >= 2) {
        const ConvolutionPlan plan({b3, g}, grid.step(), n - p);
        d = plan.apply(b_term);
        for (std::size_t j = 0; j < d.size(); ++j) d[j] -= b_term[j];
    }

    Waveform w{grid, std::move(a)};
    for (std::size_t i = p; i < n; ++i) w.amplitude[i] += 2.0 * (bc[i] + d[i - p]);
    return w;
}

struct CascadeOptions {
    bool flips_enabled = true;
    /// Optional fixed sign applied to the field in each gap between slices (size N-1).
    std::vector<double> gap_signs;
};

/// Numeric N-slice cascade. Before each slice the field is flipped for t >= t_p,
/// then propagated by convolve_response with that slice's rate. The field is
/// carried as a part that is smooth from the input start plus a part living on
/// [t_p, end], so no interpolation stencil straddles the jump at t_p.
inline Waveform cascade_numeric(const SliceStack& stack, const Waveform& input, const CascadeOptions& opt = {}) {
    stack.validate();
    input.validate();
    if (!opt.gap_signs.empty() && opt.gap_signs.size() + 1 != stack.size())
        throw DomainError("cascade_numeric: gap_signs needs one entry per gap");
    const TimeGrid& grid = input.grid;
    const std::size_t p = detail::switch_index(grid, stack.t_p, stack.slice_b[0]);
    const std::size_t n = grid.n_samples;

    std::vector<double> smooth = input.amplitude;
    std::vector<double> late(n - p, 0.0);
    for (std::size_t k = 0; k < stack.size(); ++k) {
        if (opt.flips_enabled)
            for (std::size_t j = 0; j < late.size(); ++j) late[j] = -late[j] - 2.0 * smooth[p + j];
        const ConvolutionPlan plan({stack.slice_b[k], stack.gamma}, grid.step(), n);
        smooth = plan.apply(smooth);
        late = plan.apply(late);
        if (!opt.gap_signs.empty() && k + 1 < stack.size()) {
            const double s = opt.gap_signs[k];
            for (double& v : smooth) v *= s;
            for (double& v : late) v *= s;
        }
    }
    Waveform out{grid, std::move(smooth)};
    for (std::size_t j = 0; j < late.size(); ++j) out.amplitude[p + j] += late[j];
    return out;
}

/// Signed amplitude at t_p + 0. Closed forms for N <= 3; larger stacks run the
/// numeric cascade on a grid ending at t_p.
inline double peak_amplitude_at_tp(const SliceStack& stack) {
    stack.validate();
    const double tp = stack.t_p, g = stack.gamma;
    std::vector<double> z(stack.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < stack.size(); ++k) z[k] = (acc += stack.slice_b[k]);
    const auto s = [&](double b) { return step_response_series({b, g}, tp); };
    switch (stack.size()) {
    case 1: return s(z[0]) - 2.0;
    case 2: return s(z[1]) + 2.0 - 2.0 * s(z[0]);
    case 3: return s(z[2]) - 2.0 + 2.0 * s(z[0]) - 2.0 * s(z[1]);
    default: break;
    }
    const double b_max = *std::max_element(stack.slice_b.begin(), stack.slice_b.end());
    const TimeGrid grid = grid_through(tp, tp, 128.0 * b_max);
    const Waveform out = cascade_numeric(stack, Waveform::constant(grid, 1.0));
    return out.amplitude[grid.nearest(tp)];
}

/// Peak produced on a single absorber by two phase switchings at t1 and t2:
/// 2 - 2 e^{-gamma t1} J0(2 sqrt(b t1)) + e^{-gamma t2} J0(2 sqrt(b t2)).
inline double stacking_peak(double b, double gamma, double t1, double t2) {
    if (!(t1 >= 0.0) || !(t2 >= 0.0)) throw DomainError("stacking_peak: switching times must be >= 0");
    if (!(b >= 0.0) || !(gamma >= 0.0)) throw DomainError("stacking_peak: b and gamma must be >= 0");
    const auto decayed_j0 = [&](double t) {
        return std::exp(-gamma * t) * specfun::factorial_scaled_bessel_single(0, b * t);
    };
    return 2.0 - 2.0 * decayed_j0(t1) + decayed_j0(t2);
}

} // namespace superrad
