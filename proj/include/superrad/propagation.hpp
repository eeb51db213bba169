// propagation.hpp - weak resonant pulse propagation through one homogeneously
// broadened absorber, by several independent routes:
//
//   * step_series        fast Bessel series for the step response and coherence
//   * *_quadrature       adaptive quadrature of the closed integral forms
//   * convolve_response  Green's-function convolution for sampled inputs
//   * propagate_mb       box-scheme marching of the coupled atom-field equations
//   * *_spectral         contour inversion of the transfer function
//
// Units: amplitudes in units of the input step height; depth is carried as the
// cumulative superradiant rate b, so only b and gamma ever appear.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"
#include "superrad/quadrature.hpp"
#include "superrad/specfun.hpp"
#include "superrad/waveform.hpp"

namespace superrad {

/// Superradiant rate b (effective thickness) and coherence decay rate gamma.
struct AbsorberSpec {
    double b = 0.0;
    double gamma = 1.0;

    void validate() const {
        if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("AbsorberSpec: b must be finite and >= 0");
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("AbsorberSpec: gamma must be finite and > 0");
    }
};

inline constexpr double kDefaultSeriesTol = 1e-14;
inline constexpr int kSeriesTermCap = 400;

/// Smooth part of the Green's function, e^{-gamma t} sqrt(b/t) J1(2 sqrt(bt)); equals b at t = 0.
inline double greens_kernel_smooth(const AbsorberSpec& spec, double t) {
    if (!(t >= 0.0)) throw DomainError("greens_kernel_smooth: t must be >= 0");
    if (spec.b == 0.0) return 0.0;
    return std::exp(-spec.gamma * t) * spec.b * specfun::factorial_scaled_bessel_single(1, spec.b * t);
}

struct StepSeriesValue {
    double field = 1.0;         ///< transmitted step response, units of the step height
    double im_coherence = 0.0;  ///< Im sigma_eg, units of step height x time
    int terms = 0;
    double bound = 0.0;         ///< bound on the discarded tail
};

/// Step response and coherence from the Bessel series
///
///   field = e^{-x} + sum_{n>=0} P_g(n) T_n(x) k_n(u)
///   coh   = t sum_{n>=1} e^{-g} g^{n-1}/n! T_n(x) k_n(u) + e^{-x} (1 - e^{-g} J0) / gamma
///
/// with x = b/gamma, g = gamma t, u = bt, P_g the Poisson(g) mass and k_n the
/// factorial-scaled Bessel values (|k_n| <= 1). Every factor is bounded, so the
/// truncation bound is rigorous: it uses |k_n| <= min(1, n!/u^{n/2}).
inline StepSeriesValue step_series(const AbsorberSpec& spec, double t, double tol = kDefaultSeriesTol) {
    spec.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("step_series: t must be finite and >= 0");
    if (!(tol > 0.0 && tol < 1e-3)) throw DomainError("step_series: tol must lie in (0, 1e-3)");
    StepSeriesValue out;
    if (t == 0.0) return out;

    const double b = spec.b, gamma = spec.gamma;
    const double g = gamma * t, u = b * t, x = b / gamma;
    const double exp_x = std::exp(-x);
    const double log_g = std::log(g);
    const double rho = u > 0.0 ? g / std::sqrt(u) : 0.0;
    const auto poisson = [&](int n) { return std::exp(-g + n * log_g - std::lgamma(n + 1.0)); };
    // e^{-g} g^{n-1} / n!
    const auto coh_weight = [&](int n) { return std::exp(-g + (n - 1) * log_g - std::lgamma(n + 1.0)); };

    const auto tail_bound = [&](int n, double t_next) {
        if (t_next == 0.0) return 0.0;
        double field_tail = 1.0, coh_tail = 1.0;
        if (n + 2 > g) {
            const double ratio = 1.0 / (1.0 - g / (n + 2.0));
            field_tail = std::min(1.0, poisson(n + 1) * ratio);
            coh_tail = coh_weight(n + 1) * ratio;
        }
        if (rho > 0.0 && rho < 1.0) {
            const double geo = std::exp(-g + (n + 1) * std::log(rho)) / (1.0 - rho);
            field_tail = std::min(field_tail, geo);
            coh_tail = std::min(coh_tail, geo / (rho * std::sqrt(u)));
        }
        return t_next * std::max(field_tail, coh_tail);
    };

    int table = std::min(kSeriesTermCap, static_cast<int>(std::ceil(g + 12.0 * std::sqrt(g) + 40.0)));
    std::vector<double> tails;
    int stop = -1;
    double last_bound = 1.0;
    for (;;) {
        tails = specfun::poisson_tail_table(table + 1, x);
        int below = 0;
        for (int n = 1; n <= table; ++n) {
            last_bound = tail_bound(n, tails[static_cast<std::size_t>(n) + 1]);
            below = last_bound < tol ? below + 1 : 0;
            if (below == 3) {
                stop = n;
                break;
            }
        }
        if (stop >= 0 || table >= kSeriesTermCap) break;
        table = kSeriesTermCap;
    }

    const std::vector<double> k = specfun::factorial_scaled_bessel(stop >= 0 ? stop : table, u);
    const int last = stop >= 0 ? stop : table;
    double field = exp_x;
    double coh_sum = 0.0;
    for (int n = 0; n <= last; ++n) {
        const double tk = tails[static_cast<std::size_t>(n)] * k[static_cast<std::size_t>(n)];
        field += poisson(n) * tk;
        if (n >= 1) coh_sum += coh_weight(n) * tk;
    }
    double coh = t * coh_sum;
    if (exp_x > 0.0) {
        // 1 - e^{-g} J0(2 sqrt u) without cancellation at small g, u
        double one_minus_j0;
        if (u < 1.0) {
            double term = 1.0, sum = 0.0;
            for (int m = 1; m < 60; ++m) {
                term *= -u / (static_cast<double>(m) * m);
                sum -= term;
                if (std::abs(term) < 1e-18) break;
            }
            one_minus_j0 = sum;
        } else {
            one_minus_j0 = 1.0 - k[0];
        }
        coh += exp_x * (-std::expm1(-g) + std::exp(-g) * one_minus_j0) / gamma;
    }
    if (stop < 0) {
        throw ConvergenceError("step_series: no convergence within " + std::to_string(kSeriesTermCap) + " terms",
                               field, last_bound, last);
    }
    out.field = field;
    out.im_coherence = coh;
    out.terms = last;
    out.bound = last_bound;
    return out;
}

/// Transmitted field for a unit step input, by the Bessel series.
inline double step_response_series(const AbsorberSpec& spec, double t, double tol = kDefaultSeriesTol) {
    return step_series(spec, t, tol).field;
}

/// Im sigma_eg for a unit step input, by the Bessel series.
inline double coherence_step(const AbsorberSpec& spec, double t, double tol = kDefaultSeriesTol) {
    return step_series(spec, t, tol).im_coherence;
}

enum class StepQuadratureForm {
    decay_plus_coherence,  ///< e^{-gamma t} J0 + gamma * int_0^t e^{-gamma s} J0 ds
    one_minus_kernel,      ///< 1 - int_0^t (smooth Green's kernel) ds
};

inline constexpr double kQuadratureAbsTol = 1e-10;

namespace detail {

// int_0^t h(s) ds with s = v^2, on panels no wider than a quarter Bessel period in v.
template <class H>
double sqrt_substituted_integral(const AbsorberSpec& spec, double t, H&& h, double abs_tol, const char* who) {
    if (t == 0.0) return 0.0;
    const double vmax = std::sqrt(t);
    double panel = vmax;
    if (spec.b > 0.0) panel = std::min(panel, std::numbers::pi / (4.0 * std::sqrt(spec.b)));
    panel = std::min(panel, 1.0 / std::sqrt(spec.gamma));
    auto f = [&](double v) { return 2.0 * v * h(v * v); };
    const auto res = quadrature::integrate_adaptive(f, quadrature::uniform_breakpoints(0.0, vmax, panel), 0.01 * abs_tol);
    if (!(res.error <= abs_tol)) throw NumericalError(std::string(who) + ": quadrature tolerance not met", res.value, res.error);
    return res.value;
}

} // namespace detail

/// Step response by quadrature of the closed integral forms.
inline double step_response_quadrature(const AbsorberSpec& spec, double t,
                                       StepQuadratureForm form = StepQuadratureForm::decay_plus_coherence) {
    spec.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("step_response_quadrature: t must be finite and >= 0");
    if (t == 0.0) return 1.0;
    const double b = spec.b, gamma = spec.gamma;
    if (form == StepQuadratureForm::one_minus_kernel) {
        const double integral = detail::sqrt_substituted_integral(
            spec, t, [&](double s) { return greens_kernel_smooth(spec, s); }, kQuadratureAbsTol, "step_response_quadrature");
        return 1.0 - integral;
    }
    const double integral = detail::sqrt_substituted_integral(
        spec, t, [&](double s) { return std::exp(-gamma * s) * specfun::factorial_scaled_bessel_single(0, b * s); },
        kQuadratureAbsTol / gamma, "step_response_quadrature");
    return std::exp(-gamma * t) * specfun::factorial_scaled_bessel_single(0, b * t) + gamma * integral;
}

/// Im sigma_eg for a unit step by quadrature of int_0^t e^{-gamma s} J0(2 sqrt(bs)) ds.
inline double coherence_step_quadrature(const AbsorberSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("coherence_step_quadrature: t must be finite and >= 0");
    return detail::sqrt_substituted_integral(
        spec, t,
        [&](double s) { return std::exp(-spec.gamma * s) * specfun::factorial_scaled_bessel_single(0, spec.b * s); },
        kQuadratureAbsTol, "coherence_step_quadrature");
}

/// Precomputed product-integration weights for out = in - K * in on a uniform grid.
///
/// The input is interpolated by cubic Lagrange polynomials on stencils that never
/// reach before the first sample, so the jump at the causal start passes through
/// the identity term unattenuated and no stencil straddles it. The kernel enters
/// only through its first four moments over each cell, which are integrated by
/// Gauss-Legendre on the smooth kernel.
class ConvolutionPlan {
public:
    static constexpr int kDegree = 3;

    ConvolutionPlan(const AbsorberSpec& spec, double step, std::size_t n) : step_(step), n_(n), identity_(spec.b == 0.0) {
        spec.validate();
        if (!(step > 0.0)) throw DomainError("ConvolutionPlan: step must be > 0");
        if (identity_ || n < 2) return;
        const double k0 = greens_kernel_smooth(spec, 0.0);
        const double k1 = greens_kernel_smooth(spec, step);
        if (std::abs(k1 - k0) > 0.1 * std::abs(k0))
            throw ResolutionError("convolve_response: kernel changes by more than 10% over one sample; refine the grid");

        moments_.assign(n * (kDegree + 1), 0.0);
        static const quadrature::GaussLegendre rule(10);
        parallel_for(n - 1, [&](std::size_t jm1) {
            const std::size_t j = jm1 + 1;
            std::array<double, kDegree + 1> mu{};
            for (std::size_t l = 0; l < rule.nodes.size(); ++l) {
                const double xi = 0.5 * (rule.nodes[l] + 1.0);
                const double w = 0.5 * rule.weights[l] * step;
                const double kv = greens_kernel_smooth(spec, (static_cast<double>(j) - xi) * step) * w;
                double p = 1.0;
                for (int q = 0; q <= kDegree; ++q) {
                    mu[q] += kv * p;
                    p *= xi;
                }
            }
            for (int q = 0; q <= kDegree; ++q) moments_[j * (kDegree + 1) + q] = mu[q];
        });
        for (int type = 0; type < 3; ++type) {
            auto coeffs = lagrange_coefficients(kDegree, -type);
            auto& w = weights_[type];
            w.assign(n * (kDegree + 1), 0.0);
            for (std::size_t j = 1; j < n; ++j)
                for (int i = 0; i <= kDegree; ++i) {
                    double acc = 0.0;
                    for (int q = 0; q <= kDegree; ++q) acc += coeffs[i][q] * moments_[j * (kDegree + 1) + q];
                    w[j * (kDegree + 1) + i] = acc;
                }
        }
    }

    double step() const { return step_; }
    std::size_t size() const { return n_; }

    /// Response to `input` sampled on this plan's spacing; input.size() <= size().
    std::vector<double> apply(std::span<const double> input) const {
        const std::size_t n = input.size();
        if (n > n_) throw DomainError("ConvolutionPlan::apply: input longer than plan");
        std::vector<double> out(input.begin(), input.end());
        if (identity_ || n < 2) return out;
        const int degree = static_cast<int>(std::min<std::size_t>(kDegree, n - 1));
        std::array<std::vector<std::array<double, kDegree + 1>>, 3> local;
        if (degree < kDegree) {
            for (int type = 0; type <= degree; ++type) {
                auto coeffs = lagrange_coefficients(degree, -type);
                local[type].resize(n);
                for (std::size_t j = 1; j < n; ++j) {
                    local[type][j].fill(0.0);
                    for (int i = 0; i <= degree; ++i)
                        for (int q = 0; q <= degree; ++q)
                            local[type][j][i] += coeffs[i][q] * moments_[j * (kDegree + 1) + q];
                }
            }
        }
        for (std::size_t m = 1; m < n; ++m) {
            double acc = 0.0;
            for (std::size_t j = 1; j <= m; ++j) {
                const std::size_t p = m - j;
                const std::size_t s0 = std::min<std::size_t>(p > 0 ? p - 1 : 0, n - 1 - degree);
                const int type = static_cast<int>(p - s0);
                if (degree == kDegree) {
                    const double* w = &weights_[type][j * (kDegree + 1)];
                    acc += w[0] * input[s0] + w[1] * input[s0 + 1] + w[2] * input[s0 + 2] + w[3] * input[s0 + 3];
                } else {
                    for (int i = 0; i <= degree; ++i) acc += local[type][j][i] * input[s0 + i];
                }
            }
            out[m] -= acc;
        }
        return out;
    }

private:
    // Monomial coefficients (in x) of the Lagrange basis on nodes first, first+1, ..., first+degree.
    static std::array<std::array<double, kDegree + 1>, kDegree + 1> lagrange_coefficients(int degree, int first) {
        std::array<std::array<double, kDegree + 1>, kDegree + 1> c{};
        for (int i = 0; i <= degree; ++i) {
            std::array<double, kDegree + 2> poly{};
            poly[0] = 1.0;
            double denom = 1.0;
            for (int m = 0; m <= degree; ++m) {
                if (m == i) continue;
                const double node = first + m;
                for (int q = kDegree + 1; q >= 1; --q) poly[q] = poly[q - 1] - node * poly[q];
                poly[0] = -node * poly[0];
                denom *= static_cast<double>(i - m);
            }
            for (int q = 0; q <= kDegree; ++q) c[i][q] = poly[q] / denom;
        }
        return c;
    }

    double step_;
    std::size_t n_;
    bool identity_;
    std::vector<double> moments_;
    std::array<std::vector<double>, 3> weights_;
};

/// input(t) - int_0^t input(t - s) K(s) ds on the input's grid.
inline Waveform convolve_response(const Waveform& input, const AbsorberSpec& spec) {
    input.validate();
    spec.validate();
    if (spec.b == 0.0) return input;
    const ConvolutionPlan plan(spec, input.grid.step(), input.grid.n_samples);
    return {input.grid, plan.apply(input.amplitude)};
}

struct MaxwellBlochResult {
    Waveform output;
    std::vector<double> depth_b;                ///< cumulative b at each depth node, 0..b
    std::vector<CoherenceSeries> coherence;     ///< Im sigma history at each depth node
};

/// Marches  d(sigma)/dt = -gamma sigma + i Omega,  dOmega/d(depth_b) = i sigma
/// (retarded frame, depth in cumulative b) with the trapezoidal box scheme,
/// second order in both steps. In real form with sigma = i s:
///   ds/dt = -gamma s + Omega,   dOmega/db = -s.
inline MaxwellBlochResult propagate_mb(const Waveform& input, const AbsorberSpec& spec, int n_z) {
    input.validate();
    spec.validate();
    if (n_z < 8) throw ResolutionError("propagate_mb: need at least 8 depth steps");
    const double dt = input.grid.step();
    if (spec.gamma * dt > 0.1 || spec.b * dt > 0.1)
        throw ResolutionError("propagate_mb: time step too coarse (need gamma*dt <= 0.1 and b*dt <= 0.1)");

    const std::size_t nt = input.grid.n_samples;
    const double a = 0.5 * spec.gamma * dt, h = 0.5 * dt;
    const double q = 0.5 * spec.b / n_z;

    MaxwellBlochResult res;
    res.depth_b.resize(static_cast<std::size_t>(n_z) + 1);
    res.coherence.reserve(static_cast<std::size_t>(n_z) + 1);

    std::vector<double> field = input.amplitude;
    std::vector<double> coh(nt, 0.0);
    for (std::size_t i = 0; i + 1 < nt; ++i) coh[i + 1] = (coh[i] * (1.0 - a) + h * (field[i] + field[i + 1])) / (1.0 + a);
    res.depth_b[0] = 0.0;
    res.coherence.push_back({input.grid, coh});

    std::vector<double> next_field(nt), next_coh(nt);
    for (int k = 0; k < n_z; ++k) {
        next_coh[0] = 0.0;
        next_field[0] = field[0] - q * coh[0];
        for (std::size_t i = 0; i + 1 < nt; ++i) {
            const double s = (next_coh[i] * (1.0 - a) + h * next_field[i] + h * field[i + 1] - h * q * coh[i + 1]) /
                             (1.0 + a + h * q);
            next_coh[i + 1] = s;
            next_field[i + 1] = field[i + 1] - q * (coh[i + 1] + s);
        }
        field.swap(next_field);
        coh.swap(next_coh);
        res.depth_b[static_cast<std::size_t>(k) + 1] = spec.b * (k + 1) / n_z;
        res.coherence.push_back({input.grid, coh});
    }
    res.output = {input.grid, field};
    return res;
}

/// Complex gain exp(-i b / (nu + i gamma)) at (complex) angular frequency nu.
inline std::complex<double> transfer_function(std::complex<double> nu, const AbsorberSpec& spec) {
    using namespace std::complex_literals;
    return std::exp(-1.0i * spec.b / (nu + 1.0i * spec.gamma));
}

inline std::complex<double> transfer_function(double nu, const AbsorberSpec& spec) {
    return transfer_function(std::complex<double>(nu, 0.0), spec);
}

/// Step response from the transfer function: the inverse Fourier integral is
/// deformed onto a fixed Talbot contour in p = -i nu, where the integrand
/// H(i p)/p decays and all singularities (p = 0, p = -gamma) lie inside.
inline double step_response_spectral(const AbsorberSpec& spec, double t, int nodes = 32) {
    using namespace std::complex_literals;
    spec.validate();
    if (!(t >= 0.0)) throw DomainError("step_response_spectral: t must be >= 0");
    if (t == 0.0) return 1.0;
    const auto image = [&](std::complex<double> p) { return transfer_function(1.0i * p, spec) / p; };
    const double r = 2.0 * nodes / (5.0 * t);
    double sum = 0.5 * std::exp(r * t) * image({r, 0.0}).real();
    for (int k = 1; k < nodes; ++k) {
        const double theta = k * std::numbers::pi / nodes;
        const double cot = 1.0 / std::tan(theta);
        const std::complex<double> p = r * theta * std::complex<double>(cot, 1.0);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        sum += (std::exp(t * p) * image(p) * std::complex<double>(1.0, sigma)).real();
    }
    return r / nodes * sum;
}

/// Output for a rectangular input of unit height on [t_start, t_start + duration],
/// as the difference of two spectrally inverted steps.
inline Waveform propagate_rectangular_spectral(const AbsorberSpec& spec, double duration, const TimeGrid& grid) {
    grid.validate();
    if (!(duration > 0.0)) throw DomainError("propagate_rectangular_spectral: duration must be > 0");
    return Waveform::sample(grid, [&](double t) {
        const double s = t - grid.t_start;
        double v = step_response_spectral(spec, s);
        if (s >= duration) v -= step_response_spectral(spec, s - duration);
        return v;
    });
}

} // namespace superrad
