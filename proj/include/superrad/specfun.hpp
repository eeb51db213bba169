// specfun.hpp - Bessel functions of integer order, the scaled family
// J_n(2 sqrt u)/u^{n/2}, zeros of J1 and the Poisson-tail coefficients T_n(x).
//
// Everything is built on one quantity,
//
//     k_n(u) = n! J_n(2 sqrt u) / u^{n/2} = sum_m (-u)^m / (m! (n+1)(n+2)...(n+m)),
//
// which satisfies |k_n(u)| <= 1, k_n(0) = 1, and the three-term recurrence
//
//     k_{n-1} = k_n - u k_{n+1} / (n (n+1)).
//
// The recurrence is run downward (the stable direction for the J solution) from
// an order where the power series is well conditioned (n >= u), so no
// normalisation sum is needed and nothing overflows or underflows on the way.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "superrad/errors.hpp"

namespace superrad::specfun {

/// Below this u the scaled Bessel values come straight from the power series.
inline constexpr double kScaledSeriesCrossover = 1e-4;

namespace detail {

// Power series for k_n(u). Conditioned like exp(2u/(n+1)); callers keep u <~ n+1.
inline double scaled_power_series(int n, double u) {
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 10000; ++m) {
        term *= -u / (static_cast<double>(m) * static_cast<double>(n + m));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

inline int recurrence_start(int n_max, double u) {
    return std::max(n_max + 1, static_cast<int>(std::ceil(u)) + 20);
}

} // namespace detail

/// k_n(u) = n! J_n(2 sqrt u)/u^{n/2} for n = 0..n_max.
inline std::vector<double> factorial_scaled_bessel(int n_max, double u) {
    if (n_max < 0) throw DomainError("factorial_scaled_bessel: negative order");
    if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("factorial_scaled_bessel: u must be finite and >= 0");
    std::vector<double> k(static_cast<std::size_t>(n_max) + 1, 1.0);
    if (u == 0.0) return k;
    if (u < kScaledSeriesCrossover) {
        for (int n = 0; n <= n_max; ++n) k[n] = detail::scaled_power_series(n, u);
        return k;
    }
    const int top = detail::recurrence_start(n_max, u);
    double upper = detail::scaled_power_series(top + 1, u);
    double current = detail::scaled_power_series(top, u);
    for (int n = top; n >= 1; --n) {
        if (n <= n_max) k[n] = current;
        const double lower = current - u * upper / (static_cast<double>(n) * static_cast<double>(n + 1));
        upper = current;
        current = lower;
    }
    k[0] = current;
    return k;
}

/// Single k_n(u); runs the recurrence only down to order n.
inline double factorial_scaled_bessel_single(int n, double u) {
    if (n < 0) throw DomainError("factorial_scaled_bessel: negative order");
    if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("factorial_scaled_bessel: u must be finite and >= 0");
    if (u == 0.0) return 1.0;
    if (u < kScaledSeriesCrossover || u <= static_cast<double>(n + 1)) return detail::scaled_power_series(n, u);
    const int top = detail::recurrence_start(n, u);
    double upper = detail::scaled_power_series(top + 1, u);
    double current = detail::scaled_power_series(top, u);
    for (int m = top; m > n; --m) {
        const double lower = current - u * upper / (static_cast<double>(m) * static_cast<double>(m + 1));
        upper = current;
        current = lower;
    }
    return current;
}

/// J_n(x) for integer n >= 0 and finite real x.
inline double bessel_jn(int n, double x) {
    if (n < 0) throw DomainError("bessel_jn: order must be >= 0");
    if (!std::isfinite(x)) throw DomainError("bessel_jn: argument must be finite");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const double sign = (x < 0.0 && (n % 2 == 1)) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    const double u = 0.25 * ax * ax;
    const double k = factorial_scaled_bessel_single(n, u);
    if (n == 0) return sign * k;
    // (x/2)^n / n!
    const double scale = std::exp(n * std::log(0.5 * ax) - std::lgamma(n + 1.0));
    return sign * k * scale;
}

/// j_n(u) = J_n(2 sqrt u) / u^{n/2}; finite at u = 0 where it equals 1/n!.
inline double jn_scaled(int n, double u) {
    if (n < 0) throw DomainError("jn_scaled: order must be >= 0");
    if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("jn_scaled: u must be finite and >= 0");
    const double k = factorial_scaled_bessel_single(n, u);
    return k * std::exp(-std::lgamma(n + 1.0));
}

/// k-th positive zero of J1, k = 1..50. McMahon estimate bracket, bisection, secant polish.
inline double j1_zero(int k) {
    if (k < 1 || k > 50) throw RangeError("j1_zero: index " + std::to_string(k) + " outside 1..50");
    const double beta = (k + 0.25) * std::numbers::pi;
    const double guess = beta - 3.0 / (8.0 * beta) + 36.0 / (1536.0 * beta * beta * beta);
    const auto j1 = [](double x) { return bessel_jn(1, x); };
    double lo = guess - 0.5, hi = guess + 0.5;
    double flo = j1(lo), fhi = j1(hi);
    if (flo * fhi > 0.0) throw RangeError("j1_zero: estimate failed to bracket zero " + std::to_string(k));
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = j1(mid);
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    double x0 = lo, x1 = hi, f0 = flo, f1 = fhi;
    for (int it = 0; it < 20 && f1 != f0; ++it) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = j1(x1);
        if (std::abs(x1 - x0) <= 1e-15 * x1 || f1 == 0.0) break;
    }
    return x1;
}

/// T_n(x) = 1 - e^{-x} sum_{k<=n} x^k/k! = P(Poisson(x) > n) for n = 0..n_max.
///
/// Orders at or above floor(x) come from the tail sum e^{-x} sum_{k>n} x^k/k!,
/// accumulated downward from where the terms are negligible; lower orders use
/// 1 - head, whose head is then at most about one half. Both branches add
/// positive terms only, so no cancellation occurs for any x.
inline std::vector<double> poisson_tail_table(int n_max, double x) {
    if (n_max < 0) throw DomainError("poisson_tail_table: negative order");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("poisson_tail_table: x must be finite and >= 0");
    std::vector<double> tail(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) return tail;
    const double log_x = std::log(x);
    const auto pmf = [&](int k) { return std::exp(-x + k * log_x - std::lgamma(k + 1.0)); };

    const double mode_real = std::floor(x);
    const int mode = mode_real > n_max ? n_max + 1 : static_cast<int>(mode_real);
    const int head_end = std::min(n_max, mode - 1);
    double head = 0.0;
    for (int n = 0; n <= head_end; ++n) {
        head += pmf(n);
        tail[n] = 1.0 - head;
    }
    if (n_max < mode) return tail;

    // Tail at n_max, summed forward over k > n_max >= floor(x) (terms decrease).
    double acc = 0.0;
    for (int k = n_max + 1;; ++k) {
        const double p = pmf(k);
        acc += p;
        if (p <= 1e-18 * acc || p < 1e-300) break;
    }
    tail[n_max] = acc;
    for (int n = n_max - 1; n >= std::max(mode, 0); --n) {
        acc += pmf(n + 1);
        tail[n] = acc;
    }
    return tail;
}

inline double poisson_tail(int n, double x) { return poisson_tail_table(n, x)[static_cast<std::size_t>(n)]; }

/// f_n(b, t) = (gamma t)^n T_n(b/gamma), the coefficient of j_n(bt) in the step-response series.
inline double fn_coeff(int n, double b, double gamma, double t) {
    if (n < 0) throw DomainError("fn_coeff: order must be >= 0");
    if (!(gamma > 0.0)) throw DomainError("fn_coeff: gamma must be > 0");
    if (!(b >= 0.0) || !(t >= 0.0)) throw DomainError("fn_coeff: b and t must be >= 0");
    const double tn = poisson_tail(n, b / gamma);
    if (n == 0) return tn;
    return std::pow(gamma * t, n) * tn;
}

} // namespace superrad::specfun
