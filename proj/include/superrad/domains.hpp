// domains.hpp - spatial profiles at the switching time and the opposite-phase
// coherence domains they contain
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"
#include "superrad/propagation.hpp"

namespace superrad {

/// Field and coherence along the absorber at t_p. depth_b is the cumulative
/// rate; the coherence is normalised by t_p (amplitude x t_p units).
struct SpatialProfile {
    std::vector<double> depth_b;
    std::vector<double> field;
    std::vector<double> im_coherence;
    double t_p = 0.0;
    double gamma = 0.0;
};

/// Zeros of Im sigma(depth, t_p), in b*t_p units, and the slice widths between them.
struct DomainDecomposition {
    std::vector<double> boundaries_bt;
    std::vector<double> slice_bt;
    double t_p = 0.0;

    bool empty() const { return boundaries_bt.empty(); }
};

/// Per-slice rates sharing one switching time.
struct SliceStack {
    std::vector<double> slice_b;
    double t_p = 0.0;
    double gamma = 0.0;
    bool last_incomplete = false;  ///< final slice is a remainder past the last boundary

    std::size_t size() const { return slice_b.size(); }

    double total_b() const {
        double s = 0.0;
        for (double b : slice_b) s += b;
        return s;
    }

    void validate() const {
        if (slice_b.empty()) throw DomainError("SliceStack: no slices");
        for (double b : slice_b)
            if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("SliceStack: slice rates must be > 0");
        if (!(t_p > 0.0)) throw DomainError("SliceStack: t_p must be > 0");
        if (!(gamma > 0.0)) throw DomainError("SliceStack: gamma must be > 0");
    }

    /// Stack from per-slice b*t_p values.
    static SliceStack from_bt(const std::vector<double>& slice_bt, double t_p, double gamma) {
        SliceStack s;
        s.t_p = t_p;
        s.gamma = gamma;
        for (double v : slice_bt) s.slice_b.push_back(v / t_p);
        s.validate();
        return s;
    }
};

inline SpatialProfile spatial_profiles(double b_l, double gamma, double t_p, int n_depth) {
    if (!(b_l > 0.0) || !(t_p > 0.0)) throw DomainError("spatial_profiles: b_l and t_p must be > 0");
    if (n_depth < 64) throw DomainError("spatial_profiles: need at least 64 depth nodes");
    SpatialProfile p;
    p.t_p = t_p;
    p.gamma = gamma;
    const auto n = static_cast<std::size_t>(n_depth);
    p.depth_b.resize(n);
    p.field.resize(n);
    p.im_coherence.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const double b = b_l * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto v = step_series({b, gamma}, t_p);
        p.depth_b[i] = b;
        p.field[i] = v.field;
        p.im_coherence[i] = v.im_coherence / t_p;
    });
    return p;
}

namespace detail {

inline constexpr double kScanNodesPerTenBt = 512.0;

inline std::vector<std::pair<double, double>> sign_changes(const auto& f, double hi, double spacing) {
    std::vector<std::pair<double, double>> brackets;
    const int n = std::max(2, static_cast<int>(std::ceil(hi / spacing)));
    double prev_x = 0.0, prev_f = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double x = hi * i / n;
        const double fx = f(x);
        if (fx == 0.0 || (prev_f != 0.0 && (fx < 0.0) != (prev_f < 0.0))) brackets.emplace_back(prev_x, x);
        prev_x = x;
        prev_f = fx;
    }
    return brackets;
}

} // namespace detail

/// All zeros of Im sigma(b, t_p) for b*t_p in (0, b_l*t_p], from the exact coherence
/// series: sign scan (refined by doubling until the zero count is stable) and bisection
/// to 1e-10 in b*t_p.
inline DomainDecomposition domain_boundaries(double b_l, double gamma, double t_p) {
    if (!(b_l > 0.0) || !(t_p > 0.0) || !(gamma > 0.0))
        throw DomainError("domain_boundaries: b_l, gamma and t_p must be > 0");
    const auto coh = [&](double bt) { return coherence_step({bt / t_p, gamma}, t_p); };
    const double hi = b_l * t_p;

    double spacing = 10.0 / detail::kScanNodesPerTenBt;
    auto brackets = detail::sign_changes(coh, hi, spacing);
    for (int refine = 0; refine < 4; ++refine) {
        spacing *= 0.5;
        auto finer = detail::sign_changes(coh, hi, spacing);
        const bool stable = finer.size() == brackets.size();
        brackets = std::move(finer);
        if (stable) break;
    }

    DomainDecomposition dec;
    dec.t_p = t_p;
    for (auto [lo, up] : brackets) {
        double flo = coh(lo);
        if (coh(up) == 0.0) {
            dec.boundaries_bt.push_back(up);
            continue;
        }
        while (up - lo > 1e-10) {
            const double mid = 0.5 * (lo + up);
            const double fm = coh(mid);
            if (fm == 0.0) {
                lo = up = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                up = mid;
            }
        }
        dec.boundaries_bt.push_back(0.5 * (lo + up));
    }
    double prev = 0.0;
    for (double z : dec.boundaries_bt) {
        dec.slice_bt.push_back(z - prev);
        prev = z;
    }
    return dec;
}

/// Slices between consecutive boundaries; any depth beyond the last boundary
/// becomes a final slice flagged incomplete.
inline SliceStack slice_stack_from_domains(const DomainDecomposition& dec, double b_l, double gamma) {
    if (dec.empty()) throw std::invalid_argument("slice_stack_from_domains: empty decomposition");
    if (!(dec.t_p > 0.0)) throw DomainError("slice_stack_from_domains: t_p must be > 0");
    SliceStack s;
    s.t_p = dec.t_p;
    s.gamma = gamma;
    for (double w : dec.slice_bt) s.slice_b.push_back(w / dec.t_p);
    const double remainder_bt = b_l * dec.t_p - dec.boundaries_bt.back();
    if (remainder_bt > 1e-9 * std::max(1.0, b_l * dec.t_p)) {
        s.slice_b.push_back(remainder_bt / dec.t_p);
        s.last_incomplete = true;
    }
    return s;
}

} // namespace superrad
