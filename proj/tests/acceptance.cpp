// Acceptance criteria: one PASS/FAIL line each, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "superrad/io.hpp"
#include "superrad/superrad.hpp"
#include "superrad_app.hpp"

using namespace superrad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Stack in units where b1 = 1 (t_p = b1 t_p), on a grid through t_p up to 2 t_p.
struct Burst {
    Waveform closed;
    PulseMetrics metrics;
    double seconds;
};

Burst burst(const std::vector<double>& slices_bt, double gamma_tp) {
    const double tp = slices_bt.front();
    const auto stack = SliceStack::from_bt(slices_bt, tp, gamma_tp / tp);
    const auto grid = grid_through(tp, 2.0 * tp, 128.0);
    const auto t0 = std::chrono::steady_clock::now();
    Waveform w;
    switch (slices_bt.size()) {
    case 1: w = one_slice_output(stack.slice_b[0], stack.gamma, tp, grid); break;
    case 2: w = two_slice_output(stack, grid); break;
    default: w = three_slice_output(stack, grid); break;
    }
    return {w, pulse_metrics(w), seconds_since(t0)};
}

double max_diff(const Waveform& a, const Waveform& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.amplitude.size(); ++i) m = std::max(m, std::abs(a.amplitude[i] - b.amplitude[i]));
    return m;
}

} // namespace

int main() {
    criterion(1, "single-slice burst", [] {
        const auto b = burst({3.67}, 1e-4);
        const double g = b.metrics.peak_intensity_gain;
        return Outcome{std::abs(g - 5.76) <= 0.02 && b.seconds < 1.0,
                       fmt("gain %.4f (5.76 +/- 0.02), runtime %.3f s (< 1 s)", g, b.seconds)};
    });

    criterion(2, "two-slice burst", [] {
        const auto b = burst({3.67, 8.63}, 1e-4);
        const auto t0 = std::chrono::steady_clock::now();
        const auto stack = SliceStack::from_bt({3.67, 8.63}, 3.67, 1e-4 / 3.67);
        const auto numeric = cascade_numeric(stack, Waveform::constant(b.closed.grid, 1.0));
        const double secs = b.seconds + seconds_since(t0);
        const double g = b.metrics.peak_intensity_gain, d = max_diff(b.closed, numeric);
        return Outcome{std::abs(g - 9.65) <= 0.03 && d <= 1e-5 && secs < 5.0,
                       fmt("gain %.4f (9.65 +/- 0.03), closed vs numeric %.2e (<= 1e-5), runtime %.3f s (< 5 s)", g, d,
                           secs)};
    });

    criterion(3, "three-slice burst", [] {
        const auto b = burst({3.67, 8.63, 13.57}, 1e-4);
        const double g = b.metrics.peak_intensity_gain;
        const double amp_tp = b.closed.amplitude[b.closed.grid.nearest(3.67)];
        return Outcome{std::abs(g - 13.36) <= 0.05 && amp_tp < 0.0 && b.seconds < 30.0,
                       fmt("gain %.4f (13.36 +/- 0.05), amplitude at t_p+ %.4f (< 0), runtime %.3f s (< 30 s)", g, amp_tp,
                           b.seconds)};
    });

    criterion(4, "domain boundaries", [] {
        const double target[] = {3.6705, 12.3046, 25.8781};
        double worst = 0.0;
        std::string zs;
        for (double gamma_tp : {1e-4, 1e-3}) {
            const auto dec = domain_boundaries(30.0, gamma_tp, 1.0);
            if (dec.boundaries_bt.size() != 3) return Outcome{false, fmt("found %zu zeros", dec.boundaries_bt.size())};
            for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(dec.boundaries_bt[k] / target[k] - 1.0));
            zs += fmt(" gamma t_p=%g: {%.5f, %.5f, %.5f}", gamma_tp, dec.boundaries_bt[0], dec.boundaries_bt[1],
                      dec.boundaries_bt[2]);
        }
        return Outcome{worst <= 1e-3, fmt("max relative deviation %.2e (<= 1e-3);", worst) + zs};
    });

    criterion(5, "route agreement", [] {
        double worst = 0.0;
        for (double ratio : {1e-3, 0.1, 1.0})
            for (int i = 0; i <= 100; ++i) {
                const double bt = 0.5 * i;
                const AbsorberSpec s{1.0, ratio};
                worst = std::max(worst, std::abs(step_response_series(s, bt) - step_response_quadrature(s, bt)));
            }
        const AbsorberSpec s{1.0, 1e-3};
        double err[3];
        int k = 0;
        for (int nz : {64, 128, 256}) {
            const TimeGrid grid{0.0, 30.0, static_cast<std::size_t>(30 * nz) + 1};
            const auto out = propagate_mb(Waveform::constant(grid, 1.0), s, nz).output;
            double e = 0.0;
            for (std::size_t i = 0; i < grid.n_samples; ++i)
                e = std::max(e, std::abs(out.amplitude[i] - step_response_series(s, grid.at(i))));
            err[k++] = e;
        }
        const double r1 = err[0] / err[1], r2 = err[1] / err[2];
        const bool ok = worst <= 1e-8 && r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5 && err[2] <= 1e-4;
        return Outcome{ok, fmt("series vs quadrature %.2e (<= 1e-8); MB ratios %.3f, %.3f (3.5-4.5); MB error at 256 "
                               "nodes %.2e (<= 1e-4)",
                               worst, r1, r2, err[2])};
    });

    criterion(6, "composition", [] {
        const TimeGrid grid{0.0, 20.0, 1001};
        double worst_step = 0.0, worst_random = 0.0;
        for (int which = 0; which < 2; ++which) {
            const Waveform in = which == 0 ? Waveform::constant(grid, 1.0) : app::band_limited_input(grid, 1);
            const auto chained = convolve_response(convolve_response(in, {1.0, 0.1}), {2.0, 0.1});
            const auto single = convolve_response(in, {3.0, 0.1});
            (which == 0 ? worst_step : worst_random) = max_diff(chained, single);
        }
        return Outcome{worst_step < 1e-6 && worst_random < 1e-6,
                       fmt("step residual %.2e, band-limited residual %.2e (< 1e-6)", worst_step, worst_random)};
    });

    criterion(7, "steady states", [] {
        const double b = 1.0, gamma = 0.1, t = 20.0 / gamma;
        const auto v = step_series({b, gamma}, t);
        const double field_ref = std::exp(-b / gamma), coh_ref = field_ref / gamma;
        const double ef = std::abs(v.field - field_ref) / field_ref;
        const double ec = std::abs(v.im_coherence - coh_ref) / coh_ref;
        return Outcome{ef < 1e-6 && ec < 1e-6,
                       fmt("field rel. error %.2e, coherence rel. error %.2e (both < 1e-6 at t = 20/gamma)", ef, ec)};
    });

    criterion(8, "stacking comparator", [] {
        const double s = stacking_peak(1.0, 0.0, 3.6705, 12.3046);
        const double two = peak_amplitude_at_tp(SliceStack::from_bt({3.67, 8.63}, 3.67, 1e-4 / 3.67));
        return Outcome{std::abs(s - 3.1056) <= 1e-3 && std::abs(s - two) <= 1e-3,
                       fmt("stacking peak %.5f (3.1056 +/- 1e-3), two-slice peak %.5f, difference %.2e (<= 1e-3)", s, two,
                           std::abs(s - two))};
    });

    criterion(9, "figure reproduction", [] {
        const fs::path dir = fs::temp_directory_path() / "superrad_acceptance_figures";
        fs::remove_all(dir);
        std::string detail;
        bool ok = true;
        for (int n = 2; n <= 4; ++n) {
            app::RunConfig c;
            c.command = "figure";
            c.figure = n;
            c.out = dir.string();
            const auto res = app::run(c);
            double prev_peak = 1e300;
            for (const auto& f : res.files) {
                const auto t = io::parse_csv(io::read_file(dir / f));
                const auto time = t.column("t"), inten = t.column("intensity");
                std::size_t ip = 0;
                for (std::size_t i = 0; i < inten.size(); ++i)
                    if (inten[i] > inten[ip]) ip = i;
                // other local maxima must stay below half the burst
                double second = 0.0;
                for (std::size_t i = 1; i + 1 < inten.size(); ++i)
                    if (i != ip && inten[i] >= inten[i - 1] && inten[i] >= inten[i + 1] && std::abs(time[i] - time[ip]) > 0.5)
                        second = std::max(second, inten[i]);
                const bool at_switch = std::abs(time[ip] - 3.67) < 1e-9;
                ok = ok && at_switch && second < 0.5 * inten[ip] && inten[ip] < prev_peak;
                detail += fmt(" fig%d %s peak %.3f at t=%.3f;", n, f.c_str(), inten[ip], time[ip]);
                prev_peak = inten[ip];
            }
        }
        app::RunConfig c;
        c.command = "figure";
        c.figure = 1;
        c.out = dir.string();
        app::run(c);
        const auto prof = io::parse_csv(io::read_file(dir / "figure1_profile.csv"));
        const auto depth = prof.column("depth_bt"), field = prof.column("field"), coh = prof.column("im_coherence");
        int sign_changes = 0;
        double worst_offset = 0.0;
        const double h = depth[1] - depth[0];
        for (std::size_t i = 1; i < coh.size(); ++i) {
            if ((coh[i] < 0.0) != (coh[i - 1] < 0.0)) {
                ++sign_changes;
                // nearest field extremum
                double best = 1e300;
                for (std::size_t j = 1; j + 1 < field.size(); ++j)
                    if ((field[j] - field[j - 1]) * (field[j + 1] - field[j]) <= 0.0)
                        best = std::min(best, std::abs(depth[j] - depth[i]));
                worst_offset = std::max(worst_offset, best);
            }
        }
        ok = ok && sign_changes == 3 && worst_offset <= 2.0 * h;
        detail += fmt(" fig1: %d coherence zeros, field extrema within %.3f of them (grid %.3f)", sign_changes,
                      worst_offset, h);
        fs::remove_all(dir);
        return Outcome{ok, detail};
    });

    criterion(10, "property suites", [] {
        double jn_worst = 0.0;
        for (int n = 0; n <= 8; ++n)
            for (int i = 1; i <= 200; ++i) {
                const double u = 0.25 * i;
                const double via = specfun::bessel_jn(n, 2.0 * std::sqrt(u)) / std::pow(u, 0.5 * n);
                jn_worst = std::max(jn_worst, std::abs(specfun::jn_scaled(n, u) - via) / std::max(1e-3, std::abs(via)));
            }
        const auto tails = specfun::poisson_tail_table(600, 200.0);
        bool tails_ok = true;
        for (std::size_t i = 0; i < tails.size(); ++i)
            tails_ok = tails_ok && tails[i] >= 0.0 && tails[i] <= 1.0 && (i == 0 || tails[i] <= tails[i - 1]);
        const auto opt = optimize_stack(1, 1.0, 1e-4, 60);
        const double tp_b1 = opt.best_stack.t_p * opt.best_stack.slice_b[0];
        const double rel = std::abs(tp_b1 / 3.6705 - 1.0);
        return Outcome{jn_worst <= 1e-10 && tails_ok && rel <= 1e-2,
                       fmt("jn_scaled vs Bessel %.2e (<= 1e-10); T_n at b/gamma=200 within [0,1] and monotone: %s; "
                           "optimizer t_p b1 = %.5f, rel. deviation %.2e from 3.6705 (<= 1e-2)",
                           jn_worst, tails_ok ? "yes" : "no", tp_b1, rel)};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
