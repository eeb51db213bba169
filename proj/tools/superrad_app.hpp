// superrad_app.hpp - command implementations behind the superrad CLI
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "superrad/io.hpp"
#include "superrad/superrad.hpp"

namespace superrad::app {

using json = nlohmann::json;

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3 };

/// Bad flag combination or value detected after parsing.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;
    int figure = 0;
    std::optional<double> b;
    std::optional<double> b2;
    std::vector<double> gamma;
    std::optional<double> tp;
    std::optional<double> tmax;
    std::optional<double> samples;
    std::string method;
    std::vector<double> slices;
    std::string out = ".";
    std::string format = "csv";
    std::string reference_rate = "first";
    bool flips = true;
    int budget = 200;
    int n_slices = 3;
    std::uint64_t seed = 1;
};

struct RunResult {
    json manifest;
    std::vector<std::string> files;
};

namespace detail {

inline void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be a positive number");
}

inline double gamma_or(const RunConfig& c, double fallback) {
    if (c.gamma.size() > 1) throw UsageError("--gamma takes a single value for " + c.command);
    const double g = c.gamma.empty() ? fallback : c.gamma.front();
    require_positive(g, "--gamma");
    return g;
}

inline std::string stem_number(double v) {
    std::string s = io::format_number(v);
    for (char& ch : s)
        if (ch == '+') ch = 'p';
    return s;
}

class Emitter {
public:
    Emitter(const RunConfig& cfg, RunResult& res) : dir_(cfg.out), format_(cfg.format), res_(res) {
        if (format_ != "csv" && format_ != "json") throw UsageError("--format must be csv or json");
    }

    void waveform(const std::string& stem, const Waveform& w) {
        if (format_ == "csv") return write(stem + ".csv", io::waveform_csv(w));
        json j;
        std::vector<double> t(w.grid.n_samples), intensity(w.grid.n_samples);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = w.grid.at(i);
            intensity[i] = w.amplitude[i] * w.amplitude[i];
        }
        j["t"] = t;
        j["amplitude"] = w.amplitude;
        j["intensity"] = intensity;
        write(stem + ".json", j.dump(1) + "\n");
    }

    void profile(const std::string& stem, const SpatialProfile& p) {
        if (format_ == "csv") return write(stem + ".csv", io::profile_csv(p));
        json j;
        std::vector<double> depth_bt;
        for (double b : p.depth_b) depth_bt.push_back(b * p.t_p);
        j["depth_bt"] = depth_bt;
        j["field"] = p.field;
        j["im_coherence"] = p.im_coherence;
        write(stem + ".json", j.dump(1) + "\n");
    }

    void table(const std::string& stem, const io::CsvTable& t, const json& as_json) {
        if (format_ == "csv") return write(stem + ".csv", t.str());
        write(stem + ".json", as_json.dump(1) + "\n");
    }

    void manifest(const std::string& stem) {
        res_.manifest["files"] = res_.files;
        res_.manifest["version"] = kVersion;
        write_raw(stem + ".manifest.json", res_.manifest.dump(2) + "\n");
    }

private:
    void write(const std::string& name, const std::string& content) {
        write_raw(name, content);
        res_.files.push_back(name);
    }

    void write_raw(const std::string& name, const std::string& content) {
        io::write_atomic(std::filesystem::path(dir_) / name, content);
    }

    std::string dir_;
    std::string format_;
    RunResult& res_;
};

// Time-domain setup for slice stacks: t_p defaults to the value that makes the
// reference rate 1, so times come out in units of 1/b_ref.
struct StackSetup {
    SliceStack stack;
    double b_ref = 1.0;
    TimeGrid grid;
};

inline StackSetup stack_setup(const RunConfig& c, const std::vector<double>& slices_bt, double gamma_rel,
                              double tmax_over_tp) {
    if (slices_bt.empty()) throw UsageError("--slices needs at least one value");
    for (double v : slices_bt) require_positive(v, "--slices entries");
    if (c.reference_rate != "first" && c.reference_rate != "total")
        throw UsageError("--reference-rate must be first or total");
    double ref_bt = slices_bt.front();
    if (c.reference_rate == "total") {
        ref_bt = 0.0;
        for (double v : slices_bt) ref_bt += v;
    }
    StackSetup s;
    const double tp = c.tp.value_or(ref_bt);
    require_positive(tp, "--tp");
    s.b_ref = ref_bt / tp;
    s.stack = SliceStack::from_bt(slices_bt, tp, gamma_rel * s.b_ref);
    const double tmax = c.tmax.value_or(tmax_over_tp * tp);
    const double samples = c.samples.value_or(128.0);
    require_positive(tmax, "--tmax");
    require_positive(samples, "--samples");
    if (tmax < tp) throw UsageError("--tmax must not precede t_p");
    s.grid = grid_through(tp, tmax, samples * s.b_ref);
    return s;
}

inline json stack_json(const SliceStack& s) {
    std::vector<double> bt;
    for (double b : s.slice_b) bt.push_back(b * s.t_p);
    return {{"slice_b", s.slice_b}, {"slice_bt", bt}, {"t_p", s.t_p}, {"gamma", s.gamma},
            {"last_incomplete", s.last_incomplete}};
}

inline json metrics_json(const PulseMetrics& m) {
    return {{"peak_amplitude", m.peak_amplitude},
            {"peak_intensity_gain", m.peak_intensity_gain},
            {"t_peak", m.t_peak},
            {"width", m.width}};
}

inline Waveform cascade_waveform(const SliceStack& stack, const TimeGrid& grid, const std::string& method, bool flips) {
    if (method == "numeric" || !flips) {
        CascadeOptions opt;
        opt.flips_enabled = flips;
        return cascade_numeric(stack, Waveform::constant(grid, 1.0), opt);
    }
    switch (stack.size()) {
    case 1: return one_slice_output(stack.slice_b[0], stack.gamma, stack.t_p, grid);
    case 2: return two_slice_output(stack, grid);
    case 3: return three_slice_output(stack, grid);
    default: throw UsageError("--method series is available for at most 3 slices; use --method numeric");
    }
}

inline std::string cascade_method(const RunConfig& c, std::size_t n) {
    std::string m = c.method.empty() ? (n <= 3 ? "series" : "numeric") : c.method;
    if (m != "series" && m != "numeric") throw UsageError("--method must be series or numeric for cascades");
    if (!c.flips) m = "numeric";
    return m;
}

inline json grid_json(const TimeGrid& g) {
    return {{"t_start", g.t_start}, {"t_end", g.t_end}, {"n_samples", g.n_samples}, {"step", g.step()}};
}

} // namespace detail

inline RunResult cmd_domains(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const double b_l = c.b.value_or(30.0), tp = c.tp.value_or(1.0);
    const double gamma = detail::gamma_or(c, 1e-4);
    detail::require_positive(b_l, "--b");
    detail::require_positive(tp, "--tp");
    const int n_depth = static_cast<int>(c.samples.value_or(512.0));
    if (n_depth < 64) throw UsageError("--samples must be at least 64 depth nodes");

    const auto dec = domain_boundaries(b_l, gamma, tp);
    const auto prof = spatial_profiles(b_l, gamma, tp, n_depth);
    io::CsvTable table({"index", "boundary_bt", "slice_bt"});
    json rows = json::array();
    for (std::size_t i = 0; i < dec.boundaries_bt.size(); ++i) {
        table.add_row({static_cast<double>(i + 1), dec.boundaries_bt[i], dec.slice_bt[i]});
        rows.push_back({{"index", i + 1}, {"boundary_bt", dec.boundaries_bt[i]}, {"slice_bt", dec.slice_bt[i]}});
    }
    emit.table("domains", table, rows);
    emit.profile("domains_profile", prof);

    json field_at_boundaries = json::array();
    for (double z : dec.boundaries_bt) field_at_boundaries.push_back(step_response_series({z / tp, gamma}, tp));
    res.manifest["command"] = "domains";
    res.manifest["parameters"] = {{"b", b_l}, {"gamma", gamma}, {"tp", tp}, {"samples", n_depth}, {"format", c.format}};
    res.manifest["results"] = {{"boundaries_bt", dec.boundaries_bt},
                               {"slice_bt", dec.slice_bt},
                               {"field_at_boundaries", field_at_boundaries}};
    emit.manifest("domains");
    return res;
}

inline RunResult cmd_step(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const double b = c.b.value_or(1.0);
    const double gamma = detail::gamma_or(c, 0.1);
    const double tmax = c.tmax.value_or(20.0), samples = c.samples.value_or(128.0);
    if (!(b >= 0.0)) throw UsageError("--b must be >= 0");
    detail::require_positive(tmax, "--tmax");
    detail::require_positive(samples, "--samples");
    const double anchor = c.tp.value_or(tmax);
    detail::require_positive(anchor, "--tp");
    const TimeGrid grid = grid_through(anchor, tmax, samples);
    const AbsorberSpec spec{b, gamma};
    const std::string method = c.method.empty() ? "series" : c.method;

    Waveform w;
    if (method == "series") {
        w = Waveform::sample(grid, [&](double t) { return step_response_series(spec, t); });
    } else if (method == "quadrature") {
        w = Waveform::sample(grid, [&](double t) { return step_response_quadrature(spec, t); });
    } else if (method == "spectral") {
        w = Waveform::sample(grid, [&](double t) { return step_response_spectral(spec, t); });
    } else if (method == "mb") {
        w = propagate_mb(Waveform::constant(grid, 1.0), spec, 256).output;
    } else {
        throw UsageError("--method must be series, quadrature, spectral or mb");
    }
    emit.waveform("step", w);
    res.manifest["command"] = "step";
    res.manifest["parameters"] = {{"b", b},           {"gamma", gamma},   {"tmax", tmax},        {"samples", samples},
                                  {"tp", anchor},     {"method", method}, {"format", c.format}, {"grid", detail::grid_json(grid)}};
    emit.manifest("step");
    return res;
}

inline RunResult cmd_cascade(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const std::vector<double> slices = c.slices.empty() ? std::vector<double>{3.67, 8.63, 13.57} : c.slices;
    const double gamma_rel = detail::gamma_or(c, 0.01);
    const auto setup = detail::stack_setup(c, slices, gamma_rel, 2.0);
    const std::string method = detail::cascade_method(c, slices.size());
    const Waveform w = detail::cascade_waveform(setup.stack, setup.grid, method, c.flips);
    emit.waveform("cascade", w);

    res.manifest["command"] = "cascade";
    res.manifest["parameters"] = {{"slices", slices},
                                  {"gamma", gamma_rel},
                                  {"reference_rate", c.reference_rate},
                                  {"method", method},
                                  {"flips", c.flips},
                                  {"format", c.format},
                                  {"grid", detail::grid_json(setup.grid)},
                                  {"stack", detail::stack_json(setup.stack)}};
    res.manifest["results"] = {{"metrics", detail::metrics_json(pulse_metrics(w))},
                               {"amplitude_at_tp", w.amplitude[setup.grid.nearest(setup.stack.t_p)]}};
    emit.manifest("cascade");
    return res;
}

inline RunResult cmd_figure(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const int n = c.figure;
    const std::string stem = "figure" + std::to_string(n);
    res.manifest["command"] = "figure";

    if (n == 1) {
        const double b_l = c.b.value_or(30.0), tp = c.tp.value_or(1.0);
        const double gamma = detail::gamma_or(c, 1e-6);
        detail::require_positive(b_l, "--b");
        detail::require_positive(tp, "--tp");
        const int n_depth = static_cast<int>(c.samples.value_or(1024.0));
        if (n_depth < 64) throw UsageError("--samples must be at least 64 depth nodes");
        const auto prof = spatial_profiles(b_l, gamma, tp, n_depth);
        const auto dec = domain_boundaries(b_l, gamma, tp);
        emit.profile(stem + "_profile", prof);
        io::CsvTable table({"index", "boundary_bt", "field_at_boundary"});
        json rows = json::array();
        for (std::size_t i = 0; i < dec.boundaries_bt.size(); ++i) {
            const double f = step_response_series({dec.boundaries_bt[i] / tp, gamma}, tp);
            table.add_row({static_cast<double>(i + 1), dec.boundaries_bt[i], f});
            rows.push_back({{"index", i + 1}, {"boundary_bt", dec.boundaries_bt[i]}, {"field_at_boundary", f}});
        }
        emit.table(stem + "_domains", table, rows);
        res.manifest["parameters"] = {{"figure", 1},  {"b", b_l},          {"gamma", gamma},
                                      {"tp", tp},     {"samples", n_depth}, {"format", c.format}};
        res.manifest["results"] = {{"boundaries_bt", dec.boundaries_bt}};
        emit.manifest(stem);
        return res;
    }

    std::vector<double> slices;
    std::vector<double> gammas;
    switch (n) {
    case 2: slices = {3.67}, gammas = {0.003, 0.3}; break;
    case 3: slices = {3.67, 8.63}, gammas = {0.01, 0.1}; break;
    case 4: slices = {3.67, 8.63, 13.57}, gammas = {0.01, 0.1}; break;
    default: throw UsageError("figure number must be 1, 2, 3 or 4");
    }
    if (!c.slices.empty()) slices = c.slices;
    if (!c.gamma.empty()) gammas = c.gamma;
    const std::string method = detail::cascade_method(c, slices.size());

    json curves = json::array();
    json grid_info;
    for (double g : gammas) {
        detail::require_positive(g, "--gamma");
        const auto setup = detail::stack_setup(c, slices, g, 2.0);
        const Waveform w = detail::cascade_waveform(setup.stack, setup.grid, method, c.flips);
        const std::string curve = stem + "_gamma_" + detail::stem_number(g);
        emit.waveform(curve, w);
        curves.push_back({{"gamma", g},
                          {"file", res.files.back()},
                          {"stack", detail::stack_json(setup.stack)},
                          {"metrics", detail::metrics_json(pulse_metrics(w))}});
        grid_info = detail::grid_json(setup.grid);
    }
    res.manifest["parameters"] = {{"figure", n},
                                  {"slices", slices},
                                  {"gamma", gammas},
                                  {"reference_rate", c.reference_rate},
                                  {"method", method},
                                  {"flips", c.flips},
                                  {"format", c.format},
                                  {"grid", grid_info}};
    res.manifest["results"] = {{"curves", curves}};
    emit.manifest(stem);
    return res;
}

/// Rows N = 1..3 at gamma t_p in {1e-4, 1e-2, 1e-1}, t_p = 1, with the slice
/// boundaries at the exact coherence zeros for each gamma.
inline RunResult cmd_peak_table(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const double tp = 1.0;
    io::CsvTable table({"n_slices", "gamma_tp", "z1_bt", "z2_bt", "z3_bt", "amplitude", "intensity_gain"});
    json rows = json::array();
    for (int n = 1; n <= 3; ++n) {
        for (double g : {1e-4, 1e-2, 1e-1}) {
            const auto dec = domain_boundaries(30.0, g, tp);
            if (dec.boundaries_bt.size() < 3) throw NumericalError("peak-table: fewer than three domains", 0.0, 0.0);
            std::vector<double> zs(dec.boundaries_bt.begin(), dec.boundaries_bt.begin() + n);
            std::vector<double> widths(dec.slice_bt.begin(), dec.slice_bt.begin() + n);
            const SliceStack stack = SliceStack::from_bt(widths, tp, g);
            const double amp = peak_amplitude_at_tp(stack);
            std::vector<std::string> cells{std::to_string(n), io::format_number(g)};
            for (int k = 0; k < 3; ++k) cells.push_back(k < n ? io::format_number(zs[k]) : "nan");
            cells.push_back(io::format_number(amp));
            cells.push_back(io::format_number(amp * amp));
            table.add_text_row(cells);
            rows.push_back({{"n_slices", n}, {"gamma_tp", g}, {"boundaries_bt", zs}, {"amplitude", amp},
                            {"intensity_gain", amp * amp}});
        }
    }
    emit.table("peak_table", table, rows);
    res.manifest["command"] = "peak-table";
    res.manifest["parameters"] = {{"tp", tp}, {"gamma_tp", {1e-4, 1e-2, 1e-1}}, {"format", c.format}};
    res.manifest["results"] = rows;
    emit.manifest("peak_table");
    return res;
}

inline RunResult cmd_optimize(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const double b_total = c.b.value_or(1.0);
    const double gamma = detail::gamma_or(c, 1e-3);
    detail::require_positive(b_total, "--b");
    if (c.n_slices < 1 || c.n_slices > 8) throw UsageError("--n-slices must be in 1..8");
    if (c.budget < 50) throw UsageError("--budget must be at least 50");
    const auto r = optimize_stack(c.n_slices, b_total, gamma, c.budget);
    const double b_ref = r.baseline_stack.slice_b[0];
    const TimeGrid grid = grid_through(r.best_stack.t_p, r.best_stack.t_p + 1.0 / b_ref, 128.0 * b_ref);
    emit.waveform("optimize_best", cascade_numeric(r.best_stack, Waveform::constant(grid, 1.0)));
    res.manifest["command"] = "optimize";
    res.manifest["parameters"] = {{"n_slices", c.n_slices}, {"b", b_total},         {"gamma", gamma},
                                  {"budget", c.budget},     {"format", c.format}};
    res.manifest["results"] = {{"best_stack", detail::stack_json(r.best_stack)},
                               {"best_metrics", detail::metrics_json(r.best_metrics)},
                               {"baseline_stack", detail::stack_json(r.baseline_stack)},
                               {"baseline_gain", r.baseline_gain},
                               {"evaluations", r.evaluations},
                               {"converged", r.converged}};
    emit.manifest("optimize");
    return res;
}

/// Band-limited random waveform: a few sinusoids with frequencies up to omega_max.
inline Waveform band_limited_input(const TimeGrid& grid, std::uint64_t seed, double omega_max = 2.0, int tones = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> amp(tones), omega(tones), phase(tones);
    for (int k = 0; k < tones; ++k) {
        amp[k] = 2.0 * unit(rng) - 1.0;
        omega[k] = omega_max * unit(rng);
        phase[k] = 2.0 * std::numbers::pi * unit(rng);
    }
    return Waveform::sample(grid, [&](double t) {
        double v = 0.0;
        for (int k = 0; k < tones; ++k) v += amp[k] * std::sin(omega[k] * t + phase[k]);
        return v;
    });
}

inline RunResult cmd_compose_check(const RunConfig& c) {
    RunResult res;
    detail::Emitter emit(c, res);
    const double b1 = c.b.value_or(1.0), b2 = c.b2.value_or(2.0);
    const double gamma = detail::gamma_or(c, 0.1);
    const double tmax = c.tmax.value_or(20.0), samples = c.samples.value_or(50.0);
    detail::require_positive(b1, "--b");
    detail::require_positive(b2, "--b2");
    detail::require_positive(tmax, "--tmax");
    detail::require_positive(samples, "--samples");
    const TimeGrid grid = grid_through(tmax, tmax, samples);

    const auto residual = [&](const Waveform& in, Waveform* chained_out, Waveform* single_out) {
        const Waveform chained = convolve_response(convolve_response(in, {b1, gamma}), {b2, gamma});
        const Waveform single = convolve_response(in, {b1 + b2, gamma});
        double m = 0.0;
        for (std::size_t i = 0; i < grid.n_samples; ++i)
            m = std::max(m, std::abs(chained.amplitude[i] - single.amplitude[i]));
        if (chained_out) *chained_out = chained;
        if (single_out) *single_out = single;
        return m;
    };
    Waveform chained, single;
    const double r_random = residual(band_limited_input(grid, c.seed), &chained, &single);
    const double r_step = residual(Waveform::constant(grid, 1.0), nullptr, nullptr);

    io::CsvTable table({"t", "chained", "single", "residual"});
    json j;
    std::vector<double> t(grid.n_samples), diff(grid.n_samples);
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        t[i] = grid.at(i);
        diff[i] = chained.amplitude[i] - single.amplitude[i];
        table.add_row({t[i], chained.amplitude[i], single.amplitude[i], diff[i]});
    }
    j["t"] = t;
    j["chained"] = chained.amplitude;
    j["single"] = single.amplitude;
    j["residual"] = diff;
    emit.table("compose_check", table, j);
    res.manifest["command"] = "compose-check";
    res.manifest["parameters"] = {{"b", b1},           {"b2", b2},     {"gamma", gamma},     {"tmax", tmax},
                                  {"samples", samples}, {"seed", c.seed}, {"format", c.format}};
    res.manifest["results"] = {{"max_residual_random", r_random},
                               {"max_residual_step", r_step},
                               {"max_residual", std::max(r_random, r_step)}};
    emit.manifest("compose_check");
    return res;
}

inline RunResult run(const RunConfig& c) {
    if (c.command == "figure") return cmd_figure(c);
    if (c.command == "peak-table") return cmd_peak_table(c);
    if (c.command == "domains") return cmd_domains(c);
    if (c.command == "cascade") return cmd_cascade(c);
    if (c.command == "optimize") return cmd_optimize(c);
    if (c.command == "compose-check") return cmd_compose_check(c);
    if (c.command == "step") return cmd_step(c);
    throw UsageError("unknown command " + c.command);
}

/// Maps an exception from run() to the process exit status.
inline int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ConvergenceError&) {
        return kExitNumerical;
    } catch (const NumericalError&) {
        return kExitNumerical;
    } catch (const ResolutionError&) {
        return kExitNumerical;
    } catch (const std::invalid_argument&) {
        return kExitUsage;
    } catch (const std::domain_error&) {
        return kExitUsage;
    } catch (const std::out_of_range&) {
        return kExitUsage;
    } catch (...) {
        return 1;
    }
}

} // namespace superrad::app
