// superrad - command-line driver for the superradiant-burst library
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "superrad_app.hpp"

namespace {

using superrad::app::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    cmd->add_option("--format", cfg.format, "Data file format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_time_grid(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--tmax", cfg.tmax, "End of the time grid (units of 1/b_ref)");
    cmd->add_option("--samples", cfg.samples, "Samples per unit time");
}

void add_stack(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--slices", cfg.slices, "Per-slice b*t_p values, comma separated")->delimiter(',');
    cmd->add_option("--tp", cfg.tp, "Switching time t_p (default: reference rate = 1)");
    cmd->add_option("--reference-rate", cfg.reference_rate, "Rate that sets the time unit")
        ->check(CLI::IsMember({"first", "total"}))
        ->capture_default_str();
    cmd->add_option("--method", cfg.method, "series (closed form, N <= 3) or numeric");
    cmd->add_flag("!--no-flips", cfg.flips, "Disable the phase flips");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superradiant bursts from phase-switched resonant absorbers"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* figure = app.add_subcommand("figure", "Curve data behind figures 1-4");
    figure->add_option("n", cfg.figure, "Figure number")->required();
    figure->add_option("--gamma", cfg.gamma, "Decay rates (units of b_ref), comma separated")->delimiter(',');
    figure->add_option("--b", cfg.b, "Figure 1: total rate b_l");
    add_stack(figure, cfg);
    add_time_grid(figure, cfg);
    add_common(figure, cfg);

    auto* peak = app.add_subcommand("peak-table", "Burst amplitudes for N = 1..3 slices");
    add_common(peak, cfg);

    auto* domains = app.add_subcommand("domains", "Coherence domains along the absorber at t_p");
    domains->add_option("--b", cfg.b, "Total rate b_l")->default_str("30");
    domains->add_option("--gamma", cfg.gamma, "Decay rate")->delimiter(',');
    domains->add_option("--tp", cfg.tp, "Switching time")->default_str("1");
    domains->add_option("--samples", cfg.samples, "Depth nodes in the profile")->default_str("512");
    add_common(domains, cfg);

    auto* cascade = app.add_subcommand("cascade", "Output of a phase-switched slice stack");
    cascade->add_option("--gamma", cfg.gamma, "Decay rate (units of b_ref)")->default_str("0.01");
    add_stack(cascade, cfg);
    add_time_grid(cascade, cfg);
    add_common(cascade, cfg);

    auto* optimize = app.add_subcommand("optimize", "Tune t_p and slice boundaries for the largest burst");
    optimize->add_option("--b", cfg.b, "Total rate of the stack")->default_str("1");
    optimize->add_option("--gamma", cfg.gamma, "Decay rate")->default_str("0.001");
    optimize->add_option("--n-slices", cfg.n_slices, "Number of slices (1-8)")->capture_default_str();
    optimize->add_option("--budget", cfg.budget, "Objective evaluations")->capture_default_str();
    add_common(optimize, cfg);

    auto* compose = app.add_subcommand("compose-check", "Residual of chained versus single-absorber propagation");
    compose->add_option("--b", cfg.b, "First absorber rate")->default_str("1");
    compose->add_option("--b2", cfg.b2, "Second absorber rate")->default_str("2");
    compose->add_option("--gamma", cfg.gamma, "Decay rate")->default_str("0.1");
    compose->add_option("--seed", cfg.seed, "Seed of the random band-limited input")->capture_default_str();
    add_time_grid(compose, cfg);
    add_common(compose, cfg);

    auto* step = app.add_subcommand("step", "Step response of a single absorber");
    step->add_option("--b", cfg.b, "Absorber rate")->default_str("1");
    step->add_option("--gamma", cfg.gamma, "Decay rate")->default_str("0.1");
    step->add_option("--tp", cfg.tp, "Time that must fall on a grid node");
    step->add_option("--method", cfg.method, "series, quadrature, spectral or mb")
        ->check(CLI::IsMember({"series", "quadrature", "spectral", "mb"}));
    add_time_grid(step, cfg);
    add_common(step, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return superrad::app::kExitUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        const auto res = superrad::app::run(cfg);
        for (const auto& f : res.files) std::cout << f << '\n';
        if (res.manifest.contains("results") && cfg.command == "compose-check")
            std::cout << "max residual " << res.manifest["results"]["max_residual"].get<double>() << '\n';
        return superrad::app::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "superrad " << cfg.command << ": " << e.what() << '\n';
        return superrad::app::exit_code_for(std::current_exception());
    }
}
