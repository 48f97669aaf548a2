#include "rfcsim/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Transient-stability simulator for rotary-converter-fed 16.7 Hz railway grids"};
    app.require_subcommand(1);

    rfcsim::RunConfig cfg;
    std::vector<std::string> overrides;
    double dt = 0.0;
    double t_end = 0.0;
    std::string out_dir = "out";

    auto* run = app.add_subcommand("run", "simulate a scenario file or builtin case (case1, case2)");
    run->add_option("scenario", cfg.scenario, "scenario file or builtin name")->required();
    auto* dt_opt = run->add_option("--dt", dt, "integration step [s]");
    auto* t_end_opt = run->add_option("--t-end", t_end, "simulation end time [s]");
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--override", overrides, "parameter override key=value (repeatable)");
    run->add_flag("--emit-plots", cfg.emit_plots, "write plots.gp");
    run->add_flag("--dump-ybus", cfg.dump_ybus, "write the augmented admittance matrix of each topology");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rfcsim::kExitUsage;
    }

    if (*dt_opt)
        cfg.dt = dt;
    if (*t_end_opt)
        cfg.t_end = t_end;
    cfg.out_dir = out_dir;
    try {
        for (const auto& kv : overrides)
            cfg.overrides.push_back(rfcsim::split_override(kv));
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return rfcsim::kExitScenario;
    }
    return rfcsim::execute(cfg, std::cout, std::cerr);
}
