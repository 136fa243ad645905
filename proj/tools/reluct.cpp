// Command-line front end: loads a config, dispatches to the analysis
// subcommands and writes CSV output.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "reluct/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulation and equilibrium analysis of single-coil electromechanical "
                 "switching devices"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    double u_query = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_path, "output CSV path")->required();
    };

    CLI::App* sim = app.add_subcommand("simulate", "integrate the hybrid automaton");
    add_common(sim);
    CLI::App* eq = app.add_subcommand("equilibria", "hybrid equilibria at one supply voltage");
    add_common(eq);
    eq->add_option("--u", u_query, "supply voltage [V]")->required();
    CLI::App* crit = app.add_subcommand("critical", "closed-form and continued critical points");
    add_common(crit);
    CLI::App* sw = app.add_subcommand("sweep", "bifurcation-diagram voltage sweep");
    add_common(sw);
    CLI::App* hy = app.add_subcommand("hysteresis", "hysteretic switching loop");
    add_common(hy);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const reluct::Config cfg = reluct::load_config(config_path);
        if (sim->parsed()) reluct::cli::cmd_simulate(cfg, out_path);
        if (eq->parsed()) reluct::cli::cmd_equilibria(cfg, u_query, out_path);
        if (crit->parsed()) reluct::cli::cmd_critical(cfg, out_path);
        if (sw->parsed()) reluct::cli::cmd_sweep(cfg, out_path);
        if (hy->parsed()) reluct::cli::cmd_hysteresis(cfg, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return reluct::cli::exit_code_for(e);
    }
    return 0;
}
