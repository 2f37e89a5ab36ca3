#include "cli_commands.hpp"

#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv)
{
    using namespace bhflow::cli;
    CLI::App app{"Radial Euler flows on Schwarzschild: steady states, Riemann fans, random choice evolution"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sc, bool config) {
        if (config)
            sc->add_option("--config", o.config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
        sc->add_option("--out", o.out_dir, "output directory");
        sc->add_option("--seq-offset", o.seq_offset, "offset of the van der Corput sequence");
        sc->add_option("--parallel", o.parallel, "worker threads (capped by SOLVER_THREADS)")->check(CLI::PositiveNumber);
    };
    auto* steady = app.add_subcommand("steady", "steady-state atlas");
    auto* riemann = app.add_subcommand("riemann", "Riemann fan at a frozen radius");
    auto* evolve = app.add_subcommand("evolve", "random choice evolution");
    auto* limits = app.add_subcommand("limits", "limit consistency checks");
    auto* verify = app.add_subcommand("verify", "acceptance suite");
    auto* plot = app.add_subcommand("plot", "write a gnuplot script for an output directory");
    for (auto* sc : {steady, riemann, evolve, limits})
        common(sc, true);
    common(verify, false);
    verify->add_option("--suite", o.suite, "all or a comma list of criterion ids");
    plot->add_option("--out", o.out_dir, "output directory holding manifest.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    CLI::App* sc = app.get_subcommands().front();
    Manifest man;
    man.command = sc->get_name();
    man.config_path = o.config_path;
    man.output_dir = o.out_dir;
    const bool verify_files = verify->count("--out") > 0;
    try {
        if (sc != plot && (sc != verify || verify_files))
            std::filesystem::create_directories(o.out_dir);
        int rc = ok;
        if (sc == steady)
            rc = cmd_steady(o, man);
        else if (sc == riemann)
            rc = cmd_riemann(o, man);
        else if (sc == evolve)
            rc = cmd_evolve(o, man);
        else if (sc == limits)
            rc = cmd_limits(o, man);
        else if (sc == verify)
            rc = cmd_verify(o, man, verify_files);
        else
            return cmd_plot(o, man);
        if (sc != verify || verify_files)
            write_manifest(man);
        return rc;
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return usage;
    } catch (const bhflow::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_failure;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_failure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return solver_failure;
    }
}
