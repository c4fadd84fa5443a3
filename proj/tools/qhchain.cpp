// qhchain — batch front end for the harmonic-chain transport simulator.
//
// Commands: steady, evolve, sweep, spectrum, validate. Each takes a JSON
// config (see configs/ for examples) and writes figure-ready CSV tables plus
// a machine-readable report.

#include <iostream>

#include <CLI11.hpp>

#include "qhchain/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"heat transport in open quantum harmonic chains"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string format = "both";
    std::optional<std::uint64_t> seed;

    for (const char* mode : {"steady", "evolve", "sweep", "spectrum", "validate"}) {
        auto* sub = app.add_subcommand(mode);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--format", format, "csv|json|both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qhchain::exit_config_error;
    }
    const std::string mode = app.get_subcommands().front()->get_name();

    qhchain::RunResult result =
        qhchain::run_command(mode, config_path, out_dir, seed, format);

    if (result.exit_code != qhchain::exit_ok) {
        std::cerr << result.report.dump(2) << "\n";
        return result.exit_code;
    }
    if (mode == "validate") {
        std::cout << result.report.dump(2) << "\n";
    } else {
        for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
    }
    return 0;
}
