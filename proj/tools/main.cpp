#include <CLI11.hpp>

#include <utility>

#include "../src/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for periodic Jacobi operators with decaying "
                 "oscillatory (Wigner-von Neumann) perturbations"};
    app.require_subcommand(1);

    jacobiwvn::cli::Options opt;
    const std::pair<const char*, const char*> commands[] = {
        {"bands", "band table and quasi-momentum sweep for a periodic operator"},
        {"classify", "elliptic/hyperbolic/parabolic classification of spectral points"},
        {"resonance", "resonant-frequency plan for a target point inside a band"},
        {"simulate", "iterate solutions, fit decay exponents, test subordination"},
        {"embed", "construct a potential embedding one or two decaying solutions"},
        {"verify", "run the built-in self-check suites"},
    };
    for (const auto& [name, blurb] : commands) {
        CLI::App* sub = app.add_subcommand(name, blurb);
        sub->add_option("--config", opt.config_path, "JSON config file");
        sub->add_option("--out", opt.out_dir, "output directory (default .)");
        sub->add_option("--seed", opt.seed, "seed for randomized suites");
        sub->add_option("--N", opt.n_override, "override the iteration length");
        sub->add_flag("--quick", opt.quick, "reduced-N verify variant");
        sub->callback([&opt, name]() { opt.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return jacobiwvn::cli::dispatch(opt);
}
