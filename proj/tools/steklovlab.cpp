// Command line front end: one subcommand per experiment kind, a config file
// for everything else. Exit codes: 0 success, 2 config error, 3 solver failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "steklov/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"steklovlab: Steklov spectra, cuspidal glueings, and sigma_1*L maximization"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const std::vector<std::string> kinds = {"mesh",   "spectrum", "glue",  "reduce",
                                            "verify-asymptotics", "optimize", "sweep"};
    for (const std::string& kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "configuration file (INI-like)");
        sub->add_option("--out", out_dir, "output directory (overrides [run] out)");
        sub->add_option("--threads", threads, "worker threads for sweeps");
        sub->add_option("--seed", seed, "seed for randomized initializations")
            ->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        steklov::RunConfig cfg =
            config_path.empty() ? steklov::RunConfig{} : steklov::RunConfig::parse_file(config_path);
        cfg.set("run", "kind", app.get_subcommands().front()->get_name());
        if (!out_dir.empty()) cfg.set("run", "out", out_dir);
        if (threads > 0) cfg.set("run", "threads", std::to_string(threads));
        if (seed_set) cfg.set("run", "seed", std::to_string(seed));

        const steklov::RunOutcome outcome = steklov::run(cfg);
        if (outcome.exit_code != 0) {
            std::cerr << "error: " << outcome.message << "\n";
            return outcome.exit_code;
        }
        for (const std::string& path : outcome.artifacts) std::cout << path << "\n";
        return 0;
    } catch (const steklov::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const steklov::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
